// Prints how the largest homogeneous set of the level-set families grows
// with the index count: close to 2*sqrt(n), far below any fixed fraction
// of n.

#include <iostream>

#include "polyball/cli.hpp"

using namespace polyball;

int main() {
  const auto rows = scaling_experiment({100, 400, 1600, 6400}, 5, 2024);
  std::cout << scaling_csv(rows);

  double worst_ratio = 0.0;
  for (const auto& row : rows) worst_ratio = std::max(worst_ratio, row.m_over_n);
  std::cout << "\nlargest m/n seen: " << format_fixed(worst_ratio) << "\n";
  return 0;
}
