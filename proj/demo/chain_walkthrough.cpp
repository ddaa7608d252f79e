// Walks one signed grid target through every stage of the surjection chain
// and back, printing the intermediate objects.

#include <iostream>

#include "polyball/json_io.hpp"
#include "polyball/maps.hpp"

using namespace polyball;

int main() {
  const ChainConfig config = ChainConfig::standard(2, 3);
  std::cout << "chain over gamma size " << config.gamma_size() << ", depth " << config.depth()
            << ", " << config.z_states().size() << " count states, " << config.total_blocks()
            << " source blocks\n\n";

  const GridVector target(config.gamma(), {{0, Dyadic(1, 2)}, {1, Dyadic(-1, 2)}});
  std::cout << "target            " << to_json(target).dump() << "\n";

  const GridVector positive = psi_section(target);
  std::cout << "psi section       " << to_json(positive).dump() << "\n";

  const BitPoint rows = f_section(positive, config.depth(), config.weights());
  std::cout << "f section         " << to_json(rows).dump() << "\n";
  std::cout << "level counts      " << json(count_vector(rows).entries).dump() << "\n";

  const BlockPoint blocks = g_section(rows, config.weights());
  std::cout << "g section         " << to_json(blocks, config.gamma_doubled()).dump() << "\n";

  const SourcePoint source = encode_block_point(blocks, config);
  std::cout << "source point      " << to_json(source, config.gamma_doubled()).dump() << "\n\n";

  const GridVector image = compose_forward(source, config);
  std::cout << "forward image     " << to_json(image).dump() << "\n";
  std::cout << "round trip exact  " << (image == target ? "yes" : "no") << "\n";
  return image == target ? 0 : 1;
}
