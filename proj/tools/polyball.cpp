#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polyball/cli.hpp"

using namespace polyball;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  json j;
  in >> j;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::vector<int> parse_sizes(const std::string& csv) {
  std::vector<int> sizes;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ','))
    if (!item.empty()) sizes.push_back(std::stoi(item));
  return sizes;
}

struct Overrides {
  std::optional<int> gamma_size, depth, graph_n;
  std::optional<double> p, xi1, xi2;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format, out;

  void apply(Config& config) const {
    if (gamma_size) config.gamma_size = *gamma_size;
    if (depth) config.depth = *depth;
    if (graph_n) config.graph_n = *graph_n;
    if (p) config.p = *p;
    if (xi1) config.xi1 = *xi1;
    if (xi2) config.xi2 = *xi2;
    if (seed) config.seed = *seed;
    if (format) config.output_format = *format;
    if (out) config.output_path = *out;
  }
};

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const GuardExceeded& e) {
    std::cerr << "guard exceeded: " << e.what() << '\n';
    return 3;
  } catch (const DomainViolation& e) {
    std::cerr << "domain violation: " << e.what() << '\n';
    return 2;
  } catch (const InvariantFailure& e) {
    std::cerr << "invariant failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyball: exact surjections onto dyadic ball grids and renorming experiments"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--gamma-size", overrides.gamma_size, "index count of the target ball");
  app.add_option("--depth", overrides.depth, "dyadic depth d");
  app.add_option("--p", overrides.p, "lp exponent, p > 1");
  app.add_option("--xi1", overrides.xi1, "inner level, 1 < xi1 < xi2");
  app.add_option("--xi2", overrides.xi2, "outer level, xi1 < xi2 < 2^(1-1/p)");
  app.add_option("--graph-n", overrides.graph_n, "comparison graph size");
  app.add_option("--seed", overrides.seed, "global seed");
  app.add_option("--format", overrides.format, "output format: csv or json");
  app.add_option("--out", overrides.out, "output path, '-' for stdout");

  auto* map_cmd = app.add_subcommand("map", "apply one forward map to a JSON value");
  map_cmd->fallthrough();
  std::string map_id, map_input;
  map_cmd->add_option("id", map_id, "h|psi|phi|phi_power|f|union|g|compose")->required();
  map_cmd->add_option("--in", map_input, "input JSON file")->required()->check(CLI::ExistingFile);

  auto* lift_cmd = app.add_subcommand("lift", "apply one section (preimage builder)");
  lift_cmd->fallthrough();
  std::string lift_id, lift_input;
  lift_cmd->add_option("id", lift_id, "h|psi|phi|f|union|g|compose")->required();
  lift_cmd->add_option("--in", lift_input, "input JSON file")->required()->check(CLI::ExistingFile);

  auto* coverage_cmd =
      app.add_subcommand("coverage", "exact round-trip coverage of the whole dyadic grid");
  coverage_cmd->fallthrough();

  auto* norm_cmd = app.add_subcommand("norm", "norms and level-set membership of one point");
  norm_cmd->fallthrough();
  std::string norm_point, norm_graph;
  std::vector<int> norm_alphas;
  norm_cmd->add_option("--point", norm_point, "pair-vector JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  norm_cmd->add_option("--alpha", norm_alphas, "indices to report level membership for");
  norm_cmd->add_option("--graph", norm_graph, "comparison graph JSON {n, phi_values}")
      ->check(CLI::ExistingFile);

  auto* propq_cmd =
      app.add_subcommand("propq", "scaling experiment, or the pigeonhole check with --es");
  propq_cmd->fallthrough();
  std::string propq_sizes = "100,400,1600,6400";
  int propq_trials = 20;
  bool es_enabled = false;
  int es_r = 3, es_s = 3;
  std::string es_mode = "exhaustive";
  std::uint64_t es_trials = 100000;
  propq_cmd->add_option("--sizes", propq_sizes, "comma-separated sizes (empty for none)");
  propq_cmd->add_option("--trials", propq_trials, "random injections per size");
  propq_cmd->add_flag("--es", es_enabled, "run the monotone-subsequence length check instead");
  propq_cmd->add_option("--es-r", es_r, "increasing length r");
  propq_cmd->add_option("--es-s", es_s, "decreasing length s");
  propq_cmd->add_option("--es-mode", es_mode, "exhaustive or random")
      ->check(CLI::IsMember({"exhaustive", "random"}));
  propq_cmd->add_option("--es-trials", es_trials, "samples in random mode");

  auto* check_cmd = app.add_subcommand("check", "run the full invariant suite");
  check_cmd->fallthrough();
  bool thorough = false;
  check_cmd->add_flag("--thorough", thorough, "ten times the randomized trial counts");

  CLI11_PARSE(app, argc, argv);

  return run_guarded([&]() -> int {
    Config config;
    if (!config_path.empty()) config = Config::from_json(read_json_file(config_path));
    overrides.apply(config);
    config.validate();

    if (map_cmd->parsed()) {
      write_text(config.output_path, run_map(config, map_id, read_json_file(map_input)).dump(2) + "\n");
      return 0;
    }
    if (lift_cmd->parsed()) {
      write_text(config.output_path,
                 run_lift(config, lift_id, read_json_file(lift_input)).dump(2) + "\n");
      return 0;
    }
    if (coverage_cmd->parsed()) {
      const json report = run_coverage(config);
      write_text(config.output_path, report.dump(2) + "\n");
      if (!report.at("complete").get<bool>())
        throw InvariantFailure("coverage: " + std::to_string(report.at("hits").get<std::uint64_t>()) +
                               " of " + std::to_string(report.at("grid_size").get<std::uint64_t>()) +
                               " grid targets round-tripped");
      return 0;
    }
    if (norm_cmd->parsed()) {
      std::optional<SierpinskiGraph> graph;
      if (!norm_graph.empty()) graph = graph_from_json(read_json_file(norm_graph));
      write_text(config.output_path,
                 run_norm(config, read_json_file(norm_point), norm_alphas, std::move(graph))
                         .dump(2) +
                     "\n");
      return 0;
    }
    if (propq_cmd->parsed()) {
      if (es_enabled) {
        const json report =
            run_es(es_r, es_s, es_mode == "exhaustive" ? EsMode::kExhaustive : EsMode::kRandom,
                   es_trials, config.seed);
        if (config.output_format == "json") {
          write_text(config.output_path, report.dump(2) + "\n");
        } else {
          write_text(config.output_path,
                     "es r=" + std::to_string(es_r) + " s=" + std::to_string(es_s) +
                         " length=" + std::to_string(report.at("length").get<int>()) +
                         " mode=" + es_mode +
                         " checked=" + std::to_string(report.at("checked").get<std::uint64_t>()) +
                         " violations: " +
                         std::to_string(report.at("violations").get<std::uint64_t>()) + "\n");
        }
        if (report.at("violations").get<std::uint64_t>() != 0)
          throw InvariantFailure("erdos-szekeres: violations found");
        return 0;
      }
      const auto rows = scaling_experiment(parse_sizes(propq_sizes), propq_trials, config.seed);
      write_text(config.output_path, config.output_format == "json"
                                         ? scaling_json(rows).dump(2) + "\n"
                                         : scaling_csv(rows));
      return 0;
    }
    if (check_cmd->parsed()) {
      const CheckResult result = run_check(config, thorough);
      std::string text;
      for (const auto& line : result.lines)
        text += (line.ok ? "ok   " : "FAIL ") + line.name +
                (line.detail.empty() ? "" : " - " + line.detail) + "\n";
      text += result.all_ok ? "all checks passed\n" : "CHECKS FAILED\n";
      write_text(config.output_path, text);
      if (!result.all_ok) throw InvariantFailure("check: " + std::to_string([&] {
                                                   int bad = 0;
                                                   for (const auto& l : result.lines)
                                                     if (!l.ok) ++bad;
                                                   return bad;
                                                 }()) + " checks failed");
      return 0;
    }
    return 0;
  });
}
