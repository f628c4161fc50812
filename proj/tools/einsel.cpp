// Command-line experiment runner.
//
//   einsel --config configs/sieve.json --out sieve.csv
//   einsel --experiment observer-lists --seed 7
//
// Exit status: 0 on success, 2 for configuration errors, 3 when a run detects
// an invariant violation.

#include "einsel/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace ex = einsel::experiments;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ex::config_error("--config: cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string experiment_list() {
  std::string s;
  for (const auto& n : ex::experiment_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact small-register decoherence experiments"};
  app.set_version_flag("--version", ex::build_id());

  std::string config_path, out_path, format, experiment;
  std::uint64_t seed = 0;
  bool list = false;
  app.add_option("--config", config_path, "JSON config file (one experiment)");
  app.add_option("--experiment", experiment, "run an experiment at default parameters instead of a config file");
  app.add_option("--out", out_path, "artifact path (default: config 'output', else stdout)");
  app.add_option("--format", format, "artifact format")->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the config)");
  app.add_flag("--list", list, "print the experiment names and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (list) {
    for (const auto& n : ex::experiment_names()) std::cout << n << '\n';
    return 0;
  }

  try {
    if (config_path.empty() == experiment.empty())
      throw ex::config_error("give exactly one of --config or --experiment (experiments: " + experiment_list() + ")");
    ex::ExperimentConfig cfg = config_path.empty()
                                   ? ex::ExperimentConfig::from_json(ex::json{{"experiment", experiment}})
                                   : ex::ExperimentConfig::parse(read_file(config_path));
    if (*seed_opt) cfg.override_seed(seed);
    if (!format.empty()) cfg.override_format(ex::ExperimentConfig::parse_format(format, "--format"));
    if (!out_path.empty()) cfg.override_output(out_path);

    const ex::ResultArtifact artifact = ex::run(cfg);
    const std::string bytes = ex::render(artifact);
    if (cfg.output.empty())
      std::cout << bytes << std::flush;
    else
      ex::write_atomic(cfg.output, bytes);

    std::fprintf(stderr, "%s: %zu rows in %.3f s%s%s\n", artifact.experiment.c_str(), artifact.table.rows.size(),
                 artifact.wall_seconds, cfg.output.empty() ? "" : " -> ", cfg.output.c_str());
    return 0;
  } catch (const ex::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const einsel::invariant_violation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
