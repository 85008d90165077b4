// dregsim: Monte Carlo experiments for one-shot averaged distributed
// least-squares estimators.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dregsim/config.hpp"
#include "dregsim/errors.hpp"
#include "dregsim/experiments.hpp"
#include "dregsim/parallel.hpp"
#include "dregsim/results_io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

dregsim::ExperimentConfig load(const std::string& path) { return dregsim::parse_config(path); }

int cmd_run(const std::string& path, const std::optional<std::string>& out,
            unsigned threads, const std::optional<std::uint64_t>& seed) {
  auto config = load(path);
  if (out) config.out_dir = *out;
  if (seed) config.seed = *seed;
  const unsigned workers = dregsim::resolve_threads(threads);
  std::cerr << "dregsim: " << dregsim::to_string(config.kind) << " '" << config.experiment_id
            << "' with " << workers << " thread(s)\n";
  const auto result = dregsim::run_experiment(config, workers);
  const auto files = dregsim::emit_outputs(result.rows, result.artifacts, config, config.out_dir);
  for (const auto& [key, value] : result.artifacts.summary)
    std::cout << key << " = " << value << "\n";
  for (const auto& note : result.artifacts.notes) std::cerr << "note: " << note << "\n";
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dregsim: distributed SGD / ridge regression simulator"};
  app.footer(dregsim::config_reference());
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "Run the configured experiment and write results.csv, plots and manifest");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides 'out')");
  run->add_option("--threads", threads, "Worker threads (default: DREGSIM_THREADS, then all cores)");
  run->add_option("--seed", seed, "Master seed (overrides 'seed')");

  auto* bounds = app.add_subcommand("bounds", "Print the theoretical bounds for every grid point");
  bounds->add_option("--config", config_path, "Config file")->required();

  auto* validate = app.add_subcommand("validate", "Parse and check a config file");
  validate->add_option("--config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, threads, seed);
    if (*bounds) {
      std::cout << dregsim::bounds_table(load(config_path));
      return kOk;
    }
    if (*validate) {
      const auto config = load(config_path);
      std::cout << "ok: " << dregsim::to_string(config.kind) << " '" << config.experiment_id << "'\n";
      return kOk;
    }
  } catch (const dregsim::ConfigError& e) {
    std::cerr << "dregsim: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "dregsim: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
