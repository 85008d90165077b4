#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dregsim/config.hpp"
#include "dregsim/results_io.hpp"

namespace dregsim {

struct ExperimentResult {
  std::vector<ResultRow> rows;
  RunArtifacts artifacts;
};

struct RateSlopeResult {
  double fitted_slope = 0.0;
  double predicted_slope = 0.0;  // -(r+1)/(r+2)
  double tuned_gamma = 0.0;
  std::vector<ResultRow> rows;
  RunArtifacts artifacts;
};

// max(1, ceil(n^beta)), capped at n.
std::size_t nodes_for_beta(std::size_t n, double beta);

// One node-count choice of the grid; beta is empty for explicit M values.
struct NodeChoice {
  std::optional<double> beta;
  std::size_t M = 1;
};
std::vector<NodeChoice> node_grid(const ExperimentConfig& config, std::size_t n);

// Eigenvalues for a grid point. Only the spiked model depends on (n, M).
Spectrum build_spectrum(const ExperimentConfig& config, std::size_t n, std::size_t node_count);

// One instance per target choice (each alpha, or the explicit target).
std::vector<std::pair<std::optional<double>, ProblemInstance>> build_instances(
    const ExperimentConfig& config, const Spectrum& spectrum);

// Absolute stepsizes: `gamma` as given, or gamma_scale / trace.
std::vector<double> stepsize_grid(const ExperimentConfig& config, double trace);

// Dataset seeds of the evaluation and tuning phases for sample size n.
Seed evaluation_seed(Seed master, std::size_t n);
Seed tuning_seed(Seed master, std::size_t n);

ExperimentResult run_m_sweep(const ExperimentConfig& config, unsigned threads = 1);
ExperimentResult run_sample_complexity(const ExperimentConfig& config, unsigned threads = 1);
RateSlopeResult run_rate_slope(const ExperimentConfig& config, unsigned threads = 1);
ExperimentResult run_real_data(const ExperimentConfig& config, unsigned threads = 1);

// Dispatches on config.kind (bounds_overlay runs the M sweep with the MC
// bias/variance split and bound curves).
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads = 1);

// Bound evaluations for every synthetic grid point, no simulation.
std::string bounds_table(const ExperimentConfig& config);

}  // namespace dregsim
