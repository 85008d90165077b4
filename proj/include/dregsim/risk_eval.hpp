#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "dregsim/ridge_engine.hpp"
#include "dregsim/sgd_engine.hpp"
#include "dregsim/spectrum_model.hpp"

namespace dregsim {

// 1/2 sum_j lambda_j (w_j - w*_j)^2.
double excess_risk_exact(const Vector& estimate, const ProblemInstance& instance);
double excess_risk_exact(const EstimatorOutput& estimate, const ProblemInstance& instance);

struct DsgdSpec {
  SgdConfig config;
};
struct DrrSpec {
  RidgeConfig config;
};
struct DolsSpec {};
using EstimatorSpec = std::variant<DsgdSpec, DrrSpec, DolsSpec>;

// Fits the distributed estimator described by `spec` on M shards of data.
EstimatorOutput fit_estimator(const EstimatorSpec& spec, const Dataset& data,
                              std::size_t node_count);

struct RiskReport {
  double excess_risk_mean = 0.0;
  double excess_risk_stderr = 0.0;
  std::optional<double> bias_mc;
  std::optional<double> bias_stderr;
  std::optional<double> variance_mc;
  std::optional<double> variance_stderr;
  // E<H b, v>; vanishes for well-specified noise.
  std::optional<double> cross_mc;
  std::optional<double> cross_stderr;
  // max over replicates of |risk_r - 1/2 ||b_r + v_r||_H^2|.
  std::optional<double> identity_residual;
  std::size_t replicates = 0;  // replicates that contributed
  std::size_t diverged = 0;    // replicates dropped for divergence
  bool aborted = false;        // more than half diverged; statistics unusable
};

struct McOptions {
  unsigned threads = 1;
  // Every replicate reuses the dataset of replicate 0. Test hook for the
  // zero-dispersion case.
  bool identical_replicates = false;
};

// Mean and standard error of the excess risk over `replicates` independent
// datasets; replicate r is sample_dataset(instance, n, replicate_seed(seed, r)).
// Divergent replicates are dropped and counted; DivergenceError when more
// than half diverge.
RiskReport mc_excess_risk(const ProblemInstance& instance, std::size_t n, std::size_t node_count,
                          const EstimatorSpec& spec, std::size_t replicates, Seed seed,
                          const McOptions& options = {});

// Several estimators on the same replicate datasets (common random numbers).
// Never throws for divergence; check RiskReport::aborted per entry. Ridge
// specs share one factorization per shard when more than one is requested.
std::vector<RiskReport> mc_excess_risk_grid(const ProblemInstance& instance, std::size_t n,
                                            std::size_t node_count,
                                            std::span<const EstimatorSpec> specs,
                                            std::size_t replicates, Seed seed,
                                            const McOptions& options = {});

// Bias = 1/2 E||b||_H^2 and Var = 1/2 E||v||_H^2 of the aggregated DSGD
// error paths, plus the total risk from the same datasets.
RiskReport mc_bias_variance(const ProblemInstance& instance, std::size_t n,
                            std::size_t node_count, const SgdConfig& config,
                            std::size_t replicates, Seed seed, const McOptions& options = {});

}  // namespace dregsim
