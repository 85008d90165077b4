#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dregsim/spectrum_model.hpp"

namespace dregsim {

// Which iterates enter the local estimate. With N local samples the iterates
// are w_1 (initial) .. w_{N+1}; `full` averages w_1..w_N, `tail(f)` averages
// w_{s+1}..w_N with s = floor(f N), `last_iterate` returns w_{N+1}.
struct Averaging {
  enum class Kind { full, tail, last_iterate };
  Kind kind = Kind::full;
  double tail_fraction = 0.5;

  static Averaging full() { return {Kind::full, 0.5}; }
  static Averaging tail(double fraction = 0.5);
  static Averaging last_iterate() { return {Kind::last_iterate, 0.5}; }

  std::string name() const;  // "full", "tail", "last"
  friend bool operator==(const Averaging&, const Averaging&) = default;
};

// Parses "full", "tail", "last" (tail fraction 0.5).
Averaging parse_averaging(const std::string& name);

class SgdConfig {
 public:
  // Rejects non-positive or non-finite stepsizes.
  explicit SgdConfig(double stepsize, Averaging averaging = Averaging::full());

  double stepsize() const noexcept { return stepsize_; }
  const Averaging& averaging() const noexcept { return averaging_; }

  // Empty means w_1 = 0.
  const Vector& initial_point() const noexcept { return initial_point_; }
  SgdConfig& with_initial_point(Vector w1);

  // w_1 resolved to dimension d.
  Vector initial_point_for(std::size_t d) const;

 private:
  double stepsize_;
  Averaging averaging_;
  Vector initial_point_;
};

enum class EstimatorKind { dsgd, drr, dols };
std::string to_string(EstimatorKind kind);

struct EstimatorOutput {
  Vector coefficients;  // eigenbasis
  EstimatorKind kind = EstimatorKind::dsgd;
  std::optional<Averaging> averaging;  // set for dsgd
  std::size_t node_count = 1;
  std::optional<Vector> last_iterate;  // set for dsgd: mean of local w_{N+1}
  std::size_t discarded = 0;           // samples dropped by the split
  std::vector<std::string> warnings;
};

// One constant-stepsize pass over the shard in order:
// w_{t+1} = w_t - gamma (<w_t, x_t> - y_t) x_t. Throws DivergenceError when
// an iterate stops being finite.
EstimatorOutput run_local_sgd(const Dataset& shard, const SgdConfig& config);

// Uniform average of run_local_sgd over split_dataset(data, M).
EstimatorOutput run_dsgd(const Dataset& data, std::size_t node_count, const SgdConfig& config);

// Local error paths on one shard. Both return iterates 1..N+1, where
// iterate t+1 is produced from sample t exactly like the SGD iterate:
//   b_1 = initial_error,  b_{t+1} = (I - gamma x_t x_t^T) b_t
//   v_1 = 0,              v_{t+1} = (I - gamma x_t x_t^T) v_t + gamma eps_t x_t
std::vector<Vector> local_bias_trajectory(const Dataset& shard, const Vector& initial_error,
                                          double stepsize);
std::vector<Vector> local_variance_trajectory(const Dataset& shard, const Vector& noise,
                                              double stepsize);

// Aggregated centered estimate split into its bias and variance parts, all
// driven by the same samples: estimate - w* == bias + variance.
struct DsgdDecomposition {
  EstimatorOutput estimate;
  Vector bias;      // node-and-iterate averaged b
  Vector variance;  // node-and-iterate averaged v
};

DsgdDecomposition decompose_dsgd(const Dataset& data, const ProblemInstance& instance,
                                 std::size_t node_count, const SgdConfig& config);

// Per replicate r, draws sample_dataset(instance, n, replicate_seed(seed, r))
// and returns the aggregated bias (resp. variance) vector. Replicate r sees
// the same data as replicate r of mc_excess_risk with the same seed.
std::vector<Vector> simulate_bias_paths(const ProblemInstance& instance, std::size_t n,
                                        std::size_t node_count, const SgdConfig& config,
                                        std::size_t replicates, Seed seed, unsigned threads = 1);
std::vector<Vector> simulate_variance_paths(const ProblemInstance& instance, std::size_t n,
                                            std::size_t node_count, const SgdConfig& config,
                                            std::size_t replicates, Seed seed,
                                            unsigned threads = 1);

}  // namespace dregsim
