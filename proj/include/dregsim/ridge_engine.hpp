#pragma once

#include <cstddef>

#include "dregsim/sgd_engine.hpp"
#include "dregsim/spectrum_model.hpp"

namespace dregsim {

enum class RidgeSolver {
  automatic,  // dual when n_local < d, primal otherwise
  dual,       // (X X^T + lambda I) alpha = Y, w = X^T alpha
  primal,     // (X^T X + lambda I) w = X^T Y
};

class RidgeConfig {
 public:
  explicit RidgeConfig(double lambda, RidgeSolver solver = RidgeSolver::automatic);
  double lambda() const noexcept { return lambda_; }
  RidgeSolver solver() const noexcept { return solver_; }

 private:
  double lambda_;
  RidgeSolver solver_;
};

// Relative singular-value cutoff for rank decisions and the pseudoinverse.
inline constexpr double kRankTolerance = 1e-10;

// Closed-form local ridge. At lambda = 0 the system being solved must be
// nonsingular; otherwise SingularGramError is thrown (use dols()).
EstimatorOutput local_ridge(const Dataset& shard, const RidgeConfig& config);

// Uniform average of local_ridge over split_dataset(data, M).
EstimatorOutput run_drr(const Dataset& data, std::size_t node_count, const RidgeConfig& config);

// Minimum-norm least squares X^+ Y. Interpolates when rank(X) = n.
EstimatorOutput dols(const Dataset& shard);

// Uniform average of dols over split_dataset(data, M).
EstimatorOutput run_dols(const Dataset& data, std::size_t node_count);

// Factorizes one shard once so ridge solutions for many lambda > 0 cost
// O(n d) each. Eigendecomposes whichever Gram matrix is smaller.
class RidgePath {
 public:
  RidgePath(const Eigen::Ref<const RowMatrix>& x, const Eigen::Ref<const Vector>& y);
  explicit RidgePath(const Dataset& shard) : RidgePath(shard.covariates, shard.responses) {}

  // Requires lambda > 0.
  Vector solve(double lambda) const;

 private:
  bool dual_;
  Vector spectrum_;    // Gram eigenvalues, clamped at zero
  Eigen::MatrixXd basis_;  // dual: X^T U (d x n); primal: V (d x d)
  Vector projected_;   // dual: U^T Y; primal: V^T X^T Y
};

}  // namespace dregsim
