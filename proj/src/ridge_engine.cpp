#include "dregsim/ridge_engine.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "dregsim/errors.hpp"

namespace dregsim {

namespace {

using ConstRows = Eigen::Ref<const RowMatrix>;
using ConstVec = Eigen::Ref<const Vector>;

Eigen::Index numerical_rank(const ConstRows& x) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x);
  svd.setThreshold(kRankTolerance);
  return svd.rank();
}

Vector solve_spd(const Eigen::MatrixXd& a, const Vector& b) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) return llt.solve(b);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  return ldlt.solve(b);
}

Vector ridge_block(const ConstRows& x, const ConstVec& y, const RidgeConfig& config) {
  const auto n = x.rows();
  const auto d = x.cols();
  if (n == 0) throw InvalidArgument("local_ridge: empty shard");
  RidgeSolver solver = config.solver();
  if (solver == RidgeSolver::automatic) solver = n < d ? RidgeSolver::dual : RidgeSolver::primal;
  const double lambda = config.lambda();

  if (lambda == 0.0) {
    const Eigen::Index needed = solver == RidgeSolver::dual ? n : d;
    const Eigen::Index rank = numerical_rank(x);
    if (rank < needed) {
      std::ostringstream os;
      os << "local_ridge: singular " << (solver == RidgeSolver::dual ? "n x n" : "d x d")
         << " Gram matrix at lambda = 0 (rank " << rank << " < " << needed
         << "); use dols for the minimum-norm solution";
      throw SingularGramError(os.str());
    }
  }

  if (solver == RidgeSolver::dual) {
    Eigen::MatrixXd gram = x * x.transpose();
    gram.diagonal().array() += lambda;
    const Vector alpha = solve_spd(gram, y);
    return x.transpose() * alpha;
  }
  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += lambda;
  return solve_spd(gram, x.transpose() * y);
}

Vector dols_block(const ConstRows& x, const ConstVec& y) {
  if (x.rows() == 0) throw InvalidArgument("dols: empty shard");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankTolerance);
  return svd.solve(Vector(y));
}

void check_split(std::size_t n, std::size_t node_count) {
  if (node_count < 1) throw InvalidArgument("distributed estimator: M must be >= 1");
  if (node_count > n) {
    std::ostringstream os;
    os << "distributed estimator: M = " << node_count << " exceeds n = " << n;
    throw InvalidArgument(os.str());
  }
}

template <class Local>
EstimatorOutput average_over_shards(const Dataset& data, std::size_t node_count,
                                    EstimatorKind kind, Local&& local) {
  check_split(data.size(), node_count);
  const std::size_t per = data.size() / node_count;
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(data.dim()));
  for (std::size_t m = 0; m < node_count; ++m) {
    const auto start = static_cast<Eigen::Index>(m * per);
    const auto rows = static_cast<Eigen::Index>(per);
    sum += local(data.covariates.middleRows(start, rows), data.responses.segment(start, rows));
  }
  EstimatorOutput out;
  out.coefficients = sum / static_cast<double>(node_count);
  out.kind = kind;
  out.node_count = node_count;
  out.discarded = data.size() - per * node_count;
  if (out.discarded > 0) {
    std::ostringstream os;
    os << out.discarded << " trailing samples discarded by the split";
    out.warnings.push_back(os.str());
  }
  return out;
}

}  // namespace

RidgeConfig::RidgeConfig(double lambda, RidgeSolver solver) : lambda_(lambda), solver_(solver) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("ridge config: lambda must be a nonnegative finite number");
}

EstimatorOutput local_ridge(const Dataset& shard, const RidgeConfig& config) {
  EstimatorOutput out;
  out.coefficients = ridge_block(shard.covariates, shard.responses, config);
  out.kind = EstimatorKind::drr;
  out.node_count = 1;
  return out;
}

EstimatorOutput run_drr(const Dataset& data, std::size_t node_count, const RidgeConfig& config) {
  return average_over_shards(data, node_count, EstimatorKind::drr,
                             [&](const ConstRows& x, const ConstVec& y) {
                               return ridge_block(x, y, config);
                             });
}

EstimatorOutput dols(const Dataset& shard) {
  EstimatorOutput out;
  out.coefficients = dols_block(shard.covariates, shard.responses);
  out.kind = EstimatorKind::dols;
  out.node_count = 1;
  return out;
}

EstimatorOutput run_dols(const Dataset& data, std::size_t node_count) {
  return average_over_shards(data, node_count, EstimatorKind::dols,
                             [](const ConstRows& x, const ConstVec& y) { return dols_block(x, y); });
}

RidgePath::RidgePath(const Eigen::Ref<const RowMatrix>& x, const Eigen::Ref<const Vector>& y)
    : dual_(x.rows() < x.cols()) {
  if (x.rows() == 0) throw InvalidArgument("ridge path: empty shard");
  if (dual_) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x * x.transpose());
    spectrum_ = eig.eigenvalues().cwiseMax(0.0);
    basis_ = x.transpose() * eig.eigenvectors();
    projected_ = eig.eigenvectors().transpose() * y;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x.transpose() * x);
    spectrum_ = eig.eigenvalues().cwiseMax(0.0);
    basis_ = eig.eigenvectors();
    projected_ = eig.eigenvectors().transpose() * (x.transpose() * y);
  }
}

Vector RidgePath::solve(double lambda) const {
  if (!(lambda > 0.0)) throw InvalidArgument("ridge path: lambda must be > 0");
  const Vector scaled = projected_.array() / (spectrum_.array() + lambda);
  return basis_ * scaled;
}

}  // namespace dregsim
