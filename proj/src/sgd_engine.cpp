#include "dregsim/sgd_engine.hpp"

#include <cmath>
#include <sstream>

#include "dregsim/errors.hpp"
#include "dregsim/parallel.hpp"

namespace dregsim {

namespace {

// Fourth-moment constant used for the advisory stepsize check (Gaussian).
constexpr double kAdvisoryTau = 3.0;

using ConstRows = Eigen::Ref<const RowMatrix>;

// 0-based position of the first averaged iterate among w_1..w_N.
std::size_t window_start(std::size_t n, const Averaging& avg) {
  if (avg.kind != Averaging::Kind::tail) return 0;
  return static_cast<std::size_t>(std::floor(avg.tail_fraction * static_cast<double>(n)));
}

struct PassResult {
  Vector average;
  Vector last;
};

// z_{t+1} = z_t - gamma (<z_t, x_t> - e_t) x_t over all rows of x; e_t = 0
// when `offsets` is null. SGD, bias and variance paths are all this
// recursion with different offsets and starting points.
PassResult averaged_recursion(const ConstRows& x, const double* offsets, Vector z, double gamma,
                              const Averaging& avg) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n == 0) throw InvalidArgument("sgd: empty shard");
  if (static_cast<Eigen::Index>(z.size()) != x.cols())
    throw InvalidArgument("sgd: initial point dimension differs from data dimension");
  const std::size_t start = window_start(n, avg);
  const bool accumulate = avg.kind != Averaging::Kind::last_iterate;

  // Offsets from z_1 are summed instead of the iterates, so a recursion
  // that never moves averages back to z_1 bit for bit.
  const Vector origin = z;
  Vector sum = Vector::Zero(z.size());
  for (std::size_t t = 0; t < n; ++t) {
    const auto row = x.row(static_cast<Eigen::Index>(t));
    if (accumulate && t >= start) sum += z - origin;
    const double residual = row.dot(z) - (offsets ? offsets[t] : 0.0);
    if (!std::isfinite(residual)) {
      std::ostringstream os;
      os << "sgd diverged at step " << t + 1 << " (stepsize " << gamma << ")";
      throw DivergenceError(t + 1, os.str());
    }
    z.noalias() -= (gamma * residual) * row.transpose();
  }
  if (!z.allFinite()) {
    std::ostringstream os;
    os << "sgd diverged at step " << n << " (stepsize " << gamma << ")";
    throw DivergenceError(n, os.str());
  }

  PassResult out;
  if (accumulate) {
    out.average = origin + sum / static_cast<double>(n - start);
    if (!out.average.allFinite()) throw DivergenceError(n, "sgd: iterate average overflowed");
  } else {
    out.average = z;
  }
  out.last = std::move(z);
  return out;
}

std::vector<Vector> recursion_trajectory(const ConstRows& x, const double* offsets, Vector z,
                                         double gamma) {
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<Vector> path;
  path.reserve(n + 1);
  path.push_back(z);
  for (std::size_t t = 0; t < n; ++t) {
    const auto row = x.row(static_cast<Eigen::Index>(t));
    const double residual = row.dot(z) - (offsets ? offsets[t] : 0.0);
    z.noalias() -= (gamma * residual) * row.transpose();
    path.push_back(z);
  }
  return path;
}

// Row range of node m after an in-order split.
struct ShardRange {
  Eigen::Index start;
  Eigen::Index rows;
};

ShardRange shard_range(std::size_t n, std::size_t node_count, std::size_t m) {
  const std::size_t per = n / node_count;
  return {static_cast<Eigen::Index>(m * per), static_cast<Eigen::Index>(per)};
}

void check_split(std::size_t n, std::size_t node_count) {
  if (node_count < 1) throw InvalidArgument("dsgd: M must be >= 1");
  if (node_count > n) {
    std::ostringstream os;
    os << "dsgd: M = " << node_count << " exceeds n = " << n;
    throw InvalidArgument(os.str());
  }
}

// eps_t = y_t - <x_t, w*>, evaluated row by row with the same expression
// sample_dataset uses, so noiseless data gives exact zeros.
Vector residual_noise(const Dataset& data, const Vector& target) {
  Vector eps(static_cast<Eigen::Index>(data.size()));
  for (Eigen::Index i = 0; i < eps.size(); ++i)
    eps[i] = data.responses[i] - data.covariates.row(i).dot(target);
  return eps;
}

}  // namespace

Averaging Averaging::tail(double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw InvalidArgument("averaging: tail fraction must lie in (0, 1)");
  return {Kind::tail, fraction};
}

std::string Averaging::name() const {
  switch (kind) {
    case Kind::full: return "full";
    case Kind::tail: return "tail";
    case Kind::last_iterate: return "last";
  }
  return "full";
}

Averaging parse_averaging(const std::string& name) {
  if (name == "full") return Averaging::full();
  if (name == "tail") return Averaging::tail();
  if (name == "last" || name == "last_iterate") return Averaging::last_iterate();
  throw InvalidArgument("unknown averaging mode '" + name + "' (expected full, tail or last)");
}

SgdConfig::SgdConfig(double stepsize, Averaging averaging)
    : stepsize_(stepsize), averaging_(averaging) {
  if (!(stepsize > 0.0) || !std::isfinite(stepsize))
    throw InvalidArgument("sgd config: stepsize must be a positive finite number");
  if (averaging.kind == Averaging::Kind::tail &&
      !(averaging.tail_fraction > 0.0 && averaging.tail_fraction < 1.0))
    throw InvalidArgument("sgd config: tail fraction must lie in (0, 1)");
}

SgdConfig& SgdConfig::with_initial_point(Vector w1) {
  initial_point_ = std::move(w1);
  return *this;
}

Vector SgdConfig::initial_point_for(std::size_t d) const {
  if (initial_point_.size() == 0) return Vector::Zero(static_cast<Eigen::Index>(d));
  if (static_cast<std::size_t>(initial_point_.size()) != d)
    throw InvalidArgument("sgd config: initial point dimension differs from data dimension");
  return initial_point_;
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::dsgd: return "dsgd";
    case EstimatorKind::drr: return "drr";
    case EstimatorKind::dols: return "dols";
  }
  return "dsgd";
}

EstimatorOutput run_local_sgd(const Dataset& shard, const SgdConfig& config) {
  if (shard.size() == 0) throw InvalidArgument("run_local_sgd: empty shard");
  auto pass = averaged_recursion(shard.covariates, shard.responses.data(),
                                 config.initial_point_for(shard.dim()), config.stepsize(),
                                 config.averaging());
  EstimatorOutput out;
  out.coefficients = std::move(pass.average);
  out.kind = EstimatorKind::dsgd;
  out.averaging = config.averaging();
  out.node_count = 1;
  out.last_iterate = std::move(pass.last);
  return out;
}

EstimatorOutput run_dsgd(const Dataset& data, std::size_t node_count, const SgdConfig& config) {
  check_split(data.size(), node_count);
  const std::size_t d = data.dim();
  const Vector w1 = config.initial_point_for(d);

  Vector avg_sum = Vector::Zero(static_cast<Eigen::Index>(d));
  Vector last_sum = Vector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t m = 0; m < node_count; ++m) {
    const auto range = shard_range(data.size(), node_count, m);
    auto pass = averaged_recursion(data.covariates.middleRows(range.start, range.rows),
                                   data.responses.data() + range.start, w1, config.stepsize(),
                                   config.averaging());
    avg_sum += pass.average;
    last_sum += pass.last;
  }

  EstimatorOutput out;
  out.coefficients = avg_sum / static_cast<double>(node_count);
  out.kind = EstimatorKind::dsgd;
  out.averaging = config.averaging();
  out.node_count = node_count;
  out.last_iterate = last_sum / static_cast<double>(node_count);
  out.discarded = data.size() - (data.size() / node_count) * node_count;

  const double trace_estimate = data.covariates.rowwise().squaredNorm().mean();
  if (config.stepsize() * kAdvisoryTau * trace_estimate >= 1.0) {
    std::ostringstream os;
    os << "stepsize " << config.stepsize() << " >= 1/(tau * trace) with tau = " << kAdvisoryTau
       << " and empirical trace " << trace_estimate;
    out.warnings.push_back(os.str());
  }
  if (out.discarded > 0) {
    std::ostringstream os;
    os << out.discarded << " trailing samples discarded by the split";
    out.warnings.push_back(os.str());
  }
  return out;
}

std::vector<Vector> local_bias_trajectory(const Dataset& shard, const Vector& initial_error,
                                          double stepsize) {
  if (static_cast<std::size_t>(initial_error.size()) != shard.dim())
    throw InvalidArgument("bias trajectory: dimension mismatch");
  return recursion_trajectory(shard.covariates, nullptr, initial_error, stepsize);
}

std::vector<Vector> local_variance_trajectory(const Dataset& shard, const Vector& noise,
                                              double stepsize) {
  if (static_cast<std::size_t>(noise.size()) != shard.size())
    throw InvalidArgument("variance trajectory: noise length differs from shard size");
  return recursion_trajectory(shard.covariates, noise.data(),
                              Vector::Zero(static_cast<Eigen::Index>(shard.dim())), stepsize);
}

DsgdDecomposition decompose_dsgd(const Dataset& data, const ProblemInstance& instance,
                                 std::size_t node_count, const SgdConfig& config) {
  if (data.dim() != instance.dim()) throw InvalidArgument("decompose_dsgd: dimension mismatch");
  check_split(data.size(), node_count);
  const auto d = static_cast<Eigen::Index>(data.dim());
  const Vector b1 = config.initial_point_for(data.dim()) - instance.target;
  const Vector noise = residual_noise(data, instance.target);

  Vector bias_sum = Vector::Zero(d);
  Vector var_sum = Vector::Zero(d);
  for (std::size_t m = 0; m < node_count; ++m) {
    const auto range = shard_range(data.size(), node_count, m);
    const auto rows = data.covariates.middleRows(range.start, range.rows);
    bias_sum += averaged_recursion(rows, nullptr, b1, config.stepsize(), config.averaging()).average;
    var_sum += averaged_recursion(rows, noise.data() + range.start, Vector::Zero(d),
                                  config.stepsize(), config.averaging())
                   .average;
  }
  DsgdDecomposition out{run_dsgd(data, node_count, config), bias_sum / static_cast<double>(node_count),
                        var_sum / static_cast<double>(node_count)};
  return out;
}

namespace {

template <class PerReplicate>
std::vector<Vector> simulate_paths(const ProblemInstance& instance, std::size_t n,
                                   std::size_t node_count, std::size_t replicates, Seed seed,
                                   unsigned threads, PerReplicate&& per_replicate) {
  if (replicates < 1) throw InvalidArgument("path simulation: replicates must be >= 1");
  check_split(n, node_count);
  std::vector<Vector> out(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    const Dataset data = sample_dataset(instance, n, replicate_seed(seed, r));
    out[r] = per_replicate(data);
  });
  return out;
}

}  // namespace

std::vector<Vector> simulate_bias_paths(const ProblemInstance& instance, std::size_t n,
                                        std::size_t node_count, const SgdConfig& config,
                                        std::size_t replicates, Seed seed, unsigned threads) {
  const Vector b1 = config.initial_point_for(instance.dim()) - instance.target;
  return simulate_paths(instance, n, node_count, replicates, seed, threads, [&](const Dataset& data) {
    Vector sum = Vector::Zero(b1.size());
    for (std::size_t m = 0; m < node_count; ++m) {
      const auto range = shard_range(n, node_count, m);
      sum += averaged_recursion(data.covariates.middleRows(range.start, range.rows), nullptr, b1,
                                config.stepsize(), config.averaging())
                 .average;
    }
    return Vector(sum / static_cast<double>(node_count));
  });
}

std::vector<Vector> simulate_variance_paths(const ProblemInstance& instance, std::size_t n,
                                            std::size_t node_count, const SgdConfig& config,
                                            std::size_t replicates, Seed seed, unsigned threads) {
  const auto d = static_cast<Eigen::Index>(instance.dim());
  return simulate_paths(instance, n, node_count, replicates, seed, threads, [&](const Dataset& data) {
    const Vector noise = residual_noise(data, instance.target);
    Vector sum = Vector::Zero(d);
    for (std::size_t m = 0; m < node_count; ++m) {
      const auto range = shard_range(n, node_count, m);
      sum += averaged_recursion(data.covariates.middleRows(range.start, range.rows),
                                noise.data() + range.start, Vector::Zero(d), config.stepsize(),
                                config.averaging())
                 .average;
    }
    return Vector(sum / static_cast<double>(node_count));
  });
}

}  // namespace dregsim
