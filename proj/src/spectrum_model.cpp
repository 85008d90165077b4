#include "dregsim/spectrum_model.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "dregsim/errors.hpp"
#include "dregsim/stats.hpp"

namespace dregsim {

Spectrum::Spectrum(std::vector<double> eigenvalues, SpectrumKind kind) : kind_(kind) {
  if (eigenvalues.empty()) throw InvalidArgument("spectrum: no eigenvalues");
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    const double v = eigenvalues[j];
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "spectrum: eigenvalue " << j + 1 << " is not a positive finite number (" << v << ")";
      throw InvalidArgument(os.str());
    }
    if (j > 0 && v > eigenvalues[j - 1]) {
      std::ostringstream os;
      os << "spectrum: eigenvalues must be nonincreasing (lambda_" << j + 1 << " > lambda_" << j
         << ")";
      throw InvalidArgument(os.str());
    }
  }
  eigenvalues_ = Eigen::Map<const Vector>(eigenvalues.data(), static_cast<Eigen::Index>(eigenvalues.size()));
  trace_ = pairwise_sum(eigenvalues);
  const std::size_t d = eigenvalues.size();
  tail_.assign(d + 1, 0.0);
  tail_sq_.assign(d + 1, 0.0);
  for (std::size_t k = d; k-- > 0;) {
    tail_[k] = tail_[k + 1] + eigenvalues[k];
    tail_sq_[k] = tail_sq_[k + 1] + eigenvalues[k] * eigenvalues[k];
  }
}

double Spectrum::eigenvalue(std::size_t j) const noexcept {
  if (j == 0 || j > dim()) return 0.0;
  return eigenvalues_[static_cast<Eigen::Index>(j - 1)];
}

double Spectrum::tail_sum(std::size_t k) const noexcept {
  return k >= dim() ? 0.0 : tail_[k];
}

double Spectrum::tail_sum_squares(std::size_t k) const noexcept {
  return k >= dim() ? 0.0 : tail_sq_[k];
}

Spectrum build_polynomial_spectrum(long long d, double r) {
  if (d < 1) throw InvalidArgument("polynomial spectrum: d must be >= 1");
  if (!(r > 0.0)) throw InvalidArgument("polynomial spectrum: r must be > 0");
  std::vector<double> values(static_cast<std::size_t>(d));
  for (long long j = 1; j <= d; ++j) values[static_cast<std::size_t>(j - 1)] = std::pow(static_cast<double>(j), -(1.0 + r));
  return Spectrum(std::move(values), PolynomialSpectrum{r});
}

Spectrum build_spiked_spectrum(long long node_sample_count, double q, double r) {
  if (node_sample_count < 2) throw InvalidArgument("spiked spectrum: node sample count must be >= 2");
  if (!(q > 1.0)) throw InvalidArgument("spiked spectrum: q must be > 1");
  if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("spiked spectrum: r must lie in (0, 1]");
  const double base = static_cast<double>(node_sample_count);
  const long long d = floor_pow(base, q);
  const long long head = floor_pow(base, r);
  if (head >= d) {
    std::ostringstream os;
    os << "spiked spectrum: degenerate blocks (head " << head << " >= d " << d << ")";
    throw InvalidArgument(os.str());
  }
  std::vector<double> values(static_cast<std::size_t>(d));
  const double high = 1.0 / static_cast<double>(head);
  const double low = 1.0 / static_cast<double>(d - head);
  for (long long j = 0; j < d; ++j) values[static_cast<std::size_t>(j)] = j < head ? high : low;
  return Spectrum(std::move(values),
                  SpikedSpectrum{q, r, static_cast<std::size_t>(node_sample_count)});
}

ProblemInstance make_instance(Spectrum spectrum, Vector target, double noise_std,
                              CovariateLaw law) {
  if (static_cast<std::size_t>(target.size()) != spectrum.dim())
    throw InvalidArgument("instance: target length differs from spectrum dimension");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
    throw InvalidArgument("instance: noise_std must be a nonnegative finite number");
  if (!target.allFinite()) throw InvalidArgument("instance: target has non-finite entries");
  return ProblemInstance{std::move(spectrum), std::move(target), noise_std, ExplicitTarget{}, law};
}

ProblemInstance make_power_instance(Spectrum spectrum, double alpha, double noise_std,
                                    CovariateLaw law) {
  if (!(alpha >= 0.0)) throw InvalidArgument("instance: alpha must be >= 0");
  Vector target(static_cast<Eigen::Index>(spectrum.dim()));
  for (Eigen::Index j = 0; j < target.size(); ++j)
    target[j] = std::pow(static_cast<double>(j + 1), -alpha);
  auto inst = make_instance(std::move(spectrum), std::move(target), noise_std, law);
  inst.target_kind = PowerDecayTarget{alpha};
  return inst;
}

Dataset::Dataset(RowMatrix x, Vector y, DataSource src)
    : covariates(std::move(x)), responses(std::move(y)), source(std::move(src)) {
  if (covariates.rows() != responses.size())
    throw InvalidArgument("dataset: response count differs from covariate rows");
}

Dataset sample_dataset(const ProblemInstance& instance, std::size_t n, Seed seed) {
  if (n < 1) throw InvalidArgument("sample_dataset: n must be >= 1");
  const auto d = static_cast<Eigen::Index>(instance.dim());
  const Vector scale = instance.spectrum.eigenvalues().cwiseSqrt();
  RowMatrix x(static_cast<Eigen::Index>(n), d);
  Vector y(static_cast<Eigen::Index>(n));

  Engine engine = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);

  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    double* row = x.row(i).data();
    if (instance.law == CovariateLaw::gaussian) {
      for (Eigen::Index j = 0; j < d; ++j) row[j] = scale[j] * normal(engine);
    } else {
      for (Eigen::Index j = 0; j < d; ++j) row[j] = coin(engine) ? scale[j] : -scale[j];
    }
    const double eps = normal(engine);
    y[i] = x.row(i).dot(instance.target) + instance.noise_std * eps;
  }
  return Dataset(std::move(x), std::move(y), SyntheticSource{seed});
}

SplitResult split_dataset(const Dataset& data, std::size_t node_count) {
  if (node_count < 1) throw InvalidArgument("split_dataset: M must be >= 1");
  if (node_count > data.size()) {
    std::ostringstream os;
    os << "split_dataset: M = " << node_count << " exceeds n = " << data.size();
    throw InvalidArgument(os.str());
  }
  const std::size_t per = data.size() / node_count;
  SplitResult out;
  out.discarded = data.size() - per * node_count;
  out.shards.reserve(node_count);
  const auto rows = static_cast<Eigen::Index>(per);
  for (std::size_t m = 0; m < node_count; ++m) {
    const auto start = static_cast<Eigen::Index>(m * per);
    out.shards.emplace_back(data.covariates.middleRows(start, rows),
                            data.responses.segment(start, rows), data.source);
  }
  return out;
}

}  // namespace dregsim
