#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dregsim/rng.hpp"

namespace dregsim {

using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ExplicitSpectrum {};
struct PolynomialSpectrum {
  double r;
};
// Two-level model tied to a per-node sample count N: d = floor(N^q) and
// floor(N^r) leading eigenvalues.
struct SpikedSpectrum {
  double q;
  double r;
  std::size_t node_sample_count;
};
using SpectrumKind = std::variant<ExplicitSpectrum, PolynomialSpectrum, SpikedSpectrum>;

// Eigenvalues of the second-moment operator H, ordered nonincreasing and
// strictly positive. Everything downstream works in the eigenbasis, so this
// is the whole of H.
class Spectrum {
 public:
  // Validates positivity and ordering.
  explicit Spectrum(std::vector<double> eigenvalues, SpectrumKind kind = ExplicitSpectrum{});

  const Vector& eigenvalues() const noexcept { return eigenvalues_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(eigenvalues_.size()); }
  const SpectrumKind& kind() const noexcept { return kind_; }
  double trace() const noexcept { return trace_; }

  // 1-based lambda_j; 0 for j = 0 or j > d.
  double eigenvalue(std::size_t j) const noexcept;
  // Sum over j > k of lambda_j (resp. lambda_j^2), truncated at d.
  double tail_sum(std::size_t k) const noexcept;
  double tail_sum_squares(std::size_t k) const noexcept;

 private:
  Vector eigenvalues_;
  SpectrumKind kind_;
  double trace_ = 0.0;
  std::vector<double> tail_;     // tail_[k] = sum_{j>k} lambda_j
  std::vector<double> tail_sq_;  // tail_sq_[k] = sum_{j>k} lambda_j^2
};

// lambda_j = j^{-(1+r)}, j = 1..d.
Spectrum build_polynomial_spectrum(long long d, double r);

// d = floor(N^q), d~ = floor(N^r); first d~ eigenvalues 1/d~, the rest
// 1/(d - d~). Each block sums to one, so the trace is 2.
Spectrum build_spiked_spectrum(long long node_sample_count, double q, double r);

struct ExplicitTarget {};
struct PowerDecayTarget {
  double alpha;  // w*_j = j^{-alpha}
};
using TargetKind = std::variant<ExplicitTarget, PowerDecayTarget>;

enum class CovariateLaw { gaussian, rademacher };

// Fully specifies the data distribution: x has independent coordinates
// sqrt(lambda_j) z_j, y = <w*, x> + noise_std * N(0, 1).
struct ProblemInstance {
  Spectrum spectrum;
  Vector target;  // w* in the eigenbasis
  double noise_std = 0.0;
  TargetKind target_kind = ExplicitTarget{};
  CovariateLaw law = CovariateLaw::gaussian;

  std::size_t dim() const noexcept { return spectrum.dim(); }
  double target_norm_sq() const noexcept { return target.squaredNorm(); }
};

ProblemInstance make_instance(Spectrum spectrum, Vector target, double noise_std,
                              CovariateLaw law = CovariateLaw::gaussian);
ProblemInstance make_power_instance(Spectrum spectrum, double alpha, double noise_std,
                                    CovariateLaw law = CovariateLaw::gaussian);

struct SyntheticSource {
  Seed seed;
};
struct FileSource {
  std::string path;
};
using DataSource = std::variant<SyntheticSource, FileSource>;

struct Dataset {
  RowMatrix covariates;  // n x d, rows in the eigenbasis
  Vector responses;      // length n
  DataSource source = SyntheticSource{0};

  Dataset() = default;
  Dataset(RowMatrix x, Vector y, DataSource src);

  std::size_t size() const noexcept { return static_cast<std::size_t>(responses.size()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(covariates.cols()); }
};

// n independent draws from the instance. Deterministic in `seed`; covariate
// and noise draws do not depend on the target or noise level, so instances
// that differ only in w* or noise_std share their random numbers.
Dataset sample_dataset(const ProblemInstance& instance, std::size_t n, Seed seed);

struct SplitResult {
  std::vector<Dataset> shards;
  std::size_t discarded = 0;  // trailing n mod M samples
};

// M in-order shards of floor(n / M) samples each.
SplitResult split_dataset(const Dataset& data, std::size_t node_count);

}  // namespace dregsim
