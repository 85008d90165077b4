#include "dregsim/theory_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dregsim/errors.hpp"

namespace dregsim {

namespace {

void check_sizes(std::size_t n, std::size_t node_count, double gamma) {
  if (node_count < 1 || n < node_count) throw InvalidArgument("bounds: need n >= M >= 1");
  if (!(gamma > 0.0)) throw InvalidArgument("bounds: stepsize must be > 0");
}

void check_target(const ProblemInstance& instance) {
  if (static_cast<std::size_t>(instance.target.size()) != instance.dim())
    throw InvalidArgument("bounds: target dimension differs from spectrum");
}

}  // namespace

void BoundConstants::validate() const {
  if (!(tau >= 1.0)) throw InvalidArgument("constants: tau must be >= 1");
  if (!(theta > 0.0)) throw InvalidArgument("constants: theta must be > 0");
  if (!(b > 1.0)) throw InvalidArgument("constants: b must be > 1");
  if (!(c > 1.0)) throw InvalidArgument("constants: c must be > 1");
  if (!(c_prime > 1.0)) throw InvalidArgument("constants: c_prime must be > 1");
  if (!(c_b > 0.0) || !(c_v > 0.0)) throw InvalidArgument("constants: c_b and c_v must be > 0");
  if (sigma2 && !(*sigma2 >= 0.0)) throw InvalidArgument("constants: sigma2 must be >= 0");
}

double BoundConstants::sigma2_for(const ProblemInstance& instance) const {
  return sigma2 ? *sigma2 : instance.noise_std * instance.noise_std;
}

double head_inverse_norm_sq(const Vector& w, const Spectrum& spectrum, std::size_t k) {
  const auto& lambda = spectrum.eigenvalues();
  double s = 0.0;
  const auto head = static_cast<Eigen::Index>(std::min(k, spectrum.dim()));
  for (Eigen::Index j = 0; j < head; ++j) s += w[j] * w[j] / lambda[j];
  return s;
}

double head_identity_norm_sq(const Vector& w, std::size_t k) {
  const auto head = std::min<Eigen::Index>(static_cast<Eigen::Index>(k), w.size());
  return w.head(head).squaredNorm();
}

double tail_weighted_norm_sq(const Vector& w, const Spectrum& spectrum, std::size_t k) {
  const auto& lambda = spectrum.eigenvalues();
  double s = 0.0;
  for (auto j = static_cast<Eigen::Index>(k); j < lambda.size(); ++j) s += lambda[j] * w[j] * w[j];
  return s;
}

std::size_t effective_dim_sgd(const Spectrum& spectrum, std::size_t n, std::size_t node_count,
                              double gamma) {
  check_sizes(n, node_count, gamma);
  const double threshold = static_cast<double>(node_count) / (gamma * static_cast<double>(n));
  const auto& lambda = spectrum.eigenvalues();
  std::size_t k = 0;
  while (k < spectrum.dim() && lambda[static_cast<Eigen::Index>(k)] >= threshold) ++k;
  return k;
}

double v_star(const Spectrum& spectrum, std::size_t n, std::size_t node_count, double gamma,
              std::size_t k) {
  if (k > spectrum.dim()) throw InvalidArgument("v_star: k exceeds the spectrum dimension");
  const double nn = static_cast<double>(n);
  const double m = static_cast<double>(node_count);
  return static_cast<double>(k) / nn + gamma * gamma * (nn / (m * m)) * spectrum.tail_sum_squares(k);
}

BoundReport dsgd_upper_bound(const ProblemInstance& instance, std::size_t n,
                             std::size_t node_count, double gamma,
                             const BoundConstants& constants) {
  constants.validate();
  check_sizes(n, node_count, gamma);
  check_target(instance);
  const Spectrum& spec = instance.spectrum;
  const double slack = 1.0 - gamma * constants.tau * spec.trace();
  if (!(slack > 0.0)) {
    std::ostringstream os;
    os << "dsgd upper bound: gamma * tau * Tr(H) = " << 1.0 - slack << " >= 1";
    throw HypothesisViolated(os.str());
  }
  const double nn = static_cast<double>(n);
  const double m = static_cast<double>(node_count);
  const auto& w = instance.target;

  BoundReport rep;
  rep.constants = constants;
  rep.k_star = effective_dim_sgd(spec, n, node_count, gamma);
  rep.v_star = v_star(spec, n, node_count, gamma, rep.k_star);

  const double tail = tail_weighted_norm_sq(w, spec, rep.k_star);
  const double coupling = 2.0 * constants.tau * m * m *
                          (head_identity_norm_sq(w, rep.k_star) + gamma * (nn / m) * tail) /
                          (gamma * nn * slack);
  BoundTerms up;
  up.bias = (m * m) / (gamma * gamma * nn * nn) * head_inverse_norm_sq(w, spec, rep.k_star) + tail +
            coupling * rep.v_star;
  up.variance = constants.sigma2_for(instance) / slack * rep.v_star;
  up.total = 2.0 * (up.bias + up.variance);
  rep.upper = up;
  return rep;
}

BoundReport dsgd_lower_bound(const ProblemInstance& instance, std::size_t n,
                             std::size_t node_count, double gamma,
                             const BoundConstants& constants) {
  constants.validate();
  check_sizes(n, node_count, gamma);
  check_target(instance);
  const Spectrum& spec = instance.spectrum;
  const double nn = static_cast<double>(n);
  const double m = static_cast<double>(node_count);
  const auto& w = instance.target;

  BoundReport rep;
  rep.constants = constants;
  rep.k_star = effective_dim_sgd(spec, n, node_count, gamma);
  rep.v_star = v_star(spec, n, node_count, gamma, rep.k_star);

  BoundTerms lo;
  lo.bias = m * (m - 1.0) / (100.0 * gamma * gamma * nn * nn) *
            (head_inverse_norm_sq(w, spec, rep.k_star) +
             (gamma * gamma * nn * nn) / (m * m) * tail_weighted_norm_sq(w, spec, rep.k_star));
  lo.variance = instance.noise_std * instance.noise_std / 100.0 * rep.v_star;
  lo.total = lo.bias + lo.variance;
  rep.lower = lo;
  return rep;
}

std::size_t effective_dim_rr(const Spectrum& spectrum, std::size_t n, std::size_t node_count,
                             double lambda, double b) {
  if (node_count < 1 || n < 1) throw InvalidArgument("effective_dim_rr: need n, M >= 1");
  if (!(lambda >= 0.0)) throw InvalidArgument("effective_dim_rr: lambda must be >= 0");
  if (!(b > 1.0)) throw InvalidArgument("effective_dim_rr: b must be > 1");
  const double scale = static_cast<double>(node_count) / (b * static_cast<double>(n));
  for (std::size_t k = 0; k < spectrum.dim(); ++k) {
    if (spectrum.eigenvalue(k + 1) <= scale * (lambda + spectrum.tail_sum(k))) return k;
  }
  return spectrum.dim();  // lambda_{d+1} = 0 always qualifies
}

BoundReport drr_lower_bound(const ProblemInstance& instance, std::size_t n,
                            std::size_t node_count, double lambda,
                            const BoundConstants& constants) {
  constants.validate();
  check_target(instance);
  const Spectrum& spec = instance.spectrum;
  const std::size_t k = effective_dim_rr(spec, n, node_count, lambda, constants.b);
  const double nn = static_cast<double>(n);
  const double m = static_cast<double>(node_count);
  const auto& w = instance.target;
  const double level = lambda + spec.tail_sum(k);
  const double ratio = level > 0.0 ? spec.tail_sum_squares(k) / (level * level) : 0.0;

  BoundReport rep;
  rep.constants = constants;
  rep.k_star = k;
  rep.v_star = static_cast<double>(k) / nn + (nn / (m * m)) * ratio;
  BoundTerms lo;
  lo.bias = tail_weighted_norm_sq(w, spec, k) +
            (m * m * level * level) / (constants.c * nn * nn) * head_inverse_norm_sq(w, spec, k);
  lo.variance = constants.sigma2_for(instance) / constants.c * rep.v_star;
  lo.total = lo.bias + lo.variance;
  rep.lower = lo;
  if (static_cast<double>(k) > nn / (constants.c_prime * m)) {
    std::ostringstream os;
    os << "k*_RR = " << k << " exceeds n / (c' M) = " << nn / (constants.c_prime * m);
    rep.warnings.push_back(os.str());
  }
  return rep;
}

BoundReport tail_dsgd_upper_bound(const ProblemInstance& instance, std::size_t n,
                                  std::size_t node_count, double gamma,
                                  std::optional<std::size_t> k1, std::optional<std::size_t> k2,
                                  const BoundConstants& constants) {
  constants.validate();
  check_sizes(n, node_count, gamma);
  check_target(instance);
  const Spectrum& spec = instance.spectrum;
  if (!(gamma * spec.trace() < 1.0)) {
    std::ostringstream os;
    os << "tail-averaged bound: gamma * Tr(H) = " << gamma * spec.trace() << " >= 1";
    throw HypothesisViolated(os.str());
  }
  const std::size_t kstar = effective_dim_sgd(spec, n, node_count, gamma);
  const std::size_t head = k1.value_or(kstar);
  const std::size_t split = k2.value_or(kstar);
  if (head > spec.dim() || split > spec.dim())
    throw InvalidArgument("tail-averaged bound: k1, k2 must not exceed d");

  const double nn = static_cast<double>(n);
  const double m = static_cast<double>(node_count);
  const auto& w = instance.target;
  const auto& lambda = spec.eigenvalues();

  double damped = 0.0;
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(head); ++j) {
    const double decay = std::exp(-(nn / m) * gamma * lambda[j]);
    damped += decay * decay * w[j] * w[j] / lambda[j];
  }

  BoundReport rep;
  rep.constants = constants;
  rep.k_star = kstar;
  rep.v_star = v_star(spec, n, node_count, gamma, split);
  BoundTerms up;
  up.bias = constants.c_b * m * m / (gamma * gamma * nn * nn) * damped +
            tail_weighted_norm_sq(w, spec, head);
  up.variance = constants.c_v * (1.0 + instance.target_norm_sq()) *
                constants.sigma2_for(instance) * rep.v_star;
  up.total = up.bias + up.variance;
  rep.upper = up;
  return rep;
}

SampleComplexityConstants sc_constants(const ProblemInstance& instance, double gamma,
                                       double lambda, std::size_t k_rr,
                                       const BoundConstants& constants) {
  constants.validate();
  if (!(gamma > 0.0)) throw InvalidArgument("sc_constants: stepsize must be > 0");
  if (!(lambda >= 0.0)) throw InvalidArgument("sc_constants: lambda must be >= 0");
  if (k_rr > instance.dim()) throw InvalidArgument("sc_constants: k*_RR exceeds d");
  const double sigma2 = constants.sigma2_for(instance);
  if (!(sigma2 > 0.0)) throw InvalidArgument("sc_constants: C* undefined for sigma^2 = 0");
  const Spectrum& spec = instance.spectrum;

  SampleComplexityConstants out;
  out.k_rr = k_rr;
  out.c_star = constants.c * (1.0 + instance.target_norm_sq() / sigma2);
  out.c_star_lambda = lambda + spec.tail_sum(k_rr);
  if (!(out.c_star_lambda > 0.0))
    throw InvalidArgument("sc_constants: C*_lambda = 0 (lambda = 0 and empty tail)");
  // Outside the stepsize range 1 - gamma lambda_k can go negative; clamp so
  // L stays defined.
  const double shrink = std::max(0.0, 1.0 - gamma * spec.eigenvalue(k_rr));
  out.lower_ratio = std::max(out.c_star, std::sqrt(constants.c * shrink) / (gamma * out.c_star_lambda));
  out.upper_ratio = 1.0 / (out.c_star * gamma * gamma * out.c_star_lambda * out.c_star_lambda);
  out.stepsize_ok = gamma < std::min(1.0 / spec.trace(),
                                     1.0 / (std::sqrt(constants.c) * out.c_star * out.c_star_lambda));
  return out;
}

SampleComplexityConstants sc_constants(const ProblemInstance& instance, std::size_t n,
                                       std::size_t node_count, double gamma, double lambda,
                                       const BoundConstants& constants) {
  constants.validate();
  const std::size_t k = effective_dim_rr(instance.spectrum, n, node_count, lambda, constants.b);
  return sc_constants(instance, gamma, lambda, k, constants);
}

bool sc_condition_check(const Spectrum& spectrum, std::size_t n, std::size_t node_count,
                        double gamma, double lambda, double b, std::pair<double, double> band) {
  if (!(band.first > 0.0 && band.first <= 1.0 && 1.0 <= band.second))
    throw InvalidArgument("sc_condition_check: band must satisfy 0 < low <= 1 <= high");
  const std::size_t k = effective_dim_rr(spectrum, n, node_count, lambda, b);
  const double value = gamma * (lambda + spectrum.tail_sum(k));
  return band.first <= value && value <= band.second;
}

RatePrediction corollary_rate(const RateModel& model, std::size_t n, std::size_t node_count,
                              double gamma, double target_norm_sq, double tau) {
  check_sizes(n, node_count, gamma);
  if (!(target_norm_sq > 0.0)) throw InvalidArgument("corollary_rate: R^2 must be > 0");
  const double nn = static_cast<double>(n);
  const double m = static_cast<double>(node_count);
  RatePrediction out;
  if (const auto* spiked = std::get_if<SpikedRateModel>(&model)) {
    if (!(spiked->q > 1.0)) throw InvalidArgument("corollary_rate: spiked model needs q > 1");
    if (!(spiked->r > 0.0 && spiked->r <= 1.0))
      throw InvalidArgument("corollary_rate: spiked model needs r in (0, 1]");
    const double slack = 1.0 - 2.0 * gamma * tau;
    if (!(slack > 0.0)) throw InvalidArgument("corollary_rate: spiked model needs 2 gamma tau < 1");
    out.exponent = std::min(1.0 - spiked->r, spiked->q - 1.0);
    out.predicted_rate = 1.0 / (gamma * m) * std::pow(m / nn, out.exponent);
    out.max_nodes = std::sqrt(gamma * slack * nn / target_norm_sq);
    out.optimal_slope = -(out.exponent + 1.0) / 2.0;
  } else {
    const double r = std::get<PolynomialRateModel>(model).r;
    if (!(r > 0.0)) throw InvalidArgument("corollary_rate: polynomial model needs r > 0");
    out.exponent = r / (1.0 + r);
    out.predicted_rate = gamma / m * std::pow(m / nn, out.exponent);
    out.max_nodes = std::pow(gamma / target_norm_sq, (1.0 + r) / (2.0 + r)) *
                    std::pow(gamma * nn, 1.0 / (2.0 + r));
    out.optimal_slope = -(r + 1.0) / (r + 2.0);
  }
  return out;
}

}  // namespace dregsim
