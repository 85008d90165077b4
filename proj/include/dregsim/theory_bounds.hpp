#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dregsim/spectrum_model.hpp"

namespace dregsim {

// Constants the bounds leave as "some constant". Defaults are what every
// report uses unless overridden; they are recorded in each BoundReport.
struct BoundConstants {
  double tau = 3.0;      // fourth-moment upper constant (Gaussian: 3)
  double theta = 1.0;    // fourth-moment lower constant (Gaussian: 1)
  double b = 2.0;        // ridge effective-dimension constant, > 1
  double c = 2.0;        // ridge lower bound / comparison constant, > 1
  double c_prime = 2.0;  // advisory k*_RR <= n / (c' M) check, > 1
  double c_b = 1.0;      // tail-averaged bias constant
  double c_v = 1.0;      // tail-averaged variance constant
  // Noise functional sigma^2. Unset means well-specified: noise_std^2.
  std::optional<double> sigma2;

  void validate() const;  // InvalidArgument on out-of-range values
  double sigma2_for(const ProblemInstance& instance) const;
};

struct BoundTerms {
  double bias = 0.0;
  double variance = 0.0;
  double total = 0.0;
};

struct BoundReport {
  std::size_t k_star = 0;  // k* (SGD bounds) or k*_RR (ridge bound)
  double v_star = 0.0;     // variance functional at k_star
  std::optional<BoundTerms> upper;
  std::optional<BoundTerms> lower;
  BoundConstants constants;
  std::vector<std::string> warnings;
};

// Weighted norms in the eigenbasis, with empty heads/tails equal to zero:
//   head_inverse:  sum_{j<=k} w_j^2 / lambda_j
//   head_identity: sum_{j<=k} w_j^2
//   tail_weighted: sum_{j>k}  lambda_j w_j^2
double head_inverse_norm_sq(const Vector& w, const Spectrum& spectrum, std::size_t k);
double head_identity_norm_sq(const Vector& w, std::size_t k);
double tail_weighted_norm_sq(const Vector& w, const Spectrum& spectrum, std::size_t k);

// Largest k with lambda_k >= M / (gamma n); 0 if none.
std::size_t effective_dim_sgd(const Spectrum& spectrum, std::size_t n, std::size_t node_count,
                              double gamma);

// V_k = k/n + gamma^2 (n / M^2) sum_{j>k} lambda_j^2.
double v_star(const Spectrum& spectrum, std::size_t n, std::size_t node_count, double gamma,
              std::size_t k);

// Full-average DSGD upper bound. Requires gamma tau Tr(H) < 1
// (HypothesisViolated otherwise) and w_1 = 0.
BoundReport dsgd_upper_bound(const ProblemInstance& instance, std::size_t n,
                             std::size_t node_count, double gamma,
                             const BoundConstants& constants = {});

// DSGD lower bound for well-specified Gaussian noise and w_1 = 0; the
// variance part uses the instance's noise_std^2.
BoundReport dsgd_lower_bound(const ProblemInstance& instance, std::size_t n,
                             std::size_t node_count, double gamma,
                             const BoundConstants& constants = {});

// min{k >= 0 : lambda_{k+1} <= M (lambda + sum_{j>k} lambda_j) / (b n)},
// with lambda_{d+1} = 0.
std::size_t effective_dim_rr(const Spectrum& spectrum, std::size_t n, std::size_t node_count,
                             double lambda, double b);

// Distributed ridge lower bound. `lower` is populated; warns when
// k*_RR > n / (c' M).
BoundReport drr_lower_bound(const ProblemInstance& instance, std::size_t n,
                            std::size_t node_count, double lambda,
                            const BoundConstants& constants = {});

// Tail-averaged DSGD upper bound; total = bias + variance. k1, k2 default
// to k*. Requires gamma Tr(H) < 1.
BoundReport tail_dsgd_upper_bound(const ProblemInstance& instance, std::size_t n,
                                  std::size_t node_count, double gamma,
                                  std::optional<std::size_t> k1 = std::nullopt,
                                  std::optional<std::size_t> k2 = std::nullopt,
                                  const BoundConstants& constants = {});

struct SampleComplexityConstants {
  std::size_t k_rr = 0;
  double c_star = 0.0;         // c (1 + ||w*||^2 / sigma^2)
  double c_star_lambda = 0.0;  // lambda + sum_{j>k*_RR} lambda_j
  double lower_ratio = 0.0;    // L
  double upper_ratio = 0.0;    // L'
  bool stepsize_ok = false;    // gamma < min{1/Tr H, 1/(sqrt(c) C* C*_lambda)}
};

// Sample-complexity ratio constants for a given k*_RR.
SampleComplexityConstants sc_constants(const ProblemInstance& instance, double gamma,
                                       double lambda, std::size_t k_rr,
                                       const BoundConstants& constants = {});
// Same, computing k*_RR from (n, M, lambda, b).
SampleComplexityConstants sc_constants(const ProblemInstance& instance, std::size_t n,
                                       std::size_t node_count, double gamma, double lambda,
                                       const BoundConstants& constants = {});

// Whether gamma (lambda + sum_{j>k*_RR} lambda_j) lies in the band.
bool sc_condition_check(const Spectrum& spectrum, std::size_t n, std::size_t node_count,
                        double gamma, double lambda, double b,
                        std::pair<double, double> band = {0.1, 10.0});

struct SpikedRateModel {
  double q;
  double r;
};
struct PolynomialRateModel {
  double r;
};
using RateModel = std::variant<SpikedRateModel, PolynomialRateModel>;

struct RatePrediction {
  double predicted_rate = 0.0;  // without the unspecified leading constant
  double max_nodes = 0.0;       // largest M for which the rate holds
  double exponent = 0.0;        // nu (spiked) or r/(1+r) (polynomial)
  double optimal_slope = 0.0;   // log-log slope in n at the maximal M_n
};

// Rate predictions of the spiked and polynomial corollaries.
// target_norm_sq is R^2 >= ||w*||^2.
RatePrediction corollary_rate(const RateModel& model, std::size_t n, std::size_t node_count,
                              double gamma, double target_norm_sq, double tau = 3.0);

}  // namespace dregsim
