#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dregsim/errors.hpp"
#include "dregsim/risk_eval.hpp"
#include "dregsim/stats.hpp"
#include "oracles/sgd_oracle.hpp"
#include "support.hpp"

namespace {

using namespace dregsim;

TEST(ExcessRisk, ZeroAtTarget) {
  auto inst = make_power_instance(build_polynomial_spectrum(5, 1.0), 1.0, 1.0);
  EXPECT_EQ(excess_risk_exact(inst.target, inst), 0.0);
}

TEST(ExcessRisk, ScalarCase) {
  auto inst = make_instance(Spectrum({1.0}), Vector::Constant(1, 0.0), 1.0);
  EXPECT_NEAR(excess_risk_exact(Vector::Constant(1, 0.5), inst), 0.125, 1e-9);
}

TEST(ExcessRisk, WeightedSum) {
  auto inst = make_instance(Spectrum({1.0, 0.25}), Vector::Zero(2), 1.0);
  Vector w(2);
  w << 1.0, 2.0;
  EXPECT_NEAR(excess_risk_exact(w, inst), 1.0, 1e-9);
  EXPECT_THROW(excess_risk_exact(Vector::Zero(3), inst), InvalidArgument);
}

TEST(McRisk, NoiselessDolsRecoversTarget) {
  auto inst = make_power_instance(build_polynomial_spectrum(5, 1.0), 1.0, 0.0);
  const auto rep = mc_excess_risk(inst, 60, 2, DolsSpec{}, 4, 3);
  EXPECT_LE(std::abs(rep.excess_risk_mean), 1e-10);
}

TEST(McRisk, IdenticalReplicatesHaveZeroStderr) {
  auto inst = make_power_instance(build_polynomial_spectrum(5, 1.0), 1.0, 1.0);
  McOptions opts;
  opts.identical_replicates = true;
  const auto rep = mc_excess_risk(inst, 40, 2, DsgdSpec{SgdConfig(0.1)}, 2, 3, opts);
  EXPECT_EQ(rep.excess_risk_stderr, 0.0);
  EXPECT_GT(rep.excess_risk_mean, 0.0);
}

TEST(McRisk, AgreesWithStraightLineReimplementation) {
  auto inst = make_instance(Spectrum({1.0}), Vector::Constant(1, 1.0), 1.0);
  const std::size_t reps = 10000, n = 100;
  const auto rep = mc_excess_risk(inst, n, 1, DsgdSpec{SgdConfig(0.1)}, reps, 31);

  // Independent straight-line simulation with its own generator.
  std::mt19937_64 rng(123456);
  std::normal_distribution<double> z;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    double w = 0.0, avg = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      avg += w;
      const double x = z(rng), y = x + z(rng);
      w -= 0.1 * (w * x - y) * x;
    }
    avg /= double(n);
    const double risk = 0.5 * (avg - 1.0) * (avg - 1.0);
    sum += risk;
    sum_sq += risk * risk;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum_sq / reps - mean * mean) / (reps - 1));
  EXPECT_LE(std::abs(rep.excess_risk_mean - mean), 3.0 * std::hypot(se, rep.excess_risk_stderr));
}

TEST(McRisk, SingleNodeMatchesSingleMachineRunBitwise) {
  auto inst = make_power_instance(build_polynomial_spectrum(6, 1.0), 1.0, 1.0);
  const SgdConfig cfg(0.1);
  const auto rep = mc_excess_risk(inst, 50, 1, DsgdSpec{cfg}, 3, 17);
  std::vector<double> risks;
  for (std::size_t r = 0; r < 3; ++r)
    risks.push_back(excess_risk_exact(run_local_sgd(sample_dataset(inst, 50, replicate_seed(17, r)), cfg), inst));
  const auto s = summarize(risks);
  EXPECT_EQ(rep.excess_risk_mean, s.mean);
  EXPECT_EQ(rep.excess_risk_stderr, s.std_error);
}

TEST(McRisk, InvariantToWorkerCount) {
  auto inst = make_power_instance(build_polynomial_spectrum(8, 1.0), 1.0, 1.0);
  const std::vector<EstimatorSpec> specs{DsgdSpec{SgdConfig(0.1)}, DrrSpec{RidgeConfig(0.1)},
                                         DrrSpec{RidgeConfig(1.0)}, DolsSpec{}};
  McOptions one, many;
  one.threads = 1;
  many.threads = 6;
  const auto a = mc_excess_risk_grid(inst, 40, 2, specs, 13, 5, one);
  const auto b = mc_excess_risk_grid(inst, 40, 2, specs, 13, 5, many);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    EXPECT_EQ(a[k].excess_risk_mean, b[k].excess_risk_mean);
    EXPECT_EQ(a[k].excess_risk_stderr, b[k].excess_risk_stderr);
  }
}

TEST(McRisk, GridMatchesSingleSpecRuns) {
  auto inst = make_power_instance(build_polynomial_spectrum(8, 1.0), 1.0, 1.0);
  const std::vector<EstimatorSpec> specs{DrrSpec{RidgeConfig(0.01)}, DrrSpec{RidgeConfig(3.0)}};
  const auto grid = mc_excess_risk_grid(inst, 40, 2, specs, 6, 5);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto single = mc_excess_risk(inst, 40, 2, specs[k], 6, 5);
    EXPECT_NEAR(grid[k].excess_risk_mean, single.excess_risk_mean, 1e-10 * single.excess_risk_mean);
  }
}

TEST(McRisk, DivergenceCountedNotThrownInGrid) {
  auto inst = make_power_instance(build_polynomial_spectrum(3, 1.0), 1.0, 1.0);
  const std::vector<EstimatorSpec> specs{DsgdSpec{SgdConfig(50.0)}};
  const auto rep = mc_excess_risk_grid(inst, 2000, 1, specs, 4, 1).front();
  EXPECT_TRUE(rep.aborted);
  EXPECT_EQ(rep.diverged, 4u);
  EXPECT_THROW(mc_excess_risk(inst, 2000, 1, specs.front(), 4, 1), DivergenceError);
  EXPECT_THROW(mc_excess_risk(inst, 10, 1, specs.front(), 1, 1), InvalidArgument);
}

TEST(BiasVariance, NoiselessVarianceIsExactlyZero) {
  auto inst = make_power_instance(build_polynomial_spectrum(6, 1.0), 1.0, 0.0);
  const auto rep = mc_bias_variance(inst, 40, 2, SgdConfig(0.1), 5, 2);
  EXPECT_EQ(*rep.variance_mc, 0.0);
}

TEST(BiasVariance, StartingAtTargetBiasIsExactlyZero) {
  auto inst = make_power_instance(build_polynomial_spectrum(6, 1.0), 1.0, 1.0);
  auto cfg = SgdConfig(0.1);
  cfg.with_initial_point(inst.target);
  const auto rep = mc_bias_variance(inst, 40, 2, cfg, 5, 2);
  EXPECT_EQ(*rep.bias_mc, 0.0);
}

TEST(BiasVariance, ScalarBiasMatchesMomentRecursion) {
  auto inst = make_instance(Spectrum({1.0}), Vector::Constant(1, 1.0), 1.0);
  const auto rep = mc_bias_variance(inst, 20, 1, SgdConfig(0.1), 20000, 8);
  const double expected = oracle::bias_1d_full_average(1.0, 0.1, -1.0, 20);
  EXPECT_LE(std::abs(*rep.bias_mc - expected), 3.0 * *rep.bias_stderr);
}

TEST(BiasVariance, DecompositionHoldsPerReplicateAndOnAverage) {
  auto inst = make_power_instance(build_polynomial_spectrum(10, 1.0), 1.0, 1.0);
  const auto rep = mc_bias_variance(inst, 200, 4, SgdConfig(0.25 / inst.spectrum.trace()), 400, 6);
  EXPECT_LE(*rep.identity_residual, 1e-10);
  const double combined = std::sqrt(rep.excess_risk_stderr * rep.excess_risk_stderr +
                                    *rep.bias_stderr * *rep.bias_stderr +
                                    *rep.variance_stderr * *rep.variance_stderr);
  EXPECT_LE(std::abs(rep.excess_risk_mean - *rep.bias_mc - *rep.variance_mc), 3.0 * combined);
  EXPECT_LE(std::abs(*rep.cross_mc), 3.0 * *rep.cross_stderr);
}

}  // namespace
