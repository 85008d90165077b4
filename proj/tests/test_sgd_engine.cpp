#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "dregsim/errors.hpp"
#include "dregsim/sgd_engine.hpp"
#include "oracles/sgd_oracle.hpp"
#include "support.hpp"

namespace {

using namespace dregsim;
using test_support::make_dataset;

Dataset two_ones() { return make_dataset({{1.0}, {1.0}}, {1.0, 1.0}); }

TEST(LocalSgd, HandRecursionAveragesAndLastIterate) {
  const auto data = two_ones();
  EXPECT_NEAR(run_local_sgd(data, SgdConfig(0.5, Averaging::full())).coefficients[0], 0.25, 1e-12);
  EXPECT_NEAR(run_local_sgd(data, SgdConfig(0.5, Averaging::tail(0.5))).coefficients[0], 0.5, 1e-12);
  const auto last = run_local_sgd(data, SgdConfig(0.5, Averaging::last_iterate()));
  EXPECT_NEAR(last.coefficients[0], 0.75, 1e-12);
  EXPECT_NEAR((*last.last_iterate)[0], 0.75, 1e-12);
}

TEST(LocalSgd, ZeroCovariatesLeaveInitialPoint) {
  const auto data = make_dataset({{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}, {1.0, -2.0, 3.0});
  Vector w1(2);
  w1 << 0.3, -0.7;
  for (const auto& avg : {Averaging::full(), Averaging::tail(), Averaging::last_iterate()}) {
    auto cfg = SgdConfig(12.0, avg);
    cfg.with_initial_point(w1);
    EXPECT_EQ(run_local_sgd(data, cfg).coefficients, w1);
  }
}

TEST(SgdConfig, RejectsNonPositiveStepsize) {
  EXPECT_THROW(SgdConfig(0.0), InvalidArgument);
  EXPECT_THROW(SgdConfig(-1.0), InvalidArgument);
  EXPECT_THROW(SgdConfig(NAN), InvalidArgument);
  EXPECT_THROW(Averaging::tail(1.0), InvalidArgument);
  EXPECT_THROW(parse_averaging("median"), InvalidArgument);
}

TEST(LocalSgd, FixedPointAtTarget) {
  auto inst = make_power_instance(build_polynomial_spectrum(8, 1.0), 1.0, 0.0);
  const auto data = sample_dataset(inst, 64, 3);
  for (const auto& avg : {Averaging::full(), Averaging::tail(), Averaging::last_iterate()}) {
    auto cfg = SgdConfig(0.2, avg);
    cfg.with_initial_point(inst.target);
    EXPECT_EQ(run_dsgd(data, 4, cfg).coefficients, inst.target);
  }
}

TEST(LocalSgd, MatchesStraightLineOracle) {
  auto inst = make_power_instance(build_polynomial_spectrum(6, 1.0), 1.0, 0.5);
  const auto data = sample_dataset(inst, 37, 11);
  const auto x = test_support::rows_of(data.covariates);
  const auto y = test_support::to_std(data.responses);
  const double g = 0.3;
  const auto it = oracle::sgd_iterates(x, y, g, std::vector<double>(6, 0.0));
  const std::size_t N = 37, s = N / 2;
  const auto full = oracle::mean_of(it, 0, N);
  const auto tail = oracle::mean_of(it, s, N);
  const auto full_out = run_local_sgd(data, SgdConfig(g, Averaging::full()));
  const auto tail_out = run_local_sgd(data, SgdConfig(g, Averaging::tail()));
  for (int j = 0; j < 6; ++j) {
    EXPECT_NEAR(full_out.coefficients[j], full[j], 1e-12);
    EXPECT_NEAR(tail_out.coefficients[j], tail[j], 1e-12);
    EXPECT_NEAR((*full_out.last_iterate)[j], it.back()[j], 1e-12);
  }
}

TEST(LocalSgd, OddTailWindowRoundsUp) {
  // N = 3, f = 0.5: s = 1, so the tail averages w_2 and w_3.
  const auto data = make_dataset({{1.0}, {1.0}, {1.0}}, {1.0, 1.0, 1.0});
  EXPECT_NEAR(run_local_sgd(data, SgdConfig(0.5, Averaging::tail())).coefficients[0], (0.5 + 0.75) / 2, 1e-15);
}

TEST(Dsgd, SingleNodeEqualsLocalRun) {
  auto inst = make_power_instance(build_polynomial_spectrum(5, 1.0), 1.0, 1.0);
  const auto data = sample_dataset(inst, 40, 2);
  const SgdConfig cfg(0.1);
  EXPECT_EQ(run_dsgd(data, 1, cfg).coefficients, run_local_sgd(data, cfg).coefficients);
}

TEST(Dsgd, IdenticalShardsAverageToCommonTail) {
  const auto data = make_dataset({{1.0}, {1.0}, {1.0}, {1.0}}, {1.0, 1.0, 1.0, 1.0});
  EXPECT_NEAR(run_dsgd(data, 2, SgdConfig(0.5, Averaging::tail())).coefficients[0], 0.5, 1e-12);
}

TEST(Dsgd, OutputIsUniformMeanOfLocalOutputs) {
  auto inst = make_power_instance(build_polynomial_spectrum(7, 1.0), 0.5, 1.0);
  const auto data = sample_dataset(inst, 60, 8);
  const SgdConfig cfg(0.15, Averaging::tail());
  const auto split = split_dataset(data, 4);
  Vector mean = Vector::Zero(7);
  for (const auto& s : split.shards) mean += run_local_sgd(s, cfg).coefficients;
  mean /= 4.0;
  const auto out = run_dsgd(data, 4, cfg);
  for (int j = 0; j < 7; ++j) EXPECT_NEAR(out.coefficients[j], mean[j], 1e-14);
  EXPECT_EQ(out.node_count, 4u);
}

TEST(Dsgd, NodeOrderDoesNotMatter) {
  auto inst = make_power_instance(build_polynomial_spectrum(5, 1.0), 1.0, 1.0);
  const auto data = sample_dataset(inst, 40, 21);
  const SgdConfig cfg(0.2);
  // Rotate the four blocks of 10 rows.
  RowMatrix x(40, 5);
  Vector y(40);
  for (int m = 0; m < 4; ++m) {
    x.middleRows(((m + 1) % 4) * 10, 10) = data.covariates.middleRows(m * 10, 10);
    y.segment(((m + 1) % 4) * 10, 10) = data.responses.segment(m * 10, 10);
  }
  const Dataset rotated(x, y, data.source);
  const auto a = run_dsgd(data, 4, cfg).coefficients, b = run_dsgd(rotated, 4, cfg).coefficients;
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Dsgd, WarnsAboutDiscardedSamplesAndLargeStepsizes) {
  auto inst = make_power_instance(build_polynomial_spectrum(5, 1.0), 1.0, 1.0);
  const auto data = sample_dataset(inst, 41, 1);
  const auto out = run_dsgd(data, 4, SgdConfig(0.1));
  EXPECT_EQ(out.discarded, 1u);
  EXPECT_EQ(out.warnings.size(), 1u);
  EXPECT_EQ(run_dsgd(data, 1, SgdConfig(1.0)).warnings.size(), 1u);
  EXPECT_THROW(run_dsgd(data, 42, SgdConfig(0.1)), InvalidArgument);
}

TEST(Dsgd, DivergenceIsReported) {
  auto inst = make_power_instance(build_polynomial_spectrum(3, 1.0), 1.0, 1.0);
  const auto data = sample_dataset(inst, 2000, 5);
  try {
    run_dsgd(data, 1, SgdConfig(50.0));
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.step(), 1u);
  }
}

TEST(BiasPath, HandRecursion) {
  const auto shard = make_dataset({{1.0}}, {1.0});
  const Vector b1 = Vector::Constant(1, -1.0);  // w_1 = 0, w* = 1
  const auto path = local_bias_trajectory(shard, b1, 0.5);
  ASSERT_EQ(path.size(), 2u);
  EXPECT_NEAR(path[1][0], -0.5, 1e-15);
}

TEST(VariancePath, HandRecursion) {
  const auto shard = make_dataset({{1.0}}, {0.0});
  const auto path = local_variance_trajectory(shard, Vector::Constant(1, 1.0), 0.5);
  ASSERT_EQ(path.size(), 2u);
  EXPECT_NEAR(path[1][0], 0.5, 1e-15);
}

TEST(BiasPath, StartingAtTargetStaysZero) {
  auto inst = make_power_instance(build_polynomial_spectrum(6, 1.0), 1.0, 1.0);
  auto cfg = SgdConfig(0.2);
  cfg.with_initial_point(inst.target);
  for (const auto& b : simulate_bias_paths(inst, 30, 3, cfg, 5, 9)) EXPECT_EQ(b, Vector::Zero(6));
}

TEST(VariancePath, NoiselessIsZero) {
  auto inst = make_power_instance(build_polynomial_spectrum(6, 1.0), 1.0, 0.0);
  for (const auto& v : simulate_variance_paths(inst, 30, 3, SgdConfig(0.2), 5, 9))
    EXPECT_EQ(v, Vector::Zero(6));
}

TEST(Decomposition, CenteredEstimateIsBiasPlusVariance) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 3 + trial % 7;
    auto inst = make_power_instance(build_polynomial_spectrum(static_cast<long long>(d), 1.0), 0.5 * (trial % 3), 1.0);
    const auto data = sample_dataset(inst, 60 + trial, rng());
    const std::size_t M = 1 + trial % 5;
    for (const auto& avg : {Averaging::full(), Averaging::tail(), Averaging::last_iterate()}) {
      const SgdConfig cfg(0.2 / inst.spectrum.trace(), avg);
      const auto deco = decompose_dsgd(data, inst, M, cfg);
      const Vector gap = deco.estimate.coefficients - inst.target - deco.bias - deco.variance;
      ASSERT_LE(gap.cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(Decomposition, PathsAgreeWithReplicateSimulation) {
  auto inst = make_power_instance(build_polynomial_spectrum(4, 1.0), 1.0, 1.0);
  const SgdConfig cfg(0.1);
  const auto bias = simulate_bias_paths(inst, 20, 2, cfg, 3, 5);
  const auto var = simulate_variance_paths(inst, 20, 2, cfg, 3, 5, 2);
  for (std::size_t r = 0; r < 3; ++r) {
    const auto deco = decompose_dsgd(sample_dataset(inst, 20, replicate_seed(5, r)), inst, 2, cfg);
    EXPECT_EQ(bias[r], deco.bias);
    EXPECT_EQ(var[r], deco.variance);
  }
}

// Mean of iterate t (1-based) over replicates for a d = 1 instance.
std::vector<std::vector<double>> one_dim_paths(double noise, bool bias_path, std::size_t reps) {
  auto inst = make_instance(Spectrum({1.0}), Vector::Constant(1, 1.0), noise);
  std::vector<std::vector<double>> by_t(11);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto data = sample_dataset(inst, 10, replicate_seed(99, r));
    Vector eps(10);
    for (Eigen::Index i = 0; i < 10; ++i) eps[i] = data.responses[i] - data.covariates(i, 0);
    const auto path = bias_path ? local_bias_trajectory(data, Vector::Constant(1, -1.0), 0.1)
                                : local_variance_trajectory(data, eps, 0.1);
    for (std::size_t t = 0; t < path.size(); ++t) by_t[t].push_back(path[t][0]);
  }
  return by_t;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }
double stderr_of(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1) / double(v.size()));
}

TEST(BiasPath, MeanDecaysGeometrically) {
  const auto by_t = one_dim_paths(1.0, true, 10000);
  for (std::size_t t = 1; t <= 10; ++t) {
    const double expected = -std::pow(0.9, double(t - 1));
    const double se = std::max(stderr_of(by_t[t - 1]), 1e-300);
    EXPECT_LE(std::abs(mean(by_t[t - 1]) - expected), 5.0 * se + 1e-15) << "t=" << t;
  }
}

TEST(VariancePath, MeanStaysAtZero) {
  const auto by_t = one_dim_paths(1.0, false, 10000);
  for (std::size_t t = 2; t <= 10; ++t)
    EXPECT_LE(std::abs(mean(by_t[t - 1])), 5.0 * stderr_of(by_t[t - 1])) << "t=" << t;
}

}  // namespace
