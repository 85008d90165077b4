#pragma once

#include <cstddef>
#include <span>

namespace dregsim {

// Pairwise (cascade) summation; error grows as O(log n) instead of O(n).
double pairwise_sum(std::span<const double> values);

struct SampleSummary {
  double mean = 0.0;
  double std_error = 0.0;  // unbiased sample std / sqrt(count)
  std::size_t count = 0;
};

// Mean and standard error; stderr is 0 for fewer than two samples.
SampleSummary summarize(std::span<const double> values);

// Least-squares slope of y against x. Requires at least two distinct x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace dregsim

namespace dregsim {

// floor(base^exponent) and ceil(base^exponent), snapping to the nearest
// integer when pow() lands within a relative 1e-9 of it (so 1000^(1/3)
// is 10, not 9 or 11).
long long floor_pow(double base, double exponent);
long long ceil_pow(double base, double exponent);

}  // namespace dregsim
