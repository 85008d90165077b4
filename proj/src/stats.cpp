#include "dregsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dregsim/errors.hpp"

namespace dregsim {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 32;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SampleSummary summarize(std::span<const double> values) {
  SampleSummary out;
  out.count = values.size();
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = pairwise_sum(values) / n;
  if (values.size() < 2) return out;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double dev = values[i] - out.mean;
    sq[i] = dev * dev;
  }
  const double var = pairwise_sum(sq) / (n - 1.0);
  out.std_error = std::sqrt(var / n);
  return out;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidArgument("fit_slope: need two or more paired points");
  const double n = static_cast<double>(x.size());
  const double mx = pairwise_sum(x) / n;
  const double my = pairwise_sum(y) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_slope: all x values coincide");
  return sxy / sxx;
}

}  // namespace dregsim

namespace dregsim {

namespace {
bool near_integer(double x, long long& rounded) {
  rounded = std::llround(x);
  return std::abs(x - static_cast<double>(rounded)) <= 1e-9 * std::max(1.0, std::abs(x));
}
}  // namespace

long long floor_pow(double base, double exponent) {
  const double x = std::pow(base, exponent);
  long long r = 0;
  if (near_integer(x, r)) return r;
  return static_cast<long long>(std::floor(x));
}

long long ceil_pow(double base, double exponent) {
  const double x = std::pow(base, exponent);
  long long r = 0;
  if (near_integer(x, r)) return r;
  return static_cast<long long>(std::ceil(x));
}

}  // namespace dregsim
