#pragma once

// Literal-summation reimplementation of the bound formulas. Deliberately
// naive: every sum is an explicit loop over indices on plain vectors, with
// none of the library's suffix arrays or norm helpers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct Terms {
  double bias = 0.0;
  double variance = 0.0;
  double total = 0.0;
};

inline double lam(const std::vector<double>& l, std::size_t j) {  // 1-based, 0 past d
  return (j >= 1 && j <= l.size()) ? l[j - 1] : 0.0;
}

inline double trace(const std::vector<double>& l) {
  double s = 0.0;
  for (double v : l) s += v;
  return s;
}

inline std::size_t k_star(const std::vector<double>& l, double n, double M, double g) {
  std::size_t k = 0;
  for (std::size_t j = 1; j <= l.size(); ++j)
    if (l[j - 1] >= M / (g * n)) k = j;
  return k;
}

inline double V(const std::vector<double>& l, double n, double M, double g, std::size_t k) {
  double tail = 0.0;
  for (std::size_t j = k + 1; j <= l.size(); ++j) tail += l[j - 1] * l[j - 1];
  return double(k) / n + g * g * (n / (M * M)) * tail;
}

inline Terms upper(const std::vector<double>& l, const std::vector<double>& w, double n, double M,
                   double g, double tau, double sigma2) {
  const std::size_t k = k_star(l, n, M, g);
  const double v = V(l, n, M, g, k);
  double head_inv = 0.0, head_id = 0.0, tail = 0.0;
  for (std::size_t j = 1; j <= l.size(); ++j) {
    if (j <= k) {
      head_inv += w[j - 1] * w[j - 1] / l[j - 1];
      head_id += w[j - 1] * w[j - 1];
    } else {
      tail += l[j - 1] * w[j - 1] * w[j - 1];
    }
  }
  const double slack = 1.0 - g * tau * trace(l);
  Terms t;
  t.bias = M * M / (g * g * n * n) * head_inv + tail +
           2.0 * tau * M * M * (head_id + g * (n / M) * tail) / (g * n * slack) * v;
  t.variance = sigma2 * v / slack;
  t.total = 2.0 * (t.bias + t.variance);
  return t;
}

inline Terms lower(const std::vector<double>& l, const std::vector<double>& w, double n, double M,
                   double g, double noise_var) {
  const std::size_t k = k_star(l, n, M, g);
  double head_inv = 0.0, tail = 0.0;
  for (std::size_t j = 1; j <= l.size(); ++j) {
    if (j <= k)
      head_inv += w[j - 1] * w[j - 1] / l[j - 1];
    else
      tail += l[j - 1] * w[j - 1] * w[j - 1];
  }
  Terms t;
  t.bias = M * (M - 1.0) / (100.0 * g * g * n * n) * (head_inv + g * g * n * n / (M * M) * tail);
  t.variance = noise_var / 100.0 * V(l, n, M, g, k);
  t.total = t.bias + t.variance;
  return t;
}

inline double tail_sum(const std::vector<double>& l, std::size_t k) {
  double s = 0.0;
  for (std::size_t j = k + 1; j <= l.size(); ++j) s += l[j - 1];
  return s;
}

inline std::size_t k_rr(const std::vector<double>& l, double n, double M, double reg, double b) {
  for (std::size_t k = 0;; ++k)
    if (lam(l, k + 1) <= M * (reg + tail_sum(l, k)) / (b * n)) return k;
}

inline Terms drr_lower(const std::vector<double>& l, const std::vector<double>& w, double n,
                       double M, double reg, double b, double c, double sigma2) {
  const std::size_t k = k_rr(l, n, M, reg, b);
  const double level = reg + tail_sum(l, k);
  double sq = 0.0, head_inv = 0.0, tail = 0.0;
  for (std::size_t j = 1; j <= l.size(); ++j) {
    if (j <= k) {
      head_inv += w[j - 1] * w[j - 1] / l[j - 1];
    } else {
      sq += l[j - 1] * l[j - 1];
      tail += l[j - 1] * w[j - 1] * w[j - 1];
    }
  }
  const double v = double(k) / n + (level > 0.0 ? (n / (M * M)) * sq / (level * level) : 0.0);
  Terms t;
  t.bias = tail + M * M * level * level / (c * n * n) * head_inv;
  t.variance = sigma2 / c * v;
  t.total = t.bias + t.variance;
  return t;
}

inline Terms tail_upper(const std::vector<double>& l, const std::vector<double>& w, double n,
                        double M, double g, std::size_t k1, std::size_t k2, double cb, double cv,
                        double sigma2) {
  double bias = 0.0;
  for (std::size_t j = 1; j <= k1; ++j)
    bias += std::exp(-2.0 * (n / M) * g * l[j - 1]) * w[j - 1] * w[j - 1] / l[j - 1];
  bias *= cb * M * M / (g * g * n * n);
  for (std::size_t j = k1 + 1; j <= l.size(); ++j) bias += l[j - 1] * w[j - 1] * w[j - 1];
  double r2 = 0.0;
  for (double x : w) r2 += x * x;
  Terms t;
  t.bias = bias;
  t.variance = cv * (1.0 + r2) * sigma2 * V(l, n, M, g, k2);
  t.total = t.bias + t.variance;
  return t;
}

struct Sc {
  double c_star, c_star_lambda, L, L_prime;
  bool ok;
};

inline Sc sc(const std::vector<double>& l, const std::vector<double>& w, double g, double reg,
             std::size_t k, double c, double sigma2) {
  double r2 = 0.0;
  for (double x : w) r2 += x * x;
  Sc out;
  out.c_star = c * (1.0 + r2 / sigma2);
  out.c_star_lambda = reg + tail_sum(l, k);
  const double shrink = std::max(0.0, 1.0 - g * lam(l, k));
  out.L = std::max(out.c_star, std::sqrt(c * shrink) / (g * out.c_star_lambda));
  out.L_prime = 1.0 / (out.c_star * g * g * out.c_star_lambda * out.c_star_lambda);
  out.ok = g < 1.0 / trace(l) && g < 1.0 / (std::sqrt(c) * out.c_star * out.c_star_lambda);
  return out;
}

}  // namespace oracle
