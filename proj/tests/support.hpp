#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "dregsim/spectrum_model.hpp"

namespace test_support {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name, const std::string& content) const;

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);

inline dregsim::Dataset make_dataset(const std::vector<std::vector<double>>& x,
                                     const std::vector<double>& y) {
  dregsim::RowMatrix m(static_cast<Eigen::Index>(x.size()),
                       static_cast<Eigen::Index>(x.empty() ? 0 : x.front().size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i][j];
  dregsim::Vector v = Eigen::Map<const dregsim::Vector>(y.data(), static_cast<Eigen::Index>(y.size()));
  return dregsim::Dataset(std::move(m), std::move(v), dregsim::SyntheticSource{0});
}

inline std::vector<std::vector<double>> rows_of(const dregsim::RowMatrix& m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(m(i, j));
  return out;
}

inline std::vector<double> to_std(const dregsim::Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Random nonincreasing positive spectrum of dimension d.
inline std::vector<double> random_spectrum(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> l(d);
  double v = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
  for (auto& x : l) {
    x = v;
    v *= u(rng);
  }
  return l;
}

}  // namespace test_support
