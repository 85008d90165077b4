#include "dregsim/feature_file.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "dregsim/errors.hpp"

namespace dregsim {

namespace {

struct SparseRow {
  double label = 0.0;
  std::vector<std::pair<std::size_t, double>> entries;  // 0-based column
};

[[noreturn]] void fail(std::size_t line, const std::string& path, const std::string& why) {
  std::ostringstream os;
  os << path << ":" << line << ": " << why;
  throw ParseError(line, os.str());
}

// Whole-token strtod; false when trailing garbage remains or the value is
// not finite.
bool parse_number(const std::string& token, double& out) {
  if (token.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(token.c_str(), &end);
  return end == token.c_str() + token.size() && errno != ERANGE && std::isfinite(out);
}

double binary_label(double raw) { return raw > 0.0 ? 1.0 : -1.0; }

bool skip_line(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

SparseRow parse_svmlight(const std::string& line, std::size_t line_no, const std::string& path) {
  std::istringstream in(line);
  std::string token;
  in >> token;
  SparseRow row;
  double label = 0.0;
  if (!parse_number(token, label)) fail(line_no, path, "bad label '" + token + "'");
  row.label = binary_label(label);
  std::size_t previous = 0;
  while (in >> token) {
    if (token[0] == '#') break;  // trailing comment
    const auto colon = token.find(':');
    if (colon == std::string::npos || colon == 0) fail(line_no, path, "expected index:value, got '" + token + "'");
    const std::string index_text = token.substr(0, colon);
    if (index_text.find_first_not_of("0123456789") != std::string::npos)
      fail(line_no, path, "bad feature index '" + index_text + "'");
    const auto index = std::strtoull(index_text.c_str(), nullptr, 10);
    if (index == 0) fail(line_no, path, "feature indices are 1-based");
    if (index <= previous) fail(line_no, path, "feature indices must increase");
    double value = 0.0;
    if (!parse_number(token.substr(colon + 1), value))
      fail(line_no, path, "bad feature value in '" + token + "'");
    row.entries.emplace_back(static_cast<std::size_t>(index - 1), value);
    previous = index;
  }
  return row;
}

SparseRow parse_csv(const std::string& line, std::size_t line_no, const std::string& path) {
  std::istringstream in(line);
  std::string cell;
  SparseRow row;
  bool first = true;
  std::size_t column = 0;
  while (std::getline(in, cell, ',')) {
    const auto a = cell.find_first_not_of(" \t\r");
    const auto b = cell.find_last_not_of(" \t\r");
    cell = a == std::string::npos ? std::string() : cell.substr(a, b - a + 1);
    double value = 0.0;
    if (!parse_number(cell, value)) fail(line_no, path, "bad number '" + cell + "'");
    if (first) {
      row.label = binary_label(value);
      first = false;
    } else {
      row.entries.emplace_back(column++, value);
    }
  }
  if (first) fail(line_no, path, "empty record");
  return row;
}

}  // namespace

Dataset load_feature_file(const std::string& path, FeatureFormat format) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open feature file '" + path + "'");

  std::vector<SparseRow> rows;
  std::size_t d = 0;
  std::optional<std::size_t> csv_width;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    SparseRow row = format == FeatureFormat::svmlight ? parse_svmlight(line, line_no, path)
                                                      : parse_csv(line, line_no, path);
    if (format == FeatureFormat::dense_csv) {
      if (!csv_width) csv_width = row.entries.size();
      if (row.entries.size() != *csv_width) {
        std::ostringstream os;
        os << "expected " << *csv_width << " features, got " << row.entries.size();
        fail(line_no, path, os.str());
      }
    }
    if (!row.entries.empty()) d = std::max(d, row.entries.back().first + 1);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("feature file '" + path + "' has no samples");
  if (d == 0) throw InvalidArgument("feature file '" + path + "' has no features");

  RowMatrix x = RowMatrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  Vector y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    y[r] = rows[i].label;
    for (const auto& [j, v] : rows[i].entries) x(r, static_cast<Eigen::Index>(j)) = v;
  }
  return Dataset(std::move(x), std::move(y), FileSource{path});
}

Dataset pad_features(const Dataset& data, std::size_t d) {
  if (d < data.dim()) throw InvalidArgument("pad_features: target dimension is smaller than the data");
  if (d == data.dim()) return data;
  RowMatrix x = RowMatrix::Zero(data.covariates.rows(), static_cast<Eigen::Index>(d));
  x.leftCols(data.covariates.cols()) = data.covariates;
  return Dataset(std::move(x), data.responses, data.source);
}

}  // namespace dregsim
