#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dregsim/config.hpp"
#include "dregsim/plot.hpp"

namespace dregsim {

// One grid point for one estimator. Optional fields are written as empty
// CSV cells.
struct ResultRow {
  std::string experiment_id;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t M = 1;
  std::optional<double> beta;
  std::optional<double> gamma;
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::string estimator;
  std::string averaging;  // empty for ridge-type estimators
  std::size_t replicates = 0;
  std::optional<double> risk_mean;
  std::optional<double> risk_stderr;
  std::optional<double> bias_mc;
  std::optional<double> var_mc;
  std::optional<double> upper_bound;
  std::optional<double> lower_bound;
  std::optional<std::size_t> k_star;
  std::size_t diverged_count = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

// The exact results.csv header line (without newline).
const std::string& csv_header();

// Header plus one line per row; floats use 17 significant digits so the
// text parses back to identical doubles.
std::string format_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(const std::string& text);

// Everything a run produces besides the rows themselves.
struct RunArtifacts {
  std::vector<LinePlot> plots;
  std::map<std::string, double> summary;  // e.g. fitted_slope
  std::vector<std::string> notes;
};

// Writes results.csv, manifest.json and (when config.plots) one SVG per
// plot into `out_dir`, creating it if needed. Empty `rows` is an error
// raised before anything is written. Returns the written paths.
std::vector<std::filesystem::path> emit_outputs(const std::vector<ResultRow>& rows,
                                                const RunArtifacts& artifacts,
                                                const ExperimentConfig& config,
                                                const std::filesystem::path& out_dir);

}  // namespace dregsim
