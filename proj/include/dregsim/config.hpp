#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dregsim/feature_file.hpp"
#include "dregsim/rng.hpp"
#include "dregsim/sgd_engine.hpp"
#include "dregsim/spectrum_model.hpp"
#include "dregsim/theory_bounds.hpp"

namespace dregsim {

enum class ExperimentKind { m_sweep, bounds_overlay, sample_complexity, rate_slope, real_data };
enum class SpectrumChoice { polynomial, spiked, explicit_values };

std::string to_string(ExperimentKind kind);

// Parsed experiment description. Every field has a documented default
// (see config_reference()); kind-dependent defaults are resolved by
// parse_config so the struct is complete after parsing.
struct ExperimentConfig {
  std::string experiment_id;
  ExperimentKind kind = ExperimentKind::m_sweep;

  // Data distribution.
  SpectrumChoice spectrum = SpectrumChoice::polynomial;
  std::size_t d = 200;
  double r = 1.0;
  double q = 2.0;
  std::optional<std::size_t> node_samples;  // spiked N; default floor(n / M)
  std::vector<double> eigenvalues;          // explicit spectrum
  std::vector<double> alpha;                // w*_j = j^{-alpha}
  std::vector<double> target;               // explicit w*, overrides alpha
  double noise_std = 1.0;
  CovariateLaw law = CovariateLaw::gaussian;

  // Algorithm grids.
  std::vector<double> gamma;        // absolute stepsizes
  std::vector<double> gamma_scale;  // stepsizes as multiples of 1 / Tr(H)
  std::vector<double> lambda;
  std::vector<Averaging> averaging;
  std::vector<EstimatorKind> estimators;
  std::vector<double> beta;         // M = max(1, ceil(n^beta))
  std::vector<std::size_t> nodes;   // explicit M values (key "M")
  std::optional<double> node_exponent;  // M_n = ceil(n^e) for sample_complexity / rate_slope
  std::vector<std::size_t> n;
  std::size_t replicates = 100;
  std::size_t tuning_replicates = 0;  // 0: same as replicates
  Seed seed = 1;
  BoundConstants constants;
  std::string out_dir = "dregsim_out";
  bool plots = true;

  // Real data.
  std::string train_path;
  std::string eval_path;
  FeatureFormat format = FeatureFormat::svmlight;
  bool scale_features = false;

  // FNV-1a hash of the source text, recorded in the manifest.
  std::uint64_t source_hash = 0;
};

// Parses `key = value` lines ('#' starts a comment, lists are
// comma-separated). Throws ConfigError naming the offending key for unknown
// keys (all listed), malformed values, duplicates and invariant violations.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

// Human-readable list of keys, accepted values and defaults.
std::string config_reference();

std::uint64_t fnv1a64(const std::string& text);

}  // namespace dregsim
