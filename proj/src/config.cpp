#include "dregsim/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "dregsim/errors.hpp"

namespace dregsim {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& key, const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(key, "config: empty list element in '" + key + "'");
    items.push_back(item);
  }
  if (items.empty()) throw ConfigError(key, "config: '" + key + "' needs at least one value");
  return items;
}

double to_double(const std::string& key, const std::string& token) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    throw ConfigError(key, "config: '" + key + "' expects a number, got '" + token + "'");
  return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& token) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(key, "config: '" + key + "' expects a nonnegative integer, got '" + token + "'");
  errno = 0;
  const auto v = std::strtoull(token.c_str(), nullptr, 10);
  if (errno == ERANGE) throw ConfigError(key, "config: '" + key + "' is out of range");
  return v;
}

bool to_bool(const std::string& key, const std::string& token) {
  if (token == "true" || token == "yes" || token == "1") return true;
  if (token == "false" || token == "no" || token == "0") return false;
  throw ConfigError(key, "config: '" + key + "' expects true or false, got '" + token + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(key, value)) out.push_back(to_double(key, item));
  return out;
}

std::vector<std::size_t> to_sizes(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(key, value))
    out.push_back(static_cast<std::size_t>(to_unsigned(key, item)));
  return out;
}

void require(bool ok, const std::string& key, const std::string& message) {
  if (!ok) throw ConfigError(key, "config: '" + key + "' " + message);
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment_id", [](auto& c, auto&, auto& v) { c.experiment_id = v; }},
      {"kind",
       [](auto& c, auto& k, auto& v) {
         if (v == "m_sweep") c.kind = ExperimentKind::m_sweep;
         else if (v == "bounds_overlay") c.kind = ExperimentKind::bounds_overlay;
         else if (v == "sample_complexity") c.kind = ExperimentKind::sample_complexity;
         else if (v == "rate_slope") c.kind = ExperimentKind::rate_slope;
         else if (v == "real_data") c.kind = ExperimentKind::real_data;
         else throw ConfigError(k, "config: unknown kind '" + v + "'");
       }},
      {"spectrum",
       [](auto& c, auto& k, auto& v) {
         if (v == "polynomial") c.spectrum = SpectrumChoice::polynomial;
         else if (v == "spiked") c.spectrum = SpectrumChoice::spiked;
         else if (v == "explicit") c.spectrum = SpectrumChoice::explicit_values;
         else throw ConfigError(k, "config: unknown spectrum '" + v + "'");
       }},
      {"d", [](auto& c, auto& k, auto& v) { c.d = static_cast<std::size_t>(to_unsigned(k, v)); }},
      {"r", [](auto& c, auto& k, auto& v) { c.r = to_double(k, v); }},
      {"q", [](auto& c, auto& k, auto& v) { c.q = to_double(k, v); }},
      {"node_samples",
       [](auto& c, auto& k, auto& v) { c.node_samples = static_cast<std::size_t>(to_unsigned(k, v)); }},
      {"eigenvalues", [](auto& c, auto& k, auto& v) { c.eigenvalues = to_doubles(k, v); }},
      {"alpha", [](auto& c, auto& k, auto& v) { c.alpha = to_doubles(k, v); }},
      {"target", [](auto& c, auto& k, auto& v) { c.target = to_doubles(k, v); }},
      {"noise_std", [](auto& c, auto& k, auto& v) { c.noise_std = to_double(k, v); }},
      {"covariates",
       [](auto& c, auto& k, auto& v) {
         if (v == "gaussian") c.law = CovariateLaw::gaussian;
         else if (v == "rademacher") c.law = CovariateLaw::rademacher;
         else throw ConfigError(k, "config: unknown covariate law '" + v + "'");
       }},
      {"gamma", [](auto& c, auto& k, auto& v) { c.gamma = to_doubles(k, v); }},
      {"gamma_scale", [](auto& c, auto& k, auto& v) { c.gamma_scale = to_doubles(k, v); }},
      {"lambda", [](auto& c, auto& k, auto& v) { c.lambda = to_doubles(k, v); }},
      {"averaging",
       [](auto& c, auto& k, auto& v) {
         c.averaging.clear();
         for (const auto& item : split_list(k, v)) {
           try {
             c.averaging.push_back(parse_averaging(item));
           } catch (const InvalidArgument& e) {
             throw ConfigError(k, std::string("config: ") + e.what());
           }
         }
       }},
      {"tail_fraction", [](auto&, auto&, auto&) { /* applied after all keys are read */ }},
      {"estimator",
       [](auto& c, auto& k, auto& v) {
         c.estimators.clear();
         for (const auto& item : split_list(k, v)) {
           if (item == "dsgd") c.estimators.push_back(EstimatorKind::dsgd);
           else if (item == "drr") c.estimators.push_back(EstimatorKind::drr);
           else if (item == "dols") c.estimators.push_back(EstimatorKind::dols);
           else throw ConfigError(k, "config: unknown estimator '" + item + "'");
         }
       }},
      {"beta", [](auto& c, auto& k, auto& v) { c.beta = to_doubles(k, v); }},
      {"M", [](auto& c, auto& k, auto& v) { c.nodes = to_sizes(k, v); }},
      {"node_exponent", [](auto& c, auto& k, auto& v) { c.node_exponent = to_double(k, v); }},
      {"n", [](auto& c, auto& k, auto& v) { c.n = to_sizes(k, v); }},
      {"replicates",
       [](auto& c, auto& k, auto& v) { c.replicates = static_cast<std::size_t>(to_unsigned(k, v)); }},
      {"tuning_replicates",
       [](auto& c, auto& k, auto& v) {
         c.tuning_replicates = static_cast<std::size_t>(to_unsigned(k, v));
       }},
      {"seed", [](auto& c, auto& k, auto& v) { c.seed = to_unsigned(k, v); }},
      {"tau", [](auto& c, auto& k, auto& v) { c.constants.tau = to_double(k, v); }},
      {"theta", [](auto& c, auto& k, auto& v) { c.constants.theta = to_double(k, v); }},
      {"b", [](auto& c, auto& k, auto& v) { c.constants.b = to_double(k, v); }},
      {"c", [](auto& c, auto& k, auto& v) { c.constants.c = to_double(k, v); }},
      {"c_prime", [](auto& c, auto& k, auto& v) { c.constants.c_prime = to_double(k, v); }},
      {"c_b", [](auto& c, auto& k, auto& v) { c.constants.c_b = to_double(k, v); }},
      {"c_v", [](auto& c, auto& k, auto& v) { c.constants.c_v = to_double(k, v); }},
      {"sigma2", [](auto& c, auto& k, auto& v) { c.constants.sigma2 = to_double(k, v); }},
      {"out", [](auto& c, auto&, auto& v) { c.out_dir = v; }},
      {"plots", [](auto& c, auto& k, auto& v) { c.plots = to_bool(k, v); }},
      {"train_path", [](auto& c, auto&, auto& v) { c.train_path = v; }},
      {"eval_path", [](auto& c, auto&, auto& v) { c.eval_path = v; }},
      {"format",
       [](auto& c, auto& k, auto& v) {
         if (v == "svmlight") c.format = FeatureFormat::svmlight;
         else if (v == "dense_csv") c.format = FeatureFormat::dense_csv;
         else throw ConfigError(k, "config: unknown format '" + v + "'");
       }},
      {"scale_features", [](auto& c, auto& k, auto& v) { c.scale_features = to_bool(k, v); }},
  };
  return table;
}

bool is_synthetic(ExperimentKind k) { return k != ExperimentKind::real_data; }

void apply_defaults_and_validate(ExperimentConfig& c, const std::map<std::string, std::string>& raw) {
  const auto has = [&](const char* key) { return raw.count(key) > 0; };

  if (c.experiment_id.empty()) c.experiment_id = to_string(c.kind);
  require(c.experiment_id.find_first_of(",\"\n") == std::string::npos, "experiment_id",
          "must not contain commas, quotes or newlines");

  if (has("tail_fraction")) {
    const double f = to_double("tail_fraction", trim(raw.at("tail_fraction")));
    require(f > 0.0 && f < 1.0, "tail_fraction", "must lie in (0, 1)");
    for (auto& a : c.averaging)
      if (a.kind == Averaging::Kind::tail) a.tail_fraction = f;
    if (c.averaging.empty()) c.averaging.push_back(Averaging::tail(f));
  }

  const bool tuning_kind =
      c.kind == ExperimentKind::sample_complexity || c.kind == ExperimentKind::rate_slope;
  require(!(has("gamma") && has("gamma_scale")), "gamma", "and 'gamma_scale' are mutually exclusive");
  if (c.gamma.empty() && c.gamma_scale.empty()) {
    if (tuning_kind)
      c.gamma_scale = {0.5, 0.25, 0.1, 0.05, 0.01};
    else
      c.gamma_scale = {0.25};
  }
  for (double g : c.gamma) require(g > 0.0, "gamma", "values must be > 0");
  for (double g : c.gamma_scale) require(g > 0.0, "gamma_scale", "values must be > 0");

  if (c.lambda.empty())
    for (int e = -6; e <= 2; ++e) c.lambda.push_back(std::pow(10.0, e));
  for (double l : c.lambda) require(l >= 0.0, "lambda", "values must be >= 0");

  if (c.averaging.empty())
    c.averaging.push_back(c.kind == ExperimentKind::sample_complexity ? Averaging::tail()
                                                                      : Averaging::full());
  if (c.estimators.empty()) {
    if (c.kind == ExperimentKind::sample_complexity || c.kind == ExperimentKind::real_data)
      c.estimators = {EstimatorKind::dsgd, EstimatorKind::drr};
    else
      c.estimators = {EstimatorKind::dsgd};
  }

  require(!(has("beta") && has("M")), "beta", "and 'M' are mutually exclusive");
  if (tuning_kind) {
    require(!has("beta"), "beta", "is not used by " + to_string(c.kind) + "; set node_exponent");
    require(!has("M"), "M", "is not used by " + to_string(c.kind) + "; set node_exponent");
  } else if (c.beta.empty() && c.nodes.empty()) {
    if (c.kind == ExperimentKind::real_data)
      c.beta = {0.25};
    else
      for (int i = 0; i <= 9; ++i) c.beta.push_back(0.1 * i);
  }
  for (double b : c.beta) require(b >= 0.0 && b <= 1.0, "beta", "values must lie in [0, 1]");
  for (std::size_t m : c.nodes) require(m >= 1, "M", "values must be >= 1");
  if (c.node_exponent) require(*c.node_exponent >= 0.0 && *c.node_exponent <= 1.0, "node_exponent",
                               "must lie in [0, 1]");
  if (!c.node_exponent) {
    if (c.kind == ExperimentKind::sample_complexity) c.node_exponent = 1.0 / 3.0;
    if (c.kind == ExperimentKind::rate_slope) c.node_exponent = 1.0 / (2.0 + c.r);
  }

  require(c.replicates >= 2, "replicates", "must be >= 2");
  if (c.tuning_replicates == 0) c.tuning_replicates = c.replicates;
  require(c.tuning_replicates >= 2, "tuning_replicates", "must be >= 2");

  if (is_synthetic(c.kind)) {
    require(!c.n.empty(), "n", "is required for synthetic experiments");
    for (std::size_t v : c.n) require(v >= 1, "n", "values must be >= 1");
    require(c.noise_std >= 0.0, "noise_std", "must be >= 0");
    switch (c.spectrum) {
      case SpectrumChoice::polynomial:
        require(c.d >= 1, "d", "must be >= 1");
        require(c.r > 0.0, "r", "must be > 0");
        break;
      case SpectrumChoice::spiked:
        require(c.q > 1.0, "q", "must be > 1 for the spiked spectrum");
        require(c.r > 0.0 && c.r <= 1.0, "r", "must lie in (0, 1] for the spiked spectrum");
        if (c.node_samples) require(*c.node_samples >= 2, "node_samples", "must be >= 2");
        break;
      case SpectrumChoice::explicit_values:
        require(!c.eigenvalues.empty(), "eigenvalues", "is required for the explicit spectrum");
        try {
          Spectrum check(c.eigenvalues);
        } catch (const InvalidArgument& e) {
          throw ConfigError("eigenvalues", std::string("config: ") + e.what());
        }
        c.d = c.eigenvalues.size();
        break;
    }
    if (!c.target.empty()) {
      require(c.spectrum != SpectrumChoice::spiked, "target",
              "cannot be combined with the spiked spectrum (its dimension varies with n/M)");
      require(c.target.size() == c.d, "target", "length must equal the spectrum dimension");
      require(!has("alpha"), "target", "and 'alpha' are mutually exclusive");
    } else if (c.alpha.empty()) {
      c.alpha = {1.0};
    }
    for (double a : c.alpha) require(a >= 0.0, "alpha", "values must be >= 0");
    if (c.kind == ExperimentKind::rate_slope) {
      require(c.spectrum == SpectrumChoice::polynomial, "spectrum",
              "must be polynomial for rate_slope");
      require(c.alpha.size() <= 1, "alpha", "must hold a single value for rate_slope");
    }
  } else {
    require(!c.train_path.empty(), "train_path", "is required for real_data");
    require(!c.eval_path.empty(), "eval_path", "is required for real_data");
    for (std::size_t v : c.n) require(v >= 1, "n", "values must be >= 1");
  }

  require(c.constants.tau >= 1.0, "tau", "must be >= 1");
  require(c.constants.theta > 0.0, "theta", "must be > 0");
  require(c.constants.b > 1.0, "b", "must be > 1");
  require(c.constants.c > 1.0, "c", "must be > 1");
  require(c.constants.c_prime > 1.0, "c_prime", "must be > 1");
  require(c.constants.c_b > 0.0, "c_b", "must be > 0");
  require(c.constants.c_v > 0.0, "c_v", "must be > 0");
  if (c.constants.sigma2) require(*c.constants.sigma2 >= 0.0, "sigma2", "must be >= 0");
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::m_sweep: return "m_sweep";
    case ExperimentKind::bounds_overlay: return "bounds_overlay";
    case ExperimentKind::sample_complexity: return "sample_complexity";
    case ExperimentKind::rate_slope: return "rate_slope";
    case ExperimentKind::real_data: return "real_data";
  }
  return "m_sweep";
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> raw;
  std::vector<std::string> unknown;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "config: line " << line_no << " is not 'key = value'";
      throw ConfigError(line, os.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      std::ostringstream os;
      os << "config: line " << line_no << " has an empty key";
      throw ConfigError("", os.str());
    }
    if (!setters().count(key)) {
      unknown.push_back(key);
      continue;
    }
    if (value.empty()) throw ConfigError(key, "config: '" + key + "' has no value");
    if (!raw.emplace(key, value).second)
      throw ConfigError(key, "config: duplicate key '" + key + "'");
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError(unknown.front(), "config: unknown keys: " + list);
  }
  require(raw.count("kind") > 0, "kind", "is required");

  ExperimentConfig cfg;
  for (const auto& [key, value] : raw) setters().at(key)(cfg, key, value);
  apply_defaults_and_validate(cfg, raw);
  cfg.source_hash = fnv1a64(text);
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "config: cannot read '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string config_reference() {
  return R"(Config file: one 'key = value' per line, '#' starts a comment, lists are
comma-separated. Unknown keys are rejected.

  kind              m_sweep | bounds_overlay | sample_complexity | rate_slope | real_data (required)
  experiment_id     label written to every row (default: the kind)
  n                 sample sizes, list (required except for real_data; real_data default: all rows)
  replicates        Monte Carlo replicates per grid point, >= 2 (default 100)
  tuning_replicates replicates for stepsize/lambda tuning (default: replicates)
  seed              master seed, u64 (default 1)

  spectrum          polynomial | spiked | explicit (default polynomial)
  d                 dimension of the polynomial spectrum (default 200)
  r                 polynomial: lambda_j = j^-(1+r); spiked: head exponent in (0,1] (default 1)
  q                 spiked: d = floor(N^q), q > 1 (default 2)
  node_samples      spiked: N (default floor(n / M) per grid point)
  eigenvalues       explicit spectrum, nonincreasing positive list
  alpha             target decays w*_j = j^-alpha, list (default 1)
  target            explicit w* (excludes alpha)
  noise_std         Gaussian noise standard deviation (default 1)
  covariates        gaussian | rademacher (default gaussian)

  estimator         list of dsgd, drr, dols (default dsgd; sample_complexity and
                    real_data: dsgd, drr)
  gamma             absolute stepsizes, list (excludes gamma_scale)
  gamma_scale       stepsizes as multiples of 1/Tr(H) (default 0.25; sample_complexity
                    and rate_slope tune over 0.5, 0.25, 0.1, 0.05, 0.01)
  lambda            ridge regularization grid (default 1e-6, 1e-5, ..., 1e2)
  averaging         list of full, tail, last (default full; sample_complexity: tail)
  tail_fraction     fraction of iterates skipped by tail averaging (default 0.5)
  beta              M = max(1, ceil(n^beta)), values in [0,1] (default 0, 0.1, ..., 0.9;
                    real_data: 0.25)
  M                 explicit node counts (excludes beta)
  node_exponent     M_n = ceil(n^e) for sample_complexity (default 1/3) and
                    rate_slope (default 1/(2+r))

  tau theta b c c_prime c_b c_v
                    bound constants (defaults 3, 1, 2, 2, 2, 1, 1)
  sigma2            noise functional for the bounds (default noise_std^2)

  train_path        real_data training file
  eval_path         real_data evaluation file
  format            svmlight | dense_csv (default svmlight)
  scale_features    divide features by the root mean squared training row norm
                    (default false)

  out               output directory (default dregsim_out)
  plots             write SVG line plots (default true)
)";
}

}  // namespace dregsim
