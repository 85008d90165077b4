#include "dregsim/experiments.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "dregsim/errors.hpp"
#include "dregsim/feature_file.hpp"
#include "dregsim/risk_eval.hpp"
#include "dregsim/stats.hpp"
#include "dregsim/theory_bounds.hpp"

namespace dregsim {

namespace {

constexpr std::uint64_t kEvalStream = 0x4556414cULL;  // "EVAL"
constexpr std::uint64_t kTuneStream = 0x54554e45ULL;  // "TUNE"

// One estimator configuration of the grid, with the labels its row carries.
struct SpecEntry {
  EstimatorSpec spec;
  EstimatorKind kind;
  std::optional<double> gamma;
  std::optional<double> lambda;
  std::optional<Averaging> averaging;

  std::string label() const {
    std::ostringstream os;
    os << to_string(kind);
    if (averaging) os << "-" << averaging->name();
    if (gamma) os << " g=" << std::setprecision(3) << *gamma;
    if (lambda) os << " l=" << std::setprecision(3) << *lambda;
    return os.str();
  }
};

std::vector<SpecEntry> dsgd_entries(const std::vector<double>& gammas, const Averaging& avg) {
  std::vector<SpecEntry> out;
  for (double g : gammas) out.push_back({DsgdSpec{SgdConfig(g, avg)}, EstimatorKind::dsgd, g, {}, avg});
  return out;
}

std::vector<SpecEntry> drr_entries(const std::vector<double>& lambdas) {
  std::vector<SpecEntry> out;
  for (double l : lambdas) out.push_back({DrrSpec{RidgeConfig(l)}, EstimatorKind::drr, {}, l, {}});
  return out;
}

SpecEntry dols_entry() { return {DolsSpec{}, EstimatorKind::dols, {}, {}, {}}; }

// Full grid in row order: estimators as listed, then averaging, then stepsize.
std::vector<SpecEntry> full_grid(const ExperimentConfig& config, const std::vector<double>& gammas) {
  std::vector<SpecEntry> out;
  for (EstimatorKind e : config.estimators) {
    if (e == EstimatorKind::dsgd) {
      for (const auto& avg : config.averaging)
        for (auto& s : dsgd_entries(gammas, avg)) out.push_back(std::move(s));
    } else if (e == EstimatorKind::drr) {
      for (auto& s : drr_entries(config.lambda)) out.push_back(std::move(s));
    } else {
      out.push_back(dols_entry());
    }
  }
  return out;
}

std::vector<EstimatorSpec> specs_of(const std::vector<SpecEntry>& entries) {
  std::vector<EstimatorSpec> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.spec);
  return out;
}

ResultRow base_row(const ExperimentConfig& config, std::size_t n, std::size_t d, const NodeChoice& node,
                   std::optional<double> alpha, const SpecEntry& entry) {
  ResultRow row;
  row.experiment_id = config.experiment_id;
  row.n = n;
  row.d = d;
  row.M = node.M;
  row.beta = node.beta;
  row.gamma = entry.gamma;
  row.lambda = entry.lambda;
  if (entry.kind == EstimatorKind::dols) row.lambda = 0.0;
  row.alpha = alpha;
  row.estimator = to_string(entry.kind);
  row.averaging = entry.averaging ? entry.averaging->name() : std::string();
  return row;
}

void fill_risk(ResultRow& row, const RiskReport& rep, std::size_t replicates) {
  row.replicates = replicates;
  row.diverged_count = rep.diverged;
  if (rep.aborted) return;
  row.risk_mean = rep.excess_risk_mean;
  row.risk_stderr = rep.excess_risk_stderr;
}

// Bound columns: full-average DSGD carries the upper (when its stepsize
// hypothesis holds) and lower bounds; every estimator gets its k*.
void attach_bounds(ResultRow& row, const SpecEntry& entry, const ProblemInstance& instance,
                   std::size_t n, std::size_t M, const BoundConstants& constants) {
  const Spectrum& spectrum = instance.spectrum;
  if (entry.kind == EstimatorKind::dsgd) {
    row.k_star = effective_dim_sgd(spectrum, n, M, *entry.gamma);
    if (entry.averaging->kind != Averaging::Kind::full) return;
    try {
      row.upper_bound = dsgd_upper_bound(instance, n, M, *entry.gamma, constants).upper->total;
    } catch (const HypothesisViolated&) {
    }
    row.lower_bound = dsgd_lower_bound(instance, n, M, *entry.gamma, constants).lower->total;
  } else {
    row.k_star = effective_dim_rr(spectrum, n, M, row.lambda.value_or(0.0), constants.b);
  }
}

McOptions mc_options(unsigned threads) {
  McOptions o;
  o.threads = threads;
  return o;
}

std::string fmt_g(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

ExperimentResult m_sweep_impl(const ExperimentConfig& config, unsigned threads, bool overlay) {
  ExperimentResult result;
  const auto& constants = config.constants;
  // Plot series keyed by (n, alpha, label).
  struct Curve {
    std::vector<double> M, risk, upper, lower;
  };
  std::map<std::size_t, std::map<std::string, Curve>> curves;

  for (std::size_t ai = 0; ai < std::max<std::size_t>(1, config.alpha.size()); ++ai) {
    for (std::size_t n : config.n) {
      for (const auto& node : node_grid(config, n)) {
        const Spectrum spectrum = build_spectrum(config, n, node.M);
        auto instances = build_instances(config, spectrum);
        auto& [alpha, instance] = instances[ai];
        const auto entries = full_grid(config, stepsize_grid(config, spectrum.trace()));
        const auto specs = specs_of(entries);
        const Seed seed = evaluation_seed(config.seed, n);
        const auto reports = mc_excess_risk_grid(instance, n, node.M, specs, config.replicates,
                                                 seed, mc_options(threads));
        for (std::size_t k = 0; k < entries.size(); ++k) {
          const auto& entry = entries[k];
          ResultRow row = base_row(config, n, spectrum.dim(), node, alpha, entry);
          fill_risk(row, reports[k], config.replicates);
          if (overlay && entry.kind == EstimatorKind::dsgd && !reports[k].aborted) {
            try {
              const auto bv = mc_bias_variance(instance, n, node.M, std::get<DsgdSpec>(entry.spec).config,
                                               config.replicates, seed, mc_options(threads));
              row.bias_mc = bv.bias_mc;
              row.var_mc = bv.variance_mc;
            } catch (const DivergenceError&) {
            }
          }
          attach_bounds(row, entry, instance, n, node.M, constants);

          std::string key = entry.label();
          if (alpha) key = "a=" + fmt_g(*alpha) + " " + key;
          auto& c = curves[n][key];
          c.M.push_back(static_cast<double>(node.M));
          c.risk.push_back(row.risk_mean.value_or(NAN));
          c.upper.push_back(row.upper_bound.value_or(NAN));
          c.lower.push_back(row.lower_bound.value_or(NAN));
          result.rows.push_back(std::move(row));
        }
      }
    }
  }

  // Rows by (alpha, beta); ties keep grid order (n, then estimator).
  std::stable_sort(result.rows.begin(), result.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    const double aa = a.alpha.value_or(-1.0), ba = b.alpha.value_or(-1.0);
    if (aa != ba) return aa < ba;
    const double ab = a.beta.value_or(static_cast<double>(a.M));
    const double bb = b.beta.value_or(static_cast<double>(b.M));
    return ab < bb;
  });

  for (const auto& [n, by_key] : curves) {
    LinePlot plot;
    plot.file_stem = config.experiment_id + "_n" + std::to_string(n);
    plot.title = (overlay ? "Risk and bounds vs M, n = " : "Excess risk vs M, n = ") + std::to_string(n);
    plot.x_label = "M";
    plot.y_label = "excess risk";
    plot.log_x = true;
    plot.log_y = true;
    for (const auto& [key, c] : by_key) {
      plot.series.push_back({key, c.M, c.risk, false});
      if (overlay && std::any_of(c.upper.begin(), c.upper.end(), [](double v) { return std::isfinite(v); }))
        plot.series.push_back({key + " upper", c.M, c.upper, true});
      if (overlay && std::any_of(c.lower.begin(), c.lower.end(), [](double v) { return std::isfinite(v); }))
        plot.series.push_back({key + " lower", c.M, c.lower, true});
    }
    result.artifacts.plots.push_back(std::move(plot));
  }
  return result;
}

// Index of the smallest mean risk among usable reports; ties keep the first.
std::optional<std::size_t> best_index(const std::vector<RiskReport>& reports, std::size_t begin,
                                      std::size_t end) {
  std::optional<std::size_t> best;
  for (std::size_t k = begin; k < end; ++k) {
    if (reports[k].aborted || !std::isfinite(reports[k].excess_risk_mean)) continue;
    if (!best || reports[k].excess_risk_mean < reports[*best].excess_risk_mean) best = k;
  }
  return best;
}

std::size_t exponent_nodes(const ExperimentConfig& config, std::size_t n) {
  const double e = config.node_exponent.value_or(1.0 / 3.0);
  const long long m = ceil_pow(static_cast<double>(n), e);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1LL, m)), 1, n);
}

}  // namespace

std::size_t nodes_for_beta(std::size_t n, double beta) {
  if (n < 1) throw InvalidArgument("nodes_for_beta: n must be >= 1");
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("nodes_for_beta: beta must lie in [0, 1]");
  const long long m = ceil_pow(static_cast<double>(n), beta);
  return std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1LL, m)));
}

std::vector<NodeChoice> node_grid(const ExperimentConfig& config, std::size_t n) {
  std::vector<NodeChoice> out;
  if (config.kind == ExperimentKind::sample_complexity || config.kind == ExperimentKind::rate_slope) {
    out.push_back({config.node_exponent, exponent_nodes(config, n)});
    return out;
  }
  if (!config.nodes.empty()) {
    for (std::size_t m : config.nodes) {
      if (m > n) {
        std::ostringstream os;
        os << "config: M = " << m << " exceeds n = " << n;
        throw ConfigError("M", os.str());
      }
      out.push_back({std::nullopt, m});
    }
    return out;
  }
  for (double b : config.beta) out.push_back({b, nodes_for_beta(n, b)});
  return out;
}

Spectrum build_spectrum(const ExperimentConfig& config, std::size_t n, std::size_t node_count) {
  switch (config.spectrum) {
    case SpectrumChoice::polynomial:
      return build_polynomial_spectrum(static_cast<long long>(config.d), config.r);
    case SpectrumChoice::spiked: {
      const std::size_t N = config.node_samples.value_or(n / node_count);
      return build_spiked_spectrum(static_cast<long long>(N), config.q, config.r);
    }
    case SpectrumChoice::explicit_values:
      return Spectrum(config.eigenvalues);
  }
  throw InvalidArgument("unknown spectrum choice");
}

std::vector<std::pair<std::optional<double>, ProblemInstance>> build_instances(
    const ExperimentConfig& config, const Spectrum& spectrum) {
  std::vector<std::pair<std::optional<double>, ProblemInstance>> out;
  if (!config.target.empty()) {
    Vector w = Eigen::Map<const Vector>(config.target.data(), static_cast<Eigen::Index>(config.target.size()));
    out.emplace_back(std::nullopt, make_instance(spectrum, std::move(w), config.noise_std, config.law));
    return out;
  }
  for (double a : config.alpha)
    out.emplace_back(a, make_power_instance(spectrum, a, config.noise_std, config.law));
  return out;
}

std::vector<double> stepsize_grid(const ExperimentConfig& config, double trace) {
  if (!config.gamma.empty()) return config.gamma;
  std::vector<double> out;
  for (double s : config.gamma_scale) out.push_back(s / trace);
  return out;
}

Seed evaluation_seed(Seed master, std::size_t n) { return derive_seed(master, {kEvalStream, n}); }
Seed tuning_seed(Seed master, std::size_t n) { return derive_seed(master, {kTuneStream, n}); }

ExperimentResult run_m_sweep(const ExperimentConfig& config, unsigned threads) {
  if (config.kind != ExperimentKind::m_sweep && config.kind != ExperimentKind::bounds_overlay)
    throw InvalidArgument("run_m_sweep: config kind is " + to_string(config.kind));
  return m_sweep_impl(config, threads, config.kind == ExperimentKind::bounds_overlay);
}

ExperimentResult run_sample_complexity(const ExperimentConfig& config, unsigned threads) {
  if (config.kind != ExperimentKind::sample_complexity)
    throw InvalidArgument("run_sample_complexity: config kind is " + to_string(config.kind));
  ExperimentResult result;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> curves;

  for (std::size_t ai = 0; ai < std::max<std::size_t>(1, config.alpha.size()); ++ai) {
    for (std::size_t n : config.n) {
      const NodeChoice node = node_grid(config, n).front();
      const Spectrum spectrum = build_spectrum(config, n, node.M);
      auto instances = build_instances(config, spectrum);
      auto& [alpha, instance] = instances[ai];
      const auto gammas = stepsize_grid(config, spectrum.trace());

      // Candidate groups in row order; each group is tuned independently.
      std::vector<std::vector<SpecEntry>> groups;
      for (EstimatorKind e : config.estimators) {
        if (e == EstimatorKind::dsgd)
          for (const auto& avg : config.averaging) groups.push_back(dsgd_entries(gammas, avg));
        else if (e == EstimatorKind::drr)
          groups.push_back(drr_entries(config.lambda));
        else
          groups.push_back({dols_entry()});
      }

      std::vector<SpecEntry> chosen;
      const bool needs_tuning =
          std::any_of(groups.begin(), groups.end(), [](const auto& g) { return g.size() > 1; });
      if (needs_tuning) {
        std::vector<SpecEntry> all;
        std::vector<std::size_t> offsets{0};
        for (const auto& g : groups) {
          all.insert(all.end(), g.begin(), g.end());
          offsets.push_back(all.size());
        }
        const auto tuned = mc_excess_risk_grid(instance, n, node.M, specs_of(all),
                                               config.tuning_replicates, tuning_seed(config.seed, n),
                                               mc_options(threads));
        for (std::size_t g = 0; g < groups.size(); ++g) {
          const auto best = best_index(tuned, offsets[g], offsets[g + 1]);
          chosen.push_back(all[best.value_or(offsets[g])]);
        }
      } else {
        for (const auto& g : groups) chosen.push_back(g.front());
      }

      const auto reports = mc_excess_risk_grid(instance, n, node.M, specs_of(chosen), config.replicates,
                                               evaluation_seed(config.seed, n), mc_options(threads));
      for (std::size_t k = 0; k < chosen.size(); ++k) {
        ResultRow row = base_row(config, n, spectrum.dim(), node, alpha, chosen[k]);
        fill_risk(row, reports[k], config.replicates);
        attach_bounds(row, chosen[k], instance, n, node.M, config.constants);
        std::string key = to_string(chosen[k].kind);
        if (chosen[k].averaging) key += "-" + chosen[k].averaging->name();
        key += " #" + std::to_string(k);
        if (alpha) key = "a=" + fmt_g(*alpha) + " " + key;
        curves[key].first.push_back(static_cast<double>(n));
        curves[key].second.push_back(row.risk_mean.value_or(NAN));
        result.rows.push_back(std::move(row));
      }
    }
  }

  LinePlot plot;
  plot.file_stem = config.experiment_id + "_sample_complexity";
  plot.title = "Tuned excess risk vs n";
  plot.x_label = "n";
  plot.y_label = "excess risk";
  plot.log_x = plot.log_y = true;
  for (const auto& [key, xy] : curves) plot.series.push_back({key, xy.first, xy.second, false});
  result.artifacts.plots.push_back(std::move(plot));
  return result;
}

RateSlopeResult run_rate_slope(const ExperimentConfig& config, unsigned threads) {
  if (config.kind != ExperimentKind::rate_slope)
    throw InvalidArgument("run_rate_slope: config kind is " + to_string(config.kind));
  if (config.spectrum != SpectrumChoice::polynomial)
    throw InvalidArgument("run_rate_slope: requires the polynomial spectrum");
  if (config.n.size() < 3) throw InvalidArgument("run_rate_slope: needs at least 3 values of n");

  RateSlopeResult out;
  out.predicted_slope = -(config.r + 1.0) / (config.r + 2.0);
  const Spectrum spectrum = build_spectrum(config, config.n.front(), 1);
  auto instances = build_instances(config, spectrum);
  auto& [alpha, instance] = instances.front();
  const auto gammas = stepsize_grid(config, spectrum.trace());
  const Averaging avg = config.averaging.front();

  // One stepsize for the whole grid: the one minimizing sum_n log risk on
  // the tuning replicates.
  double gamma = gammas.front();
  if (gammas.size() > 1) {
    std::optional<double> best_score;
    for (double g : gammas) {
      const std::vector<EstimatorSpec> spec{DsgdSpec{SgdConfig(g, avg)}};
      double score = 0.0;
      bool usable = true;
      for (std::size_t n : config.n) {
        const auto rep = mc_excess_risk_grid(instance, n, node_grid(config, n).front().M, spec,
                                             config.tuning_replicates, tuning_seed(config.seed, n),
                                             mc_options(threads))
                             .front();
        if (rep.aborted) {
          usable = false;
          break;
        }
        score += std::log(std::max(rep.excess_risk_mean, DBL_MIN));
      }
      if (usable && (!best_score || score < *best_score)) {
        best_score = score;
        gamma = g;
      }
    }
  }
  out.tuned_gamma = gamma;

  const SpecEntry entry{DsgdSpec{SgdConfig(gamma, avg)}, EstimatorKind::dsgd, gamma, {}, avg};
  std::vector<double> log_n, log_risk, ns, risks;
  for (std::size_t n : config.n) {
    const NodeChoice node = node_grid(config, n).front();
    const auto rep = mc_excess_risk_grid(instance, n, node.M, std::vector<EstimatorSpec>{entry.spec},
                                         config.replicates, evaluation_seed(config.seed, n),
                                         mc_options(threads))
                         .front();
    if (rep.aborted) {
      std::ostringstream os;
      os << "rate_slope: DSGD diverged at n = " << n << " (gamma " << gamma << ")";
      throw DivergenceError(0, os.str());
    }
    ResultRow row = base_row(config, n, spectrum.dim(), node, alpha, entry);
    fill_risk(row, rep, config.replicates);
    attach_bounds(row, entry, instance, n, node.M, config.constants);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_risk.push_back(std::log(std::max(rep.excess_risk_mean, DBL_MIN)));
    ns.push_back(static_cast<double>(n));
    risks.push_back(rep.excess_risk_mean);
    out.rows.push_back(std::move(row));
  }
  out.fitted_slope = fit_slope(log_n, log_risk);

  const double mean_x = pairwise_sum(log_n) / static_cast<double>(log_n.size());
  const double mean_y = pairwise_sum(log_risk) / static_cast<double>(log_risk.size());
  std::vector<double> fitted, predicted;
  for (double x : log_n) {
    fitted.push_back(std::exp(mean_y + out.fitted_slope * (x - mean_x)));
    predicted.push_back(std::exp(mean_y + out.predicted_slope * (x - mean_x)));
  }
  LinePlot plot;
  plot.file_stem = config.experiment_id + "_rate";
  plot.title = "DSGD risk vs n, fitted slope " + fmt_g(out.fitted_slope);
  plot.x_label = "n";
  plot.y_label = "excess risk";
  plot.log_x = plot.log_y = true;
  plot.series.push_back({"measured", ns, risks, false});
  plot.series.push_back({"least-squares fit", ns, fitted, true});
  plot.series.push_back({"slope " + fmt_g(out.predicted_slope), ns, predicted, true});
  out.artifacts.plots.push_back(std::move(plot));
  out.artifacts.summary["fitted_slope"] = out.fitted_slope;
  out.artifacts.summary["predicted_slope"] = out.predicted_slope;
  out.artifacts.summary["tuned_gamma"] = gamma;
  return out;
}

ExperimentResult run_real_data(const ExperimentConfig& config, unsigned /*threads*/) {
  if (config.kind != ExperimentKind::real_data)
    throw InvalidArgument("run_real_data: config kind is " + to_string(config.kind));
  if (config.train_path.empty()) throw ConfigError("train_path", "config: 'train_path' is required for real_data");
  if (config.eval_path.empty()) throw ConfigError("eval_path", "config: 'eval_path' is required for real_data");

  Dataset train = load_feature_file(config.train_path, config.format);
  Dataset eval = load_feature_file(config.eval_path, config.format);
  const std::size_t d = std::max(train.dim(), eval.dim());
  train = pad_features(train, d);
  eval = pad_features(eval, d);

  ExperimentResult result;
  if (config.scale_features) {
    const double scale = std::sqrt(train.covariates.rowwise().squaredNorm().mean());
    if (scale > 0.0) {
      train.covariates /= scale;
      eval.covariates /= scale;
    }
    result.artifacts.summary["feature_scale"] = scale;
  }

  const std::vector<std::size_t> ns = config.n.empty() ? std::vector<std::size_t>{train.size()} : config.n;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> curves;
  for (std::size_t n : ns) {
    if (n > train.size()) {
      std::ostringstream os;
      os << "config: n = " << n << " exceeds the " << train.size() << " training rows";
      throw ConfigError("n", os.str());
    }
    const auto rows = static_cast<Eigen::Index>(n);
    const Dataset data(train.covariates.topRows(rows), train.responses.head(rows), train.source);
    // Empirical second moment stands in for Tr(H) when stepsizes are scaled.
    const double trace = data.covariates.rowwise().squaredNorm().mean();
    const auto entries = full_grid(config, stepsize_grid(config, trace > 0.0 ? trace : 1.0));

    for (const auto& node : node_grid(config, n)) {
      for (const auto& entry : entries) {
        ResultRow row = base_row(config, n, d, node, std::nullopt, entry);
        row.replicates = 1;
        try {
          const auto est = fit_estimator(entry.spec, data, node.M);
          const Vector residual = eval.covariates * est.coefficients - eval.responses;
          std::vector<double> sq(static_cast<std::size_t>(residual.size()));
          for (Eigen::Index i = 0; i < residual.size(); ++i) sq[static_cast<std::size_t>(i)] = residual[i] * residual[i];
          const auto s = summarize(sq);
          row.risk_mean = s.mean;
          row.risk_stderr = s.std_error;
        } catch (const DivergenceError&) {
          row.diverged_count = 1;
        } catch (const SingularGramError& e) {
          result.artifacts.notes.push_back(row.estimator + " at n=" + std::to_string(n) + ": " + e.what());
        }
        std::string key = "M=" + std::to_string(node.M) + " " + entry.label();
        curves[key].first.push_back(static_cast<double>(n));
        curves[key].second.push_back(row.risk_mean.value_or(NAN));
        result.rows.push_back(std::move(row));
      }
    }
  }

  LinePlot plot;
  plot.file_stem = config.experiment_id + "_holdout";
  plot.title = "Held-out MSE vs n";
  plot.x_label = "n";
  plot.y_label = "held-out MSE";
  plot.log_x = ns.size() > 1;
  for (const auto& [key, xy] : curves) plot.series.push_back({key, xy.first, xy.second, false});
  result.artifacts.plots.push_back(std::move(plot));
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads) {
  switch (config.kind) {
    case ExperimentKind::m_sweep:
    case ExperimentKind::bounds_overlay:
      return run_m_sweep(config, threads);
    case ExperimentKind::sample_complexity:
      return run_sample_complexity(config, threads);
    case ExperimentKind::rate_slope: {
      auto r = run_rate_slope(config, threads);
      return {std::move(r.rows), std::move(r.artifacts)};
    }
    case ExperimentKind::real_data:
      return run_real_data(config, threads);
  }
  throw InvalidArgument("unknown experiment kind");
}

std::string bounds_table(const ExperimentConfig& config) {
  if (config.kind == ExperimentKind::real_data)
    throw InvalidArgument("bounds: real_data has no population quantities to bound");
  const auto& constants = config.constants;
  std::ostringstream os;
  os << std::setprecision(6);
  os << "# constants: tau=" << constants.tau << " theta=" << constants.theta << " b=" << constants.b
     << " c=" << constants.c << " c_prime=" << constants.c_prime << " c_b=" << constants.c_b
     << " c_v=" << constants.c_v << "\n";
  os << "# DSGD rows: k*, V_k*, full-average upper and lower bounds, tail-average upper bound\n";
  os << "# DRR rows: k*_RR and the ridge lower bound\n";
  os << std::left << std::setw(10) << "alpha" << std::setw(8) << "n" << std::setw(8) << "d"
     << std::setw(6) << "M" << std::setw(6) << "est" << std::setw(14) << "gamma/lambda" << std::setw(8)
     << "k*" << std::setw(14) << "V*" << std::setw(14) << "upper" << std::setw(14) << "lower"
     << std::setw(14) << "tail_upper" << "\n";

  const auto cell = [](const std::optional<double>& v) {
    std::ostringstream c;
    c << std::setprecision(6);
    if (v) c << *v; else c << "-";
    return c.str();
  };
  std::vector<std::string> warnings;
  for (std::size_t ai = 0; ai < std::max<std::size_t>(1, config.alpha.size()); ++ai) {
    for (std::size_t n : config.n) {
      for (const auto& node : node_grid(config, n)) {
        const Spectrum spectrum = build_spectrum(config, n, node.M);
        auto instances = build_instances(config, spectrum);
        auto& [alpha, instance] = instances[ai];
        const std::string a = alpha ? fmt_g(*alpha) : "w*";
        for (double g : stepsize_grid(config, spectrum.trace())) {
          std::optional<double> upper, tail;
          const auto low = dsgd_lower_bound(instance, n, node.M, g, constants);
          try {
            upper = dsgd_upper_bound(instance, n, node.M, g, constants).upper->total;
          } catch (const HypothesisViolated&) {
          }
          try {
            tail = tail_dsgd_upper_bound(instance, n, node.M, g, std::nullopt, std::nullopt, constants).upper->total;
          } catch (const HypothesisViolated&) {
          }
          os << std::left << std::setw(10) << a << std::setw(8) << n << std::setw(8) << spectrum.dim()
             << std::setw(6) << node.M << std::setw(6) << "dsgd" << std::setw(14) << cell(g)
             << std::setw(8) << low.k_star << std::setw(14) << cell(low.v_star) << std::setw(14)
             << cell(upper) << std::setw(14) << cell(low.lower->total) << std::setw(14) << cell(tail) << "\n";
        }
        for (double l : config.lambda) {
          const auto rep = drr_lower_bound(instance, n, node.M, l, constants);
          os << std::left << std::setw(10) << a << std::setw(8) << n << std::setw(8) << spectrum.dim()
             << std::setw(6) << node.M << std::setw(6) << "drr" << std::setw(14) << cell(l)
             << std::setw(8) << rep.k_star << std::setw(14) << cell(rep.v_star) << std::setw(14) << "-"
             << std::setw(14) << cell(rep.lower->total) << std::setw(14) << "-" << "\n";
          for (const auto& w : rep.warnings) warnings.push_back(w);
        }
      }
    }
  }
  std::sort(warnings.begin(), warnings.end());
  warnings.erase(std::unique(warnings.begin(), warnings.end()), warnings.end());
  for (const auto& w : warnings) os << "# warning: " << w << "\n";
  return os.str();
}

}  // namespace dregsim
