#include "dregsim/risk_eval.hpp"

#include <cmath>
#include <sstream>

#include "dregsim/errors.hpp"
#include "dregsim/parallel.hpp"
#include "dregsim/stats.hpp"

namespace dregsim {

namespace {

double h_norm_sq(const Vector& v, const Vector& eigenvalues) {
  return (eigenvalues.array() * v.array().square()).sum();
}

struct ReplicateOutcome {
  double risk = 0.0;
  bool diverged = false;
};

RiskReport reduce(const std::vector<ReplicateOutcome>& outcomes) {
  RiskReport rep;
  std::vector<double> risks;
  risks.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    if (o.diverged)
      ++rep.diverged;
    else
      risks.push_back(o.risk);
  }
  rep.replicates = risks.size();
  rep.aborted = 2 * rep.diverged > outcomes.size();
  const auto s = summarize(risks);
  rep.excess_risk_mean = s.mean;
  rep.excess_risk_stderr = s.std_error;
  return rep;
}

void check_replicates(std::size_t replicates) {
  if (replicates < 2) throw InvalidArgument("Monte Carlo: replicates must be >= 2");
}

Seed seed_for(Seed master, std::size_t r, const McOptions& options) {
  return replicate_seed(master, options.identical_replicates ? 0 : r);
}

}  // namespace

double excess_risk_exact(const Vector& estimate, const ProblemInstance& instance) {
  if (static_cast<std::size_t>(estimate.size()) != instance.dim()) {
    std::ostringstream os;
    os << "excess_risk_exact: estimate has dimension " << estimate.size() << ", instance has "
       << instance.dim();
    throw InvalidArgument(os.str());
  }
  return 0.5 * h_norm_sq(estimate - instance.target, instance.spectrum.eigenvalues());
}

double excess_risk_exact(const EstimatorOutput& estimate, const ProblemInstance& instance) {
  return excess_risk_exact(estimate.coefficients, instance);
}

EstimatorOutput fit_estimator(const EstimatorSpec& spec, const Dataset& data,
                              std::size_t node_count) {
  return std::visit(
      [&](const auto& s) -> EstimatorOutput {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DsgdSpec>)
          return run_dsgd(data, node_count, s.config);
        else if constexpr (std::is_same_v<T, DrrSpec>)
          return run_drr(data, node_count, s.config);
        else
          return run_dols(data, node_count);
      },
      spec);
}

std::vector<RiskReport> mc_excess_risk_grid(const ProblemInstance& instance, std::size_t n,
                                            std::size_t node_count,
                                            std::span<const EstimatorSpec> specs,
                                            std::size_t replicates, Seed seed,
                                            const McOptions& options) {
  check_replicates(replicates);
  if (node_count < 1 || node_count > n) throw InvalidArgument("Monte Carlo: need 1 <= M <= n");
  std::size_t path_specs = 0;
  for (const auto& s : specs)
    if (const auto* drr = std::get_if<DrrSpec>(&s); drr && drr->config.lambda() > 0.0) ++path_specs;
  const bool use_paths = path_specs > 1;
  const std::size_t per = n / node_count;

  // outcomes[spec][replicate]
  std::vector<std::vector<ReplicateOutcome>> outcomes(specs.size(),
                                                      std::vector<ReplicateOutcome>(replicates));
  parallel_for(replicates, options.threads, [&](std::size_t r) {
    const Dataset data = sample_dataset(instance, n, seed_for(seed, r, options));
    std::vector<RidgePath> paths;
    for (std::size_t k = 0; k < specs.size(); ++k) {
      const auto* drr = std::get_if<DrrSpec>(&specs[k]);
      if (use_paths && drr && drr->config.lambda() > 0.0) {
        if (paths.empty()) {
          paths.reserve(node_count);
          for (std::size_t m = 0; m < node_count; ++m) {
            const auto start = static_cast<Eigen::Index>(m * per);
            const auto rows = static_cast<Eigen::Index>(per);
            paths.emplace_back(data.covariates.middleRows(start, rows),
                               data.responses.segment(start, rows));
          }
        }
        Vector sum = Vector::Zero(static_cast<Eigen::Index>(data.dim()));
        for (const auto& p : paths) sum += p.solve(drr->config.lambda());
        outcomes[k][r].risk = excess_risk_exact(Vector(sum / static_cast<double>(node_count)), instance);
        continue;
      }
      try {
        outcomes[k][r].risk = excess_risk_exact(fit_estimator(specs[k], data, node_count), instance);
      } catch (const DivergenceError&) {
        outcomes[k][r].diverged = true;
      }
    }
  });

  std::vector<RiskReport> reports;
  reports.reserve(specs.size());
  for (const auto& o : outcomes) reports.push_back(reduce(o));
  return reports;
}

RiskReport mc_excess_risk(const ProblemInstance& instance, std::size_t n, std::size_t node_count,
                          const EstimatorSpec& spec, std::size_t replicates, Seed seed,
                          const McOptions& options) {
  auto reports = mc_excess_risk_grid(instance, n, node_count, std::span(&spec, 1), replicates,
                                     seed, options);
  RiskReport rep = reports.front();
  if (rep.aborted) {
    std::ostringstream os;
    os << "Monte Carlo: estimator diverged in " << rep.diverged << " of " << replicates
       << " replicates";
    throw DivergenceError(0, os.str());
  }
  return rep;
}

RiskReport mc_bias_variance(const ProblemInstance& instance, std::size_t n,
                            std::size_t node_count, const SgdConfig& config,
                            std::size_t replicates, Seed seed, const McOptions& options) {
  check_replicates(replicates);
  struct Sample {
    double risk = 0.0, bias = 0.0, variance = 0.0, cross = 0.0, residual = 0.0;
    bool diverged = false;
  };
  std::vector<Sample> samples(replicates);
  const Vector& lambda = instance.spectrum.eigenvalues();

  parallel_for(replicates, options.threads, [&](std::size_t r) {
    const Dataset data = sample_dataset(instance, n, seed_for(seed, r, options));
    try {
      const auto deco = decompose_dsgd(data, instance, node_count, config);
      auto& s = samples[r];
      s.risk = excess_risk_exact(deco.estimate, instance);
      s.bias = 0.5 * h_norm_sq(deco.bias, lambda);
      s.variance = 0.5 * h_norm_sq(deco.variance, lambda);
      s.cross = (lambda.array() * deco.bias.array() * deco.variance.array()).sum();
      s.residual = std::abs(s.risk - 0.5 * h_norm_sq(deco.bias + deco.variance, lambda));
    } catch (const DivergenceError&) {
      samples[r].diverged = true;
    }
  });

  std::vector<double> risk, bias, var, cross;
  double residual = 0.0;
  std::size_t diverged = 0;
  for (const auto& s : samples) {
    if (s.diverged) {
      ++diverged;
      continue;
    }
    risk.push_back(s.risk);
    bias.push_back(s.bias);
    var.push_back(s.variance);
    cross.push_back(s.cross);
    residual = std::max(residual, s.residual);
  }
  if (2 * diverged > replicates) {
    std::ostringstream os;
    os << "Monte Carlo: DSGD diverged in " << diverged << " of " << replicates << " replicates";
    throw DivergenceError(0, os.str());
  }

  RiskReport rep;
  const auto sr = summarize(risk), sb = summarize(bias), sv = summarize(var), sc = summarize(cross);
  rep.excess_risk_mean = sr.mean;
  rep.excess_risk_stderr = sr.std_error;
  rep.bias_mc = sb.mean;
  rep.bias_stderr = sb.std_error;
  rep.variance_mc = sv.mean;
  rep.variance_stderr = sv.std_error;
  rep.cross_mc = sc.mean;
  rep.cross_stderr = sc.std_error;
  rep.identity_residual = residual;
  rep.replicates = risk.size();
  rep.diverged = diverged;
  return rep;
}

}  // namespace dregsim
