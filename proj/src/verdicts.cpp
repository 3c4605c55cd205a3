#include <algorithm>
#include <cmath>
#include <sstream>

#include "cutoff/suite.hpp"

namespace cutoff {

InequalityVerdict make_verdict(std::string name, double lhs, double rhs, double tolerance, std::string context) {
  InequalityVerdict v;
  v.name = std::move(name);
  v.lhs = lhs;
  v.rhs = rhs;
  v.slack = rhs - lhs;
  v.tolerance = tolerance;
  v.pass = v.slack >= -tolerance;
  v.context = std::move(context);
  v.samples = 1;
  return v;
}

void keep_worst(InequalityVerdict& worst, const InequalityVerdict& candidate) {
  const int total = worst.samples + candidate.samples;
  // NaN slack never counts as tighter; it shows up as a failed pass flag instead.
  if (candidate.slack < worst.slack || (!candidate.pass && worst.pass)) worst = candidate;
  worst.samples = total;
}

std::vector<double> automatic_time_grid(const Semigroup& S, const MetricData& metric) {
  const double quarter = mixing_time(S, 0.25);
  std::vector<double> grid;
  for (int k = 0; k <= 8; ++k) grid.push_back(quarter * k / 4.0);
  grid.push_back(metric.diameter / 4.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

namespace {

std::string with_start(const std::string& context, State o) {
  std::ostringstream s;
  s << context << ";o=" << o;
  return s.str();
}

}  // namespace

std::vector<InequalityVerdict> run_theorem_suite(const ChainFacts& facts, const SuiteConfig& config) {
  const Semigroup& S = facts.semigroup;
  const MetricData& metric = facts.metric;
  const double t_rel = facts.spectral.t_rel;
  const std::vector<double> times = config.times.empty() ? automatic_time_grid(S, metric) : config.times;
  std::vector<InequalityVerdict> out;

  // Entropic upper bound at every (eps, t).
  for (double eps : config.eps)
    for (double t : times) out.push_back(entropic_upper_bound(S, t_rel, t, eps));

  // Entropic lower bound on every start's heat-kernel row, at t_mix(1 - eps) and on the grid.
  for (double eps : config.eps) {
    std::vector<double> at = times;
    at.push_back(mixing_time(S, 1.0 - eps));
    for (double t : at) {
      const std::vector<Distribution> rows = S.rows(t);
      InequalityVerdict worst;
      bool first = true;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        InequalityVerdict v = entropic_lower_bound_check(rows[i].span(), S.pi().span(), eps);
        std::ostringstream ctx;
        ctx << v.context << ";t=" << t;
        v.context = with_start(ctx.str(), S.starts()[i]);
        if (first) {
          worst = v;
          first = false;
        } else if (!v.vacuous && (worst.vacuous || v.slack < worst.slack)) {
          const int n = worst.samples + 1;
          worst = v;
          worst.samples = n;
        } else {
          ++worst.samples;
        }
      }
      out.push_back(worst);
    }
  }

  // Window bound, eps in (0, 1/2).
  for (double eps : config.eps)
    if (eps < 0.5) out.push_back(cutoff_window_bound(S, t_rel, eps));

  // Local concentration with the best certified curvature constant.
  const double kappa = facts.curvature.best_kappa();
  if (kappa >= 0.0) {
    std::vector<double> at{1.0, mixing_time(S, 0.25)};
    for (double t : at)
      out.push_back(local_concentration_sweep(S.matrix(), metric, t, kappa, config.concentration_samples,
                                              config.seed + static_cast<std::uint64_t>(t * 1000.0), S.tol()));
  }

  // Logarithmic gradient estimate at every grid time past diam/4.
  for (double t : times)
    if (t >= metric.diameter / 4.0) out.push_back(log_gradient_bound_check(S, metric, t));

  for (double eps : config.eps) out.push_back(diameter_bound_check(S, metric, t_rel, eps));

  if (facts.curvature.nonnegative())
    for (double eps : config.eps) {
      const VarentropyVerdicts v = varentropy_bound_check(S, metric, facts.curvature, eps);
      out.push_back(v.constant_form);
      out.push_back(v.composed_form);
    }
  return out;
}

bool all_pass(const std::vector<InequalityVerdict>& verdicts) {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const InequalityVerdict& v) { return v.pass; });
}

}  // namespace cutoff
