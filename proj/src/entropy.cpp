#include "cutoff/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>

#include "cutoff/spectral.hpp"

namespace cutoff {

std::optional<std::vector<Distribution>> MemoryRowCache::load(double t, double tol, std::span<const State> starts) {
  std::shared_lock lock(mutex_);
  const auto it = rows_.find(Key{t, tol, {starts.begin(), starts.end()}});
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

void MemoryRowCache::store(double t, double tol, std::span<const State> starts, const std::vector<Distribution>& rows) {
  std::unique_lock lock(mutex_);
  rows_.insert_or_assign(Key{t, tol, {starts.begin(), starts.end()}}, rows);
}

namespace {

std::vector<State> default_starts(std::size_t n, std::vector<State> starts) {
  if (!starts.empty()) return starts;
  std::vector<State> all(n);
  std::iota(all.begin(), all.end(), State{0});
  return all;
}

std::string fmt_context(std::initializer_list<std::pair<const char*, double>> items) {
  std::ostringstream s;
  s.precision(10);
  bool first = true;
  for (const auto& [k, v] : items) {
    if (!first) s << ';';
    s << k << '=' << v;
    first = false;
  }
  return s.str();
}

}  // namespace

Semigroup::Semigroup(const StochasticMatrix& P, std::vector<State> starts, double tol, unsigned threads,
                     std::shared_ptr<RowCache> cache)
    : Semigroup(P, stationary(P), std::move(starts), tol, threads, std::move(cache)) {}

Semigroup::Semigroup(const StochasticMatrix& P, Distribution pi, std::vector<State> starts, double tol,
                     unsigned threads, std::shared_ptr<RowCache> cache)
    : P_(&P),
      pi_(std::move(pi)),
      starts_(default_starts(P.size(), std::move(starts))),
      tol_(tol),
      threads_(threads),
      cache_(std::move(cache)) {
  if (!P.irreducible()) throw Error(ErrorCode::NotIrreducible, "mixing analysis requires an irreducible chain");
  check_tolerance(tol);
  if (pi_.size() != P.size()) throw Error(ErrorCode::DimensionMismatch, "pi has the wrong length");
}

std::vector<Distribution> Semigroup::rows(double t) const {
  if (cache_) {
    if (auto hit = cache_->load(t, tol_, starts_)) return std::move(*hit);
  }
  std::vector<Distribution> out = heat_kernel_rows(*P_, starts_, t, tol_, threads_);
  if (cache_) cache_->store(t, tol_, starts_, out);
  return out;
}

double Semigroup::worst_tv(double t) const {
  double worst = 0.0;
  for (const Distribution& row : rows(t)) worst = std::max(worst, tv_distance(row, pi_));
  return worst;
}

std::optional<double> Semigroup::remembered_mixing_time(double eps, double tol_t) const {
  std::shared_lock lock(memo_mutex_);
  const auto it = mixing_memo_.find({eps, tol_t});
  if (it == mixing_memo_.end()) return std::nullopt;
  return it->second;
}

void Semigroup::remember_mixing_time(double eps, double tol_t, double value) const {
  std::unique_lock lock(memo_mutex_);
  mixing_memo_[{eps, tol_t}] = value;
}

double tv_distance(std::span<const double> mu, std::span<const double> nu) {
  if (mu.size() != nu.size()) throw Error(ErrorCode::DimensionMismatch, "measures have different lengths");
  double acc = 0.0;
  for (std::size_t x = 0; x < mu.size(); ++x) acc += std::abs(mu[x] - nu[x]);
  return std::clamp(0.5 * acc, 0.0, 1.0);
}

double tv_distance(const Distribution& mu, const Distribution& nu) { return tv_distance(mu.span(), nu.span()); }

namespace {

void check_kl_inputs(std::span<const double> mu, std::span<const double> pi) {
  if (mu.size() != pi.size()) throw Error(ErrorCode::DimensionMismatch, "measures have different lengths");
  for (std::size_t x = 0; x < mu.size(); ++x)
    if (mu[x] > 0.0 && !(pi[x] > 0.0)) throw Error(ErrorCode::UnsupportedState, "mu charges a state where pi vanishes");
}

}  // namespace

double kl_divergence(std::span<const double> mu, std::span<const double> pi) {
  check_kl_inputs(mu, pi);
  double d = 0.0;
  for (std::size_t x = 0; x < mu.size(); ++x)
    if (mu[x] > 0.0) d += mu[x] * std::log(mu[x] / pi[x]);
  return std::max(d, 0.0);
}

double varentropy(std::span<const double> mu, std::span<const double> pi) {
  const double d = kl_divergence(mu, pi);
  double v = 0.0;
  for (std::size_t x = 0; x < mu.size(); ++x)
    if (mu[x] > 0.0) {
      const double c = std::log(mu[x] / pi[x]) - d;
      v += mu[x] * c * c;
    }
  return v;
}

double mixing_time(const Semigroup& S, double eps, double tol_t) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps must lie in (0,1)");
  if (auto memo = S.remembered_mixing_time(eps, tol_t)) return *memo;

  double result = 0.0;
  if (S.worst_tv(0.0) > eps) {
    double lo = 0.0;
    double hi = 1.0;
    while (S.worst_tv(hi) > eps) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e9) throw Error(ErrorCode::NoCrossing, "worst-case TV does not reach eps");
    }
    const double step = tol_t > 0.0 ? tol_t : 1e-4 * hi;
    while (hi - lo > step) {
      const double mid = 0.5 * (lo + hi);
      if (S.worst_tv(mid) > eps) lo = mid;
      else hi = mid;
    }
    result = hi;
  }
  S.remember_mixing_time(eps, tol_t, result);
  return result;
}

double mixing_time(const StochasticMatrix& P, double eps, double tol_t) {
  const Semigroup S(P);
  return mixing_time(S, eps, tol_t);
}

MixingProfile mixing_profile(const Semigroup& S, std::span<const double> times, bool per_start) {
  MixingProfile profile;
  profile.times.assign(times.begin(), times.end());
  for (double t : times) {
    const std::vector<Distribution> rows = S.rows(t);
    std::vector<double> tv(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) tv[i] = tv_distance(rows[i], S.pi());
    profile.worst_tv.push_back(tv.empty() ? 0.0 : *std::max_element(tv.begin(), tv.end()));
    if (per_start) profile.per_start_tv.push_back(std::move(tv));
  }
  return profile;
}

EntropyPoint entropy_at(const Semigroup& S, double t) {
  EntropyPoint p;
  for (const Distribution& row : S.rows(t)) {
    p.d_star = std::max(p.d_star, kl_divergence(row.span(), S.pi().span()));
    p.v_star = std::max(p.v_star, varentropy(row.span(), S.pi().span()));
  }
  return p;
}

EntropyProfile entropy_profile(const Semigroup& S, std::span<const double> times) {
  EntropyProfile profile;
  profile.times.assign(times.begin(), times.end());
  for (double t : times) {
    const EntropyPoint p = entropy_at(S, t);
    profile.d_star.push_back(p.d_star);
    profile.v_star.push_back(p.v_star);
  }
  return profile;
}

InequalityVerdict entropic_upper_bound(const Semigroup& S, double t_rel, double t, double eps) {
  const double lhs = mixing_time(S, eps);
  const double rhs = t + (t_rel / eps) * (1.0 + entropy_at(S, t).d_star);
  return make_verdict("entropic_upper_bound", lhs, rhs, 1e-9, fmt_context({{"eps", eps}, {"t", t}}));
}

InequalityVerdict entropic_lower_bound_check(std::span<const double> mu, std::span<const double> pi, double eps) {
  const double tv = tv_distance(mu, pi);
  const double d = kl_divergence(mu, pi);
  const double v = varentropy(mu, pi);
  InequalityVerdict verdict =
      make_verdict("entropic_lower_bound", d, (1.0 + std::sqrt(v)) / eps, 1e-9, fmt_context({{"eps", eps}, {"tv", tv}}));
  if (tv > 1.0 - eps) {
    verdict.vacuous = true;
    verdict.pass = true;
  }
  return verdict;
}

InequalityVerdict cutoff_window_bound(const Semigroup& S, double t_rel, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw Error(ErrorCode::InvalidArgument, "window bound needs eps in (0, 1/2)");
  const double early = mixing_time(S, 1.0 - eps);
  const double late = mixing_time(S, eps);
  const double v = entropy_at(S, early).v_star;
  const double rhs = (2.0 * t_rel / (eps * eps)) * (1.0 + std::sqrt(v));
  return make_verdict("cutoff_window", late - early, rhs, 1e-9,
                      fmt_context({{"eps", eps}, {"t_mix_eps", late}, {"t_mix_1-eps", early}}));
}

double entropic_concentration_ratio(const Semigroup& S, double t_rel, double eps) {
  const double t = mixing_time(S, eps);
  if (t <= 0.0) return std::numeric_limits<double>::infinity();
  return (1.0 + std::sqrt(entropy_at(S, t).v_star)) * t_rel / t;
}

double cutoff_time_equation(const Semigroup& S, double c, double tol_t) {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "prefactor must be positive");
  auto excess = [&](double t) {
    const EntropyPoint p = entropy_at(S, t);
    return p.d_star - c * (1.0 + std::sqrt(p.v_star));
  };
  if (excess(0.0) < 0.0) throw Error(ErrorCode::NoCrossing, "d*(0) already lies below c (1 + sqrt(V*(0)))");
  double lo = 0.0;
  double hi = 1.0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e9) throw Error(ErrorCode::NoCrossing, "no crossing found");
  }
  const double step = tol_t > 0.0 ? tol_t : 1e-4 * hi;
  while (hi - lo > step) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double log_density_lip_norm(const StochasticMatrix& P, const Distribution& pi, std::span<const double> row) {
  if (!P.symmetric_support()) throw Error(ErrorCode::AsymmetricSupport, "log-density gradient needs a symmetric support");
  const std::size_t n = P.size();
  if (row.size() != n || pi.size() != n) throw Error(ErrorCode::DimensionMismatch, "row has the wrong length");
  std::vector<double> logf(n);
  for (State x = 0; x < n; ++x) {
    if (row[x] < 1e-300) throw Error(ErrorCode::UnderflowRisk, "heat-kernel entry below 1e-300");
    logf[x] = std::log(row[x] / pi[x]);
  }
  double lip = 0.0;
  for (State x = 0; x < n; ++x)
    for (State y : P.support_row(x).targets) lip = std::max(lip, std::abs(logf[x] - logf[y]));
  return lip;
}

namespace {

/// Lipschitz norm over the edges whose endpoints both exceed `floor`. Entries
/// below the truncation tolerance are not resolved, so this is a lower bound.
double resolved_log_lip(const StochasticMatrix& P, const Distribution& pi, std::span<const double> row, double floor) {
  double lip = 0.0;
  for (State x = 0; x < P.size(); ++x) {
    if (row[x] < floor) continue;
    const double lx = std::log(row[x] / pi[x]);
    for (State y : P.support_row(x).targets)
      if (row[y] >= floor) lip = std::max(lip, std::abs(lx - std::log(row[y] / pi[y])));
  }
  return lip;
}

}  // namespace

double log_density_lip_norm(const StochasticMatrix& P, State o, double t, double tol) {
  const Distribution pi = stationary(P);
  const Distribution row = heat_kernel_row(P, o, t, tol);
  return log_density_lip_norm(P, pi, row.span());
}

InequalityVerdict log_gradient_bound_check(const Semigroup& S, const MetricData& metric, double t) {
  if (t < metric.diameter / 4.0)
    throw Error(ErrorCode::HypothesisViolation, "logarithmic gradient estimate needs t >= diam/4");
  double worst = 0.0;
  for (const Distribution& row : S.rows(t))
    worst = std::max(worst, log_density_lip_norm(S.matrix(), S.pi(), row.span()));
  const double rhs = 3.0 * (1.0 + std::log(metric.delta));
  return make_verdict("log_gradient", worst, rhs, 1e-9, fmt_context({{"t", t}, {"delta", metric.delta}}));
}

namespace {

double concentration_factor(double t, double kappa) {
  if (kappa == 0.0) return 2.0 * t;
  return -std::expm1(-2.0 * t * kappa) / kappa;
}

}  // namespace

InequalityVerdict local_concentration_check(const StochasticMatrix& P, const MetricData& metric,
                                            std::span<const double> f, double t, double kappa, double tol) {
  const std::size_t n = P.size();
  if (f.size() != n) throw Error(ErrorCode::DimensionMismatch, "observable length differs from state count");
  std::vector<double> sq(n);
  for (std::size_t x = 0; x < n; ++x) sq[x] = f[x] * f[x];
  const Observable mean = heat_semigroup_apply(P, f, t, tol);
  const Observable second = heat_semigroup_apply(P, sq, t, tol);
  const double lip = lipschitz_norm(metric, f);
  const double rhs = concentration_factor(t, kappa) * lip * lip;
  InequalityVerdict worst;
  for (State x = 0; x < n; ++x) {
    InequalityVerdict v = make_verdict("local_concentration", second[x] - mean[x] * mean[x], rhs, 1e-9,
                                       fmt_context({{"t", t}, {"kappa", kappa}, {"x", static_cast<double>(x)}}));
    v.samples = 1;
    if (x == 0) worst = v;
    else keep_worst(worst, v);
  }
  worst.samples = 1;
  return worst;
}

InequalityVerdict local_concentration_sweep(const StochasticMatrix& P, const MetricData& metric, double t,
                                            double kappa, int samples, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Observable f(P.size());
  InequalityVerdict worst;
  for (int s = 0; s < samples; ++s) {
    for (double& fx : f) fx = normal(rng);
    const double lip = lipschitz_norm(metric, f);
    if (lip > 0.0)
      for (double& fx : f) fx /= lip;
    const InequalityVerdict v = local_concentration_check(P, metric, f, t, kappa, tol);
    if (s == 0) worst = v;
    else keep_worst(worst, v);
  }
  return worst;
}

VarentropyVerdicts varentropy_bound_check(const Semigroup& S, const MetricData& metric, const CurvatureReport& curv,
                                          double eps) {
  if (!curv.nonnegative())
    throw Error(ErrorCode::CurvatureHypothesisFailed, "varentropy estimate needs non-negative curvature");
  const double t = mixing_time(S, eps);
  const std::vector<Distribution> rows = S.rows(t);
  double v_star = 0.0;
  double lip_star = 0.0;
  for (const Distribution& row : rows) {
    v_star = std::max(v_star, varentropy(row.span(), S.pi().span()));
    // At t = 0 the rows are point masses and the right side is 0 * inf, read as
    // 0 (the left side is 0 as well). For small t some entries fall under the
    // truncation tolerance; the norm is then taken over resolved edges only,
    // which can only shrink the right side.
    if (t > 0.0) lip_star = std::max(lip_star, resolved_log_lip(S.matrix(), S.pi(), row.span(), S.tol() * 1e10));
  }
  const double log_term = 1.0 + std::log(metric.delta);
  VarentropyVerdicts out;
  out.constant_form = make_verdict("varentropy_constant", v_star, 18.0 * t * log_term * log_term, 1e-9,
                                   fmt_context({{"eps", eps}, {"t", t}, {"delta", metric.delta}}));
  // The constant 18 = 2 * 3^2 relies on the gradient estimate, which needs t >= diam/4.
  if (t < metric.diameter / 4.0) {
    out.constant_form.vacuous = true;
    out.constant_form.pass = true;
  }
  out.composed_form = make_verdict("varentropy_composed", v_star, 2.0 * t * lip_star * lip_star, 1e-9,
                                   fmt_context({{"eps", eps}, {"t", t}, {"max_log_lip", lip_star}}));
  return out;
}

InequalityVerdict diameter_bound_check(const Semigroup& S, const MetricData& metric, double t_rel, double eps) {
  const double t = mixing_time(S, eps);
  const double rhs = 2.0 * t + std::sqrt(8.0 * t / (1.0 - eps)) + std::sqrt(8.0 * t_rel / (1.0 - eps));
  return make_verdict("diameter_bound", static_cast<double>(metric.diameter), rhs, 1e-9,
                      fmt_context({{"eps", eps}, {"t_mix", t}, {"t_rel", t_rel}}));
}

}  // namespace cutoff
