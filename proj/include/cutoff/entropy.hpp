#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <vector>

#include "cutoff/chain.hpp"
#include "cutoff/curvature.hpp"
#include "cutoff/verdict.hpp"

namespace cutoff {

/// Storage for heat-kernel rows keyed by (t, tol, start set). Implementations
/// must tolerate concurrent load() calls alongside a single writer.
class RowCache {
 public:
  virtual ~RowCache() = default;
  virtual std::optional<std::vector<Distribution>> load(double t, double tol, std::span<const State> starts) = 0;
  virtual void store(double t, double tol, std::span<const State> starts, const std::vector<Distribution>& rows) = 0;
};

class MemoryRowCache final : public RowCache {
 public:
  std::optional<std::vector<Distribution>> load(double t, double tol, std::span<const State> starts) override;
  void store(double t, double tol, std::span<const State> starts, const std::vector<Distribution>& rows) override;

 private:
  struct Key {
    double t;
    double tol;
    std::vector<State> starts;
    auto operator<=>(const Key&) const = default;
  };
  std::shared_mutex mutex_;
  std::map<Key, std::vector<Distribution>> rows_;
};

/// Heat-kernel rows of one chain from a fixed set of starting states. The
/// worst case over starts is taken over `starts()`; for vertex-transitive
/// chains a single start suffices. Holds a reference to P, which must outlive it.
class Semigroup {
 public:
  explicit Semigroup(const StochasticMatrix& P, std::vector<State> starts = {}, double tol = 1e-30,
                     unsigned threads = 1, std::shared_ptr<RowCache> cache = nullptr);
  Semigroup(const StochasticMatrix& P, Distribution pi, std::vector<State> starts = {}, double tol = 1e-30,
            unsigned threads = 1, std::shared_ptr<RowCache> cache = nullptr);

  const StochasticMatrix& matrix() const { return *P_; }
  const Distribution& pi() const { return pi_; }
  const std::vector<State>& starts() const { return starts_; }
  double tol() const { return tol_; }
  unsigned threads() const { return threads_; }

  std::vector<Distribution> rows(double t) const;
  double worst_tv(double t) const;

  /// Memo for mixing_time(); keyed by (eps, tol_t).
  std::optional<double> remembered_mixing_time(double eps, double tol_t) const;
  void remember_mixing_time(double eps, double tol_t, double value) const;

 private:
  const StochasticMatrix* P_;
  Distribution pi_;
  std::vector<State> starts_;
  double tol_;
  unsigned threads_;
  std::shared_ptr<RowCache> cache_;
  mutable std::shared_mutex memo_mutex_;
  mutable std::map<std::pair<double, double>, double> mixing_memo_;
};

struct MixingProfile {
  std::vector<double> times;
  std::vector<double> worst_tv;
  std::vector<std::vector<double>> per_start_tv;  // [time][start], empty unless requested
};

struct EntropyProfile {
  std::vector<double> times;
  std::vector<double> d_star;
  std::vector<double> v_star;
};

/// 1/2 sum |mu - nu|.
double tv_distance(std::span<const double> mu, std::span<const double> nu);
double tv_distance(const Distribution& mu, const Distribution& nu);

/// Relative entropy and its variance (varentropy); 0 log 0 = 0.
double kl_divergence(std::span<const double> mu, std::span<const double> pi);
double varentropy(std::span<const double> mu, std::span<const double> pi);

/// Smallest t with worst-case TV <= eps, by doubling from t = 1 then bisection.
/// tol_t <= 0 selects 1e-4 times the bracketing scale.
double mixing_time(const Semigroup& S, double eps, double tol_t = 0.0);
double mixing_time(const StochasticMatrix& P, double eps, double tol_t = 0.0);

MixingProfile mixing_profile(const Semigroup& S, std::span<const double> times, bool per_start = false);

struct EntropyPoint {
  double d_star = 0.0;
  double v_star = 0.0;
};
EntropyPoint entropy_at(const Semigroup& S, double t);
EntropyProfile entropy_profile(const Semigroup& S, std::span<const double> times);

/// t_mix(eps) <= t + (t_rel / eps)(1 + d*(t)).
InequalityVerdict entropic_upper_bound(const Semigroup& S, double t_rel, double t, double eps);

/// ||mu - pi||_TV <= 1 - eps  implies  d_KL <= (1 + sqrt(V_KL)) / eps; vacuous otherwise.
InequalityVerdict entropic_lower_bound_check(std::span<const double> mu, std::span<const double> pi, double eps);

/// t_mix(eps) - t_mix(1 - eps) <= (2 t_rel / eps^2) [1 + sqrt(V*(t_mix(1 - eps)))].
InequalityVerdict cutoff_window_bound(const Semigroup& S, double t_rel, double eps);

/// [1 + sqrt(V*(t_mix(eps)))] t_rel / t_mix(eps).
double entropic_concentration_ratio(const Semigroup& S, double t_rel, double eps);

/// Solves d*(t) = c (1 + sqrt(V*(t))) by bracketing and bisection.
double cutoff_time_equation(const Semigroup& S, double c = 1.0, double tol_t = 0.0);

/// max over x ~ y of |log(row(x)/pi(x)) - log(row(y)/pi(y))|.
double log_density_lip_norm(const StochasticMatrix& P, const Distribution& pi, std::span<const double> row);
double log_density_lip_norm(const StochasticMatrix& P, State o, double t, double tol = 1e-30);

/// max over starts of the log-density Lipschitz norm <= 3(1 + log Delta), for t >= diam/4.
InequalityVerdict log_gradient_bound_check(const Semigroup& S, const MetricData& metric, double t);

/// Pointwise P_t(f^2) - (P_t f)^2 <= ((1 - e^{-2 t kappa}) / kappa) ||f||_Lip^2 (2t when kappa = 0).
InequalityVerdict local_concentration_check(const StochasticMatrix& P, const MetricData& metric,
                                            std::span<const double> f, double t, double kappa, double tol = 1e-30);
/// The same over `samples` random observables.
InequalityVerdict local_concentration_sweep(const StochasticMatrix& P, const MetricData& metric, double t,
                                            double kappa, int samples = 100, std::uint64_t seed = 31,
                                            double tol = 1e-30);

struct VarentropyVerdicts {
  InequalityVerdict constant_form;   // V*(t) <= 18 t (1 + log Delta)^2
  InequalityVerdict composed_form;   // V*(t) <= 2 t max_o ||log(P_t(o,.)/pi)||_Lip^2
};
/// Evaluated at t = t_mix(eps); throws CurvatureHypothesisFailed unless `curv` certifies
/// non-negative curvature.
VarentropyVerdicts varentropy_bound_check(const Semigroup& S, const MetricData& metric, const CurvatureReport& curv,
                                          double eps);

/// diam <= 2 t_mix(eps) + sqrt(8 t_mix(eps) / (1 - eps)) + sqrt(8 t_rel / (1 - eps)).
InequalityVerdict diameter_bound_check(const Semigroup& S, const MetricData& metric, double t_rel, double eps);

}  // namespace cutoff
