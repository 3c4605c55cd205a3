#include <algorithm>
#include <cmath>
#include <numeric>

#include "cutoff/chain.hpp"
#include "cutoff/parallel.hpp"

namespace cutoff {

void check_tolerance(double tol) {
  if (!(tol > 0.0) || tol > 1e-6) throw Error(ErrorCode::InvalidTolerance, "heat-kernel tolerance must lie in (0, 1e-6]");
}

std::vector<double> poisson_weights(double t, double tol) {
  check_tolerance(tol);
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "time must be finite and >= 0");
  if (t == 0.0) return {1.0};

  const double log_t = std::log(t);
  auto log_pmf = [&](std::size_t k) {
    const double kd = static_cast<double>(k);
    return -t + kd * log_t - std::lgamma(kd + 1.0);
  };

  // Tabulate the pmf far enough that the geometric bound on what is left,
  // q(k) r / (1 - r) with r = t / (k + 2), is negligible against tol.
  std::vector<double> pmf;
  for (std::size_t k = 0;; ++k) {
    const double q = std::exp(log_pmf(k));
    pmf.push_back(q);
    const double kd = static_cast<double>(k);
    if (kd > t + 1.0) {
      const double r = t / (kd + 2.0);
      if (q * r / (1.0 - r) <= tol * 1e-6) break;
    }
  }
  // suffix[k] = sum_{j >= k} q(j)
  std::vector<double> suffix(pmf.size() + 1, 0.0);
  for (std::size_t k = pmf.size(); k-- > 0;) suffix[k] = suffix[k + 1] + pmf[k];

  const auto floor_k = static_cast<std::size_t>(std::ceil(t + 8.0 * std::sqrt(t) + 8.0));
  std::size_t K = 0;
  while (K + 1 < pmf.size() && suffix[K + 1] > tol) ++K;
  K = std::max(K, floor_k);
  if (K + 1 > pmf.size()) {
    for (std::size_t k = pmf.size(); k <= K; ++k) pmf.push_back(std::exp(log_pmf(k)));
  }
  pmf.resize(K + 1);
  return pmf;
}

namespace {

std::vector<double> series_row(const StochasticMatrix& P, State o, const std::vector<double>& weights) {
  const std::size_t n = P.size();
  std::vector<double> power(n, 0.0), next(n), acc(n, 0.0);
  power[o] = 1.0;
  acc[o] = weights[0];
  for (std::size_t k = 1; k < weights.size(); ++k) {
    P.left_multiply(power, next);
    power.swap(next);
    const double w = weights[k];
    for (std::size_t y = 0; y < n; ++y) acc[y] += w * power[y];
  }
  return acc;
}

}  // namespace

Distribution heat_kernel_row(const StochasticMatrix& P, State o, double t, double tol) {
  if (o >= P.size()) throw Error(ErrorCode::InvalidArgument, "start state out of range");
  return Distribution::unchecked(series_row(P, o, poisson_weights(t, tol)));
}

std::vector<Distribution> heat_kernel_rows(const StochasticMatrix& P, std::span<const State> starts, double t,
                                           double tol, unsigned threads) {
  const std::vector<double> weights = poisson_weights(t, tol);
  for (State o : starts)
    if (o >= P.size()) throw Error(ErrorCode::InvalidArgument, "start state out of range");
  std::vector<Distribution> rows(starts.size());
  parallel_for(starts.size(), threads,
               [&](std::size_t i) { rows[i] = Distribution::unchecked(series_row(P, starts[i], weights)); });
  return rows;
}

Matrix heat_kernel(const StochasticMatrix& P, double t, double tol, unsigned threads) {
  std::vector<State> all(P.size());
  std::iota(all.begin(), all.end(), State{0});
  const std::vector<Distribution> rows = heat_kernel_rows(P, all, t, tol, threads);
  const auto n = static_cast<Eigen::Index>(P.size());
  Matrix h(n, n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y) h(x, y) = rows[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
  return h;
}

Observable heat_semigroup_apply(const StochasticMatrix& P, std::span<const double> f, double t, double tol) {
  if (f.size() != P.size()) throw Error(ErrorCode::DimensionMismatch, "observable length differs from state count");
  const std::vector<double> weights = poisson_weights(t, tol);
  const std::size_t n = P.size();
  std::vector<double> power(f.begin(), f.end()), next(n), acc(n);
  for (std::size_t x = 0; x < n; ++x) acc[x] = weights[0] * power[x];
  for (std::size_t k = 1; k < weights.size(); ++k) {
    P.right_multiply(power, next);
    power.swap(next);
    for (std::size_t x = 0; x < n; ++x) acc[x] += weights[k] * power[x];
  }
  return acc;
}

}  // namespace cutoff
