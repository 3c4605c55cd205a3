#include "cutoff/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cutoff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Residual mass below this is treated as exhausted.
constexpr double kMassEpsilon = 1e-17;

}  // namespace

TransportPlan wasserstein1(std::span<const double> mu, std::span<const double> nu, const MetricData& dist) {
  const std::size_t n = dist.n;
  if (mu.size() != n || nu.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "measures and metric disagree on the number of states");

  std::vector<State> sources, sinks;
  for (State x = 0; x < n; ++x) {
    if (mu[x] > 0.0) sources.push_back(x);
    if (nu[x] > 0.0) sinks.push_back(x);
  }
  const std::size_t m = sources.size();
  const std::size_t k = sinks.size();

  // Node layout: [0, m) sources, [m, m + k) sinks, m + k super source, m + k + 1 super sink.
  const std::size_t S = m + k;
  const std::size_t T = m + k + 1;
  const std::size_t V = m + k + 2;

  std::vector<double> supply(m), demand(k), flow(m * k, 0.0), cost(m * k);
  for (std::size_t i = 0; i < m; ++i) supply[i] = mu[sources[i]];
  for (std::size_t j = 0; j < k; ++j) demand[j] = nu[sinks[j]];
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) cost[i * k + j] = static_cast<double>(dist(sources[i], sinks[j]));

  std::vector<double> potential(V, 0.0), best(V);
  std::vector<std::size_t> prev(V);
  std::vector<char> done(V);

  double remaining = 0.0;
  for (double s : supply) remaining += s;
  double remaining_demand = 0.0;
  for (double d : demand) remaining_demand += d;
  remaining = std::min(remaining, remaining_demand);

  while (remaining > 1e-15) {
    // Dijkstra with reduced costs on the dense residual graph.
    std::fill(best.begin(), best.end(), kInf);
    std::fill(done.begin(), done.end(), 0);
    best[S] = 0.0;
    prev[S] = S;
    for (;;) {
      std::size_t u = V;
      double bu = kInf;
      for (std::size_t v = 0; v < V; ++v)
        if (!done[v] && best[v] < bu) {
          bu = best[v];
          u = v;
        }
      if (u == V) break;
      done[u] = 1;
      auto relax = [&](std::size_t v, double arc_cost) {
        const double rc = std::max(0.0, arc_cost + potential[u] - potential[v]);
        if (bu + rc < best[v]) {
          best[v] = bu + rc;
          prev[v] = u;
        }
      };
      if (u == S) {
        for (std::size_t i = 0; i < m; ++i)
          if (supply[i] > kMassEpsilon) relax(i, 0.0);
      } else if (u < m) {
        for (std::size_t j = 0; j < k; ++j) relax(m + j, cost[u * k + j]);
      } else if (u < S) {
        const std::size_t j = u - m;
        for (std::size_t i = 0; i < m; ++i)
          if (flow[i * k + j] > 0.0) relax(i, -cost[i * k + j]);
        if (demand[j] > kMassEpsilon) relax(T, 0.0);
      }
    }
    if (best[T] == kInf) break;
    for (std::size_t v = 0; v < V; ++v) potential[v] += std::min(best[v], best[T]);

    // Bottleneck along the path S -> i -> j -> ... -> T.
    double push = kInf;
    for (std::size_t v = T; v != S; v = prev[v]) {
      const std::size_t u = prev[v];
      if (u == S) push = std::min(push, supply[v]);
      else if (v == T) push = std::min(push, demand[u - m]);
      else if (u >= m) push = std::min(push, flow[v * k + (u - m)]);  // backward arc sink u -> source v
    }
    for (std::size_t v = T; v != S; v = prev[v]) {
      const std::size_t u = prev[v];
      if (u == S) {
        supply[v] = (supply[v] == push) ? 0.0 : supply[v] - push;
      } else if (v == T) {
        demand[u - m] = (demand[u - m] == push) ? 0.0 : demand[u - m] - push;
      } else if (u < m) {
        flow[u * k + (v - m)] += push;
      } else {
        double& f = flow[v * k + (u - m)];
        f = (f == push) ? 0.0 : f - push;
      }
    }
    remaining -= push;
    if (push <= 0.0) break;
  }

  TransportPlan out;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double f = flow[i * k + j];
      if (f > 0.0) {
        out.plan.push_back({sources[i], sinks[j], f});
        out.value += f * cost[i * k + j];
      }
    }

  // Kantorovich potential f(z) = min_j (dist(z, sink_j) - p_j): 1-Lipschitz as
  // a minimum of 1-Lipschitz functions, and tight on every used shipment.
  out.dual_potential.assign(n, 0.0);
  if (k > 0) {
    for (State z = 0; z < n; ++z) {
      double f = kInf;
      for (std::size_t j = 0; j < k; ++j) f = std::min(f, static_cast<double>(dist(z, sinks[j])) - potential[m + j]);
      out.dual_potential[z] = f;
    }
    // Shift so the potential is anchored at zero on the first sink; harmless for
    // the pairing because mu and nu carry the same mass.
    const double anchor = out.dual_potential[sinks.front()];
    for (double& f : out.dual_potential) f -= anchor;
  }
  for (State z = 0; z < n; ++z) out.dual_value += out.dual_potential[z] * (mu[z] - nu[z]);
  return out;
}

TransportPlan wasserstein1(const Distribution& mu, const Distribution& nu, const MetricData& dist) {
  return wasserstein1(mu.span(), nu.span(), dist);
}

double lipschitz_norm(const MetricData& metric, std::span<const double> f) {
  const std::size_t n = metric.n;
  double lip = 0.0;
  for (State x = 0; x < n; ++x)
    for (State y = x + 1; y < n; ++y)
      if (metric(x, y) == 1) lip = std::max(lip, std::abs(f[x] - f[y]));
  return lip;
}

}  // namespace cutoff
