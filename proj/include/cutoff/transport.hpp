#pragma once

#include <span>
#include <vector>

#include "cutoff/chain.hpp"

namespace cutoff {

/// Optimal coupling for W1 together with a Kantorovich potential certifying it.
struct TransportPlan {
  struct Shipment {
    State from;
    State to;
    double mass;
  };
  std::vector<Shipment> plan;
  double value = 0.0;           // sum mass * dist(from, to)
  Observable dual_potential;    // 1-Lipschitz on the graph metric
  double dual_value = 0.0;      // <dual_potential, mu - nu>

  double duality_gap() const { return value - dual_value; }
};

/// Exact W1 between mu and nu for the metric `dist`, solved as a transportation
/// problem on the supports of mu and nu by successive shortest augmenting paths.
TransportPlan wasserstein1(std::span<const double> mu, std::span<const double> nu, const MetricData& dist);
TransportPlan wasserstein1(const Distribution& mu, const Distribution& nu, const MetricData& dist);

/// max over x ~ y of |f(x) - f(y)|.
double lipschitz_norm(const MetricData& metric, std::span<const double> f);

}  // namespace cutoff
