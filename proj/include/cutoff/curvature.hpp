#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "cutoff/chain.hpp"
#include "cutoff/transport.hpp"
#include "cutoff/verdict.hpp"

namespace cutoff {

/// Value reported for a vertex where Gamma_2 fails to be non-negative on the
/// directions where Gamma vanishes: no finite curvature constant exists there.
inline constexpr double kUnboundedBelow = -std::numeric_limits<double>::infinity();

inline constexpr double kCurvatureBand = 1e-8;

struct CurvatureReport {
  /// One-step Ollivier curvature 1 - W1(P(x,.), P(y,.)) per support edge x < y.
  std::map<std::pair<State, State>, double> ollivier_edges;
  double ollivier_min = std::numeric_limits<double>::quiet_NaN();
  /// Pointwise Bakry-Emery constant per state.
  std::map<State, double> bakry_emery_vertices;
  double bakry_emery_min = std::numeric_limits<double>::quiet_NaN();
  /// Largest Rayleigh-quotient violation seen by the random-f certificate (<= 1e-8 when sound).
  double bakry_emery_certificate_violation = 0.0;
  /// Largest duality gap over the transport problems solved.
  double max_duality_gap = 0.0;

  bool has_ollivier() const { return !ollivier_edges.empty(); }
  bool has_bakry_emery() const { return !bakry_emery_vertices.empty(); }
  /// Either notion certified >= -1e-8.
  bool nonnegative() const;
  /// Best valid curvature constant: the max of the two notions, clamped at 0 when inside the certification band.
  double best_kappa() const;
};

/// Ollivier curvature on every support edge with an endpoint in `vertices`
/// (all edges when empty).
CurvatureReport ollivier_curvature(const StochasticMatrix& P, const MetricData& metric,
                                   std::span<const State> vertices = {});
CurvatureReport ollivier_curvature(const StochasticMatrix& P);

/// (L f)(x) = sum_y P(x,y) (f(y) - f(x)).
Observable generator_apply(const StochasticMatrix& P, std::span<const double> f);

/// Gamma_2(f,f) = 1/2 L Gamma(f,f) - Gamma(f, L f).
Observable gamma2_form(const StochasticMatrix& P, std::span<const double> f);

/// Gamma(f,f)(x) and Gamma_2(f,f)(x) at a single state, from the raw sums.
double gamma_at(const StochasticMatrix& P, std::span<const double> f, State x);
double gamma2_at(const StochasticMatrix& P, std::span<const double> f, State x);

/// Local curvature problem at one state.
struct LocalCurvature {
  double kappa = 0.0;
  Observable minimizer;          // full-length observable attaining kappa (empty when unbounded)
  std::vector<State> ball;       // states within two steps of x
};

LocalCurvature bakry_emery_at(const StochasticMatrix& P, State x);

/// Pointwise Bakry-Emery curvature on `vertices` (all states when empty),
/// certified against `certify_samples` random observables per vertex.
CurvatureReport bakry_emery_curvature(const StochasticMatrix& P, std::span<const State> vertices = {},
                                      int certify_samples = 1000, std::uint64_t seed = 17);

/// Both notions at once.
CurvatureReport curvature(const StochasticMatrix& P, const MetricData& metric, std::span<const State> vertices = {},
                          int certify_samples = 1000, std::uint64_t seed = 17);

/// ||P_t f||_Lip <= e^{-kappa t} ||f||_Lip on 100 random observables per t,
/// plus the W1 form on adjacent pairs with an endpoint in `vertices`.
InequalityVerdict contraction_check(const StochasticMatrix& P, const MetricData& metric, double kappa,
                                    std::span<const double> t_grid, std::span<const State> vertices = {},
                                    std::uint64_t seed = 23, double tol = 1e-14);

/// Gamma(P_t f, P_t f) <= e^{-2 kappa t} P_t Gamma(f,f) pointwise, 100 random f per t.
InequalityVerdict subcommutativity_check(const StochasticMatrix& P, double kappa, std::span<const double> t_grid,
                                         std::uint64_t seed = 29, double tol = 1e-14);

}  // namespace cutoff
