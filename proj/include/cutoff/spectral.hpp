#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cutoff/chain.hpp"

namespace cutoff {

struct SpectralReport {
  double t_rel = 0.0;
  double gap = 0.0;
  double lambda2 = 0.0;
  std::vector<double> eigenvalues;   // descending, symmetrised (P + P*)/2
  Observable slowest_mode;           // eigenfunction of lambda2 in the f-coordinates (unit L2(pi) norm)

  // Poincare certificate on random Gaussian observables.
  int poincare_samples = 0;
  double poincare_max_ratio = 0.0;   // max Var(f) / (t_rel E[Gamma(f,f)])
  bool poincare_ok = false;
};

/// P*(x,y) = pi(y) P(y,x) / pi(x).
StochasticMatrix adjoint(const StochasticMatrix& P, const Distribution& pi);

/// (P + P*) / 2, reversible with respect to pi.
StochasticMatrix reversibilization(const StochasticMatrix& P, const Distribution& pi);

/// Gamma(f,g)(x) = 1/2 sum_y P(x,y) (f(y)-f(x)) (g(y)-g(x)).
Observable gamma_form(const StochasticMatrix& P, std::span<const double> f, std::span<const double> g);

/// Spectral gap of the additive reversibilization and the Poincare certificate.
SpectralReport relaxation_time(const StochasticMatrix& P, std::uint64_t seed = 20240601);
SpectralReport relaxation_time(const StochasticMatrix& P, const Distribution& pi, std::uint64_t seed = 20240601);

double expectation(const Distribution& pi, std::span<const double> f);
double variance(const Distribution& pi, std::span<const double> f);
/// E_pi[Gamma(f,f)].
double dirichlet_energy(const StochasticMatrix& P, const Distribution& pi, std::span<const double> f);

}  // namespace cutoff
