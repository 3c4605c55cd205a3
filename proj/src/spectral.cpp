#include "cutoff/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace cutoff {

namespace {

void require_full_support(const Distribution& pi, std::size_t n) {
  if (pi.size() != n) throw Error(ErrorCode::DimensionMismatch, "pi has the wrong length");
  for (std::size_t x = 0; x < n; ++x)
    if (!(pi[x] > 0.0)) throw Error(ErrorCode::InvalidArgument, "pi must be fully supported");
}

// Rows of a kernel assembled from pi-weighted products carry rounding error of a
// few ulps; restore exact stochasticity so the StochasticMatrix check holds.
void renormalise_rows(Matrix& m) {
  for (Eigen::Index x = 0; x < m.rows(); ++x) {
    const double s = m.row(x).sum();
    m.row(x) /= s;
  }
}

}  // namespace

StochasticMatrix adjoint(const StochasticMatrix& P, const Distribution& pi) {
  const std::size_t n = P.size();
  require_full_support(pi, n);
  Matrix star(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      star(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = pi[y] * P(y, x) / pi[x];
  renormalise_rows(star);
  return StochasticMatrix(std::move(star), P.labels());
}

StochasticMatrix reversibilization(const StochasticMatrix& P, const Distribution& pi) {
  const StochasticMatrix star = adjoint(P, pi);
  Matrix k = 0.5 * (P.entries() + star.entries());
  renormalise_rows(k);
  return StochasticMatrix(std::move(k), P.labels());
}

Observable gamma_form(const StochasticMatrix& P, std::span<const double> f, std::span<const double> g) {
  const std::size_t n = P.size();
  if (f.size() != n || g.size() != n) throw Error(ErrorCode::DimensionMismatch, "observable length differs from state count");
  Observable out(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    const SupportRow row = P.support_row(x);
    double acc = 0.0;
    for (std::size_t k = 0; k < row.targets.size(); ++k) {
      const std::size_t y = row.targets[k];
      acc += row.weights[k] * (f[y] - f[x]) * (g[y] - g[x]);
    }
    out[x] = 0.5 * acc;
  }
  return out;
}

double expectation(const Distribution& pi, std::span<const double> f) {
  double e = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) e += pi[x] * f[x];
  return e;
}

double variance(const Distribution& pi, std::span<const double> f) {
  const double mean = expectation(pi, f);
  double v = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) v += pi[x] * (f[x] - mean) * (f[x] - mean);
  return v;
}

double dirichlet_energy(const StochasticMatrix& P, const Distribution& pi, std::span<const double> f) {
  return expectation(pi, gamma_form(P, f, f));
}

SpectralReport relaxation_time(const StochasticMatrix& P, std::uint64_t seed) {
  if (!P.irreducible()) throw Error(ErrorCode::NotIrreducible, "relaxation time requires an irreducible chain");
  return relaxation_time(P, stationary(P), seed);
}

SpectralReport relaxation_time(const StochasticMatrix& P, const Distribution& pi, std::uint64_t seed) {
  if (!P.irreducible()) throw Error(ErrorCode::NotIrreducible, "relaxation time requires an irreducible chain");
  const std::size_t n = P.size();
  require_full_support(pi, n);
  const auto N = static_cast<Eigen::Index>(n);

  // S = D^{1/2} K D^{-1/2} with K = (P + P*)/2, which expands to
  // S(x,y) = (sqrt(pi x) P(x,y) / sqrt(pi y) + sqrt(pi y) P(y,x) / sqrt(pi x)) / 2, symmetric.
  Eigen::MatrixXd S(N, N);
  for (std::size_t x = 0; x < n; ++x) {
    const double rx = std::sqrt(pi[x]);
    for (std::size_t y = 0; y < n; ++y) {
      const double ry = std::sqrt(pi[y]);
      S(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = 0.5 * (rx * P(x, y) / ry + ry * P(y, x) / rx);
    }
  }
  S = 0.5 * (S + S.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::InvalidMatrix, "symmetric eigensolver failed");

  SpectralReport report;
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  report.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) report.eigenvalues[i] = ev(N - 1 - static_cast<Eigen::Index>(i));
  report.lambda2 = report.eigenvalues[1];
  report.gap = 1.0 - report.lambda2;
  report.t_rel = 1.0 / report.gap;

  const Eigen::VectorXd v = solver.eigenvectors().col(N - 2);
  report.slowest_mode.resize(n);
  for (std::size_t x = 0; x < n; ++x) report.slowest_mode[x] = v(static_cast<Eigen::Index>(x)) / std::sqrt(pi[x]);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  report.poincare_samples = 50;
  report.poincare_ok = true;
  Observable f(n);
  for (int s = 0; s < report.poincare_samples; ++s) {
    for (double& fx : f) fx = normal(rng);
    const double var = variance(pi, f);
    const double energy = dirichlet_energy(P, pi, f);
    report.poincare_max_ratio = std::max(report.poincare_max_ratio, var / (report.t_rel * energy));
    if (var > report.t_rel * energy + 1e-9) report.poincare_ok = false;
  }
  return report;
}

}  // namespace cutoff
