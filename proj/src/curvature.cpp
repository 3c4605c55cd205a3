#include "cutoff/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cutoff/spectral.hpp"

namespace cutoff {

bool CurvatureReport::nonnegative() const {
  return (has_ollivier() && ollivier_min >= -kCurvatureBand) ||
         (has_bakry_emery() && bakry_emery_min >= -kCurvatureBand);
}

double CurvatureReport::best_kappa() const {
  double k = -std::numeric_limits<double>::infinity();
  if (has_ollivier()) k = std::max(k, ollivier_min);
  if (has_bakry_emery()) k = std::max(k, bakry_emery_min);
  if (k < 0.0 && k >= -kCurvatureBand) k = 0.0;
  return k;
}

namespace {

std::vector<State> all_states(std::size_t n) {
  std::vector<State> v(n);
  std::iota(v.begin(), v.end(), State{0});
  return v;
}

std::vector<double> dense_row(const StochasticMatrix& P, State x) {
  const auto& e = P.entries();
  const auto* row = e.data() + static_cast<std::ptrdiff_t>(x * P.size());
  return std::vector<double>(row, row + P.size());
}

}  // namespace

CurvatureReport ollivier_curvature(const StochasticMatrix& P, const MetricData& metric,
                                   std::span<const State> vertices) {
  if (!P.symmetric_support()) throw Error(ErrorCode::AsymmetricSupport, "Ollivier curvature needs a symmetric support");
  std::vector<State> owned;
  if (vertices.empty()) {
    owned = all_states(P.size());
    vertices = owned;
  }
  CurvatureReport report;
  for (State x : vertices) {
    const std::vector<double> mu = dense_row(P, x);
    for (State y : P.support_row(x).targets) {
      if (y == x) continue;
      const auto key = std::minmax(x, y);
      if (report.ollivier_edges.contains(key)) continue;
      const TransportPlan plan = wasserstein1(mu, dense_row(P, y), metric);
      report.ollivier_edges[key] = 1.0 - plan.value;
      report.max_duality_gap = std::max(report.max_duality_gap, std::abs(plan.duality_gap()));
    }
  }
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& [edge, k] : report.ollivier_edges) lo = std::min(lo, k);
  if (!report.ollivier_edges.empty()) report.ollivier_min = lo;
  return report;
}

CurvatureReport ollivier_curvature(const StochasticMatrix& P) { return ollivier_curvature(P, metric_data(P)); }

Observable generator_apply(const StochasticMatrix& P, std::span<const double> f) {
  const std::size_t n = P.size();
  if (f.size() != n) throw Error(ErrorCode::DimensionMismatch, "observable length differs from state count");
  Observable out(n);
  for (State x = 0; x < n; ++x) {
    const SupportRow row = P.support_row(x);
    double acc = 0.0;
    for (std::size_t k = 0; k < row.targets.size(); ++k) acc += row.weights[k] * (f[row.targets[k]] - f[x]);
    out[x] = acc;
  }
  return out;
}

Observable gamma2_form(const StochasticMatrix& P, std::span<const double> f) {
  const Observable g = gamma_form(P, f, f);
  const Observable Lg = generator_apply(P, g);
  const Observable Lf = generator_apply(P, f);
  const Observable cross = gamma_form(P, f, Lf);
  Observable out(P.size());
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = 0.5 * Lg[x] - cross[x];
  return out;
}

double gamma_at(const StochasticMatrix& P, std::span<const double> f, State x) {
  const SupportRow row = P.support_row(x);
  double acc = 0.0;
  for (std::size_t k = 0; k < row.targets.size(); ++k) {
    const double d = f[row.targets[k]] - f[x];
    acc += row.weights[k] * d * d;
  }
  return 0.5 * acc;
}

namespace {

double generator_at(const StochasticMatrix& P, std::span<const double> f, State x) {
  const SupportRow row = P.support_row(x);
  double acc = 0.0;
  for (std::size_t k = 0; k < row.targets.size(); ++k) acc += row.weights[k] * (f[row.targets[k]] - f[x]);
  return acc;
}

}  // namespace

double gamma2_at(const StochasticMatrix& P, std::span<const double> f, State x) {
  const SupportRow row = P.support_row(x);
  const double gx = gamma_at(P, f, x);
  const double lx = generator_at(P, f, x);
  double half_l_gamma = 0.0;
  double cross = 0.0;
  for (std::size_t k = 0; k < row.targets.size(); ++k) {
    const State y = row.targets[k];
    const double w = row.weights[k];
    half_l_gamma += w * (gamma_at(P, f, y) - gx);
    cross += w * (f[y] - f[x]) * (generator_at(P, f, y) - lx);
  }
  return 0.5 * half_l_gamma - 0.5 * cross;
}

LocalCurvature bakry_emery_at(const StochasticMatrix& P, State x) {
  // Local coordinates: x first, then its out-neighbours, then the second shell.
  LocalCurvature out;
  std::vector<std::ptrdiff_t> local(P.size(), -1);
  auto add = [&](State s) {
    if (local[s] < 0) {
      local[s] = static_cast<std::ptrdiff_t>(out.ball.size());
      out.ball.push_back(s);
    }
  };
  add(x);
  for (State y : P.support_row(x).targets) add(y);
  const std::size_t first_shell_end = out.ball.size();
  for (std::size_t i = 1; i < first_shell_end; ++i)
    for (State z : P.support_row(out.ball[i]).targets) add(z);
  const auto m = static_cast<Eigen::Index>(out.ball.size());
  const auto u_count = static_cast<Eigen::Index>(first_shell_end) - 1;
  const Eigen::Index h_count = m - 1 - u_count;

  // Gamma(f,f)(y) = f^T G_y f and (L f)(y) = l_y^T f, in local coordinates.
  auto gamma_matrix = [&](State y, double scale, Eigen::MatrixXd& acc) {
    const SupportRow row = P.support_row(y);
    const auto iy = local[y];
    for (std::size_t k = 0; k < row.targets.size(); ++k) {
      const auto iz = local[row.targets[k]];
      if (iz == iy) continue;
      const double w = 0.5 * scale * row.weights[k];
      acc(iy, iy) += w;
      acc(iz, iz) += w;
      acc(iy, iz) -= w;
      acc(iz, iy) -= w;
    }
  };
  auto generator_vector = [&](State y) {
    Eigen::VectorXd l = Eigen::VectorXd::Zero(m);
    const SupportRow row = P.support_row(y);
    for (std::size_t k = 0; k < row.targets.size(); ++k) {
      l(local[row.targets[k]]) += row.weights[k];
      l(local[y]) -= row.weights[k];
    }
    return l;
  };

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
  gamma_matrix(x, 1.0, B);

  // A = 1/2 sum_y P(x,y) (G_y - G_x) - sym( 1/2 sum_y P(x,y) (e_y - e_x)(l_y - l_x)^T ).
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(m, m);
  const Eigen::VectorXd lx = generator_vector(x);
  const SupportRow row = P.support_row(x);
  for (std::size_t k = 0; k < row.targets.size(); ++k) {
    const State y = row.targets[k];
    if (y == x) continue;
    const double w = row.weights[k];
    gamma_matrix(y, 0.5 * w, A);
    A -= 0.5 * w * B;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e(local[y]) = 1.0;
    e(0) = -1.0;
    cross += 0.5 * w * e * (generator_vector(y) - lx).transpose();
  }
  A -= 0.5 * (cross + cross.transpose());

  // Both forms are invariant under adding constants, so pin f(x) = 0. On the
  // first shell B is diag(P(x,y)/2); on the second shell B vanishes and the
  // form A is minimised out through its Schur complement.
  const Eigen::MatrixXd Auu = A.block(1, 1, u_count, u_count);
  const Eigen::MatrixXd Auh = A.block(1, 1 + u_count, u_count, h_count);
  const Eigen::MatrixXd Ahh = A.block(1 + u_count, 1 + u_count, h_count, h_count);
  Eigen::VectorXd b_diag(u_count);
  for (Eigen::Index i = 0; i < u_count; ++i) b_diag(i) = B(1 + i, 1 + i);

  Eigen::MatrixXd schur = Auu;
  Eigen::MatrixXd h_response = Eigen::MatrixXd::Zero(h_count, u_count);  // h = h_response * u
  if (h_count > 0) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hsolve(Ahh);
    const Eigen::VectorXd& hev = hsolve.eigenvalues();
    const double scale = std::max(1.0, hev.cwiseAbs().maxCoeff());
    if (hev.minCoeff() < -1e-12 * scale) {
      out.kappa = kUnboundedBelow;
      return out;
    }
    Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(h_count, h_count);
    const Eigen::MatrixXd& V = hsolve.eigenvectors();
    for (Eigen::Index i = 0; i < h_count; ++i) {
      if (hev(i) > 1e-12 * scale) {
        pinv += V.col(i) * V.col(i).transpose() / hev(i);
      } else {
        // A null direction of A_hh coupled to the first shell lets the quotient diverge.
        if ((Auh * V.col(i)).norm() > 1e-10 * scale) {
          out.kappa = kUnboundedBelow;
          return out;
        }
      }
    }
    h_response = -pinv * Auh.transpose();
    schur += Auh * h_response;
  }
  const Eigen::VectorXd inv_sqrt_b = b_diag.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd pencil = inv_sqrt_b.asDiagonal() * schur * inv_sqrt_b.asDiagonal();
  pencil = 0.5 * (pencil + pencil.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(pencil);
  out.kappa = solver.eigenvalues()(0);

  const Eigen::VectorXd u = inv_sqrt_b.asDiagonal() * solver.eigenvectors().col(0);
  const Eigen::VectorXd h = h_response * u;
  out.minimizer.assign(P.size(), 0.0);
  for (Eigen::Index i = 0; i < u_count; ++i) out.minimizer[out.ball[static_cast<std::size_t>(1 + i)]] = u(i);
  for (Eigen::Index i = 0; i < h_count; ++i)
    out.minimizer[out.ball[static_cast<std::size_t>(1 + u_count + i)]] = h(i);
  return out;
}

CurvatureReport bakry_emery_curvature(const StochasticMatrix& P, std::span<const State> vertices, int certify_samples,
                                      std::uint64_t seed) {
  if (!P.irreducible()) throw Error(ErrorCode::NotIrreducible, "Bakry-Emery curvature requires an irreducible chain");
  std::vector<State> owned;
  if (vertices.empty()) {
    owned = all_states(P.size());
    vertices = owned;
  }
  CurvatureReport report;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Observable f(P.size());
  double lo = std::numeric_limits<double>::infinity();
  for (State x : vertices) {
    const LocalCurvature local = bakry_emery_at(P, x);
    report.bakry_emery_vertices[x] = local.kappa;
    lo = std::min(lo, local.kappa);
    if (local.kappa == kUnboundedBelow) continue;
    for (int s = 0; s < certify_samples; ++s) {
      for (State z : local.ball) f[z] = normal(rng);
      const double g = gamma_at(P, f, x);
      if (g <= 1e-12) continue;
      const double q = gamma2_at(P, f, x) / g;
      report.bakry_emery_certificate_violation =
          std::max(report.bakry_emery_certificate_violation, local.kappa - q);
    }
  }
  if (!report.bakry_emery_vertices.empty()) report.bakry_emery_min = lo;
  return report;
}

CurvatureReport curvature(const StochasticMatrix& P, const MetricData& metric, std::span<const State> vertices,
                          int certify_samples, std::uint64_t seed) {
  CurvatureReport report = ollivier_curvature(P, metric, vertices);
  CurvatureReport be = bakry_emery_curvature(P, vertices, certify_samples, seed);
  report.bakry_emery_vertices = std::move(be.bakry_emery_vertices);
  report.bakry_emery_min = be.bakry_emery_min;
  report.bakry_emery_certificate_violation = be.bakry_emery_certificate_violation;
  return report;
}

namespace {

std::string time_context(double t) {
  std::ostringstream s;
  s << "t=" << t;
  return s.str();
}

}  // namespace

InequalityVerdict contraction_check(const StochasticMatrix& P, const MetricData& metric, double kappa,
                                    std::span<const double> t_grid, std::span<const State> vertices,
                                    std::uint64_t seed, double tol) {
  constexpr double kTol = 1e-9;
  InequalityVerdict worst = make_verdict("lipschitz_contraction", 0.0, 0.0, kTol, "empty grid");
  worst.samples = 0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = P.size();
  std::vector<State> owned;
  if (vertices.empty()) {
    owned = all_states(n);
    vertices = owned;
  }
  Observable f(n);
  bool first = true;
  auto record = [&](double lhs, double rhs, const std::string& ctx) {
    InequalityVerdict v = make_verdict("lipschitz_contraction", lhs, rhs, kTol, ctx);
    v.samples = 1;
    if (first) {
      worst = v;
      first = false;
    } else {
      keep_worst(worst, v);
    }
  };
  for (double t : t_grid) {
    const double factor = std::exp(-kappa * t);
    for (int s = 0; s < 100; ++s) {
      for (double& fx : f) fx = normal(rng);
      const double lip = lipschitz_norm(metric, f);
      if (lip <= 0.0) continue;
      for (double& fx : f) fx /= lip;
      const Observable moved = heat_semigroup_apply(P, f, t, tol);
      record(lipschitz_norm(metric, moved), factor, time_context(t) + ";form=lipschitz");
    }
    // W1 form on adjacent pairs.
    std::vector<State> starts(vertices.begin(), vertices.end());
    for (State x : vertices)
      for (State y : P.support_row(x).targets) starts.push_back(y);
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    const std::vector<Distribution> rows = heat_kernel_rows(P, starts, t, tol);
    auto row_of = [&](State s) -> const Distribution& {
      return rows[static_cast<std::size_t>(std::lower_bound(starts.begin(), starts.end(), s) - starts.begin())];
    };
    for (State x : vertices)
      for (State y : P.support_row(x).targets) {
        if (y == x) continue;
        const TransportPlan plan = wasserstein1(row_of(x), row_of(y), metric);
        record(plan.value, factor, time_context(t) + ";form=w1");
      }
  }
  return worst;
}

InequalityVerdict subcommutativity_check(const StochasticMatrix& P, double kappa, std::span<const double> t_grid,
                                         std::uint64_t seed, double tol) {
  constexpr double kTol = 1e-9;
  InequalityVerdict worst = make_verdict("subcommutativity", 0.0, 0.0, kTol, "empty grid");
  worst.samples = 0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = P.size();
  Observable f(n);
  bool first = true;
  for (double t : t_grid) {
    const double factor = std::exp(-2.0 * kappa * t);
    for (int s = 0; s < 100; ++s) {
      for (double& fx : f) fx = normal(rng);
      const Observable moved = heat_semigroup_apply(P, f, t, tol);
      const Observable lhs = gamma_form(P, moved, moved);
      const Observable rhs = heat_semigroup_apply(P, gamma_form(P, f, f), t, tol);
      for (State x = 0; x < n; ++x) {
        InequalityVerdict v = make_verdict("subcommutativity", lhs[x], factor * rhs[x], kTol,
                                           time_context(t) + ";x=" + std::to_string(x));
        v.samples = 1;
        if (first) {
          worst = v;
          first = false;
        } else {
          keep_worst(worst, v);
        }
      }
    }
  }
  return worst;
}

}  // namespace cutoff
