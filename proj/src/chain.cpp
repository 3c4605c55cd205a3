#include "cutoff/chain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

namespace cutoff {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::AsymmetricSupport: return "AsymmetricSupport";
    case ErrorCode::InvalidTolerance: return "InvalidTolerance";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnsupportedState: return "UnsupportedState";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::UnderflowRisk: return "UnderflowRisk";
    case ErrorCode::HypothesisViolation: return "HypothesisViolation";
    case ErrorCode::CurvatureHypothesisFailed: return "CurvatureHypothesisFailed";
    case ErrorCode::NotGenerating: return "NotGenerating";
    case ErrorCode::NotSymmetricSet: return "NotSymmetricSet";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::StateCapExceeded: return "StateCapExceeded";
    case ErrorCode::SpecParseError: return "SpecParseError";
    case ErrorCode::CacheCorrupt: return "CacheCorrupt";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

// Reachability of every state from state 0 along positive entries, either
// forwards (x -> y when P(x,y) > 0) or backwards.
bool reaches_all(const Matrix& m, bool forward) {
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    for (std::size_t y = 0; y < n; ++y) {
      const double w = forward ? m(x, y) : m(y, x);
      if (w > 0.0 && !seen[y]) {
        seen[y] = 1;
        ++count;
        stack.push_back(y);
      }
    }
  }
  return count == n;
}

bool support_is_symmetric(const Matrix& m) {
  const auto n = m.rows();
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = x + 1; y < n; ++y)
      if ((m(x, y) > 0.0) != (m(y, x) > 0.0)) return false;
  return true;
}

}  // namespace

Diagnostics validate(const Matrix& entries) {
  Diagnostics d;
  d.n = static_cast<std::size_t>(entries.rows());
  d.square = entries.rows() == entries.cols();
  d.at_least_three_states = d.n >= 3;
  if (!d.square || d.n == 0) {
    d.square = false;
    return d;
  }
  for (Eigen::Index x = 0; x < entries.rows(); ++x) {
    double sum = 0.0;
    for (Eigen::Index y = 0; y < entries.cols(); ++y) {
      const double p = entries(x, y);
      if (!std::isfinite(p)) d.finite = false;
      if (p < 0.0) d.nonnegative = false;
      sum += p;
    }
    const double residual = std::abs(sum - 1.0);
    if (residual > d.max_row_residual || !std::isfinite(residual)) {
      d.max_row_residual = residual;
      d.worst_row = static_cast<std::size_t>(x);
    }
  }
  d.irreducible = reaches_all(entries, true) && reaches_all(entries, false);
  d.symmetric_support = support_is_symmetric(entries);
  return d;
}

StochasticMatrix::StochasticMatrix(Matrix entries, std::vector<std::string> labels)
    : entries_(std::move(entries)), labels_(std::move(labels)) {
  const Diagnostics d = validate(entries_);
  if (!d.stochastic()) {
    std::ostringstream msg;
    msg << "not a stochastic matrix (n=" << d.n << ", square=" << d.square << ", nonnegative=" << d.nonnegative
        << ", finite=" << d.finite << ", max row residual=" << d.max_row_residual << " at row " << d.worst_row << ")";
    throw Error(ErrorCode::InvalidMatrix, msg.str());
  }
  if (!labels_.empty() && labels_.size() != d.n)
    throw Error(ErrorCode::DimensionMismatch, "label count does not match state count");
  irreducible_ = d.irreducible;
  symmetric_support_ = d.symmetric_support;

  const std::size_t n = d.n;
  row_start_.assign(n + 1, 0);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      const double p = (*this)(x, y);
      if (p > 0.0) {
        targets_.push_back(y);
        weights_.push_back(p);
      }
    }
    row_start_[x + 1] = targets_.size();
  }
}

SupportRow StochasticMatrix::support_row(State x) const {
  const std::size_t b = row_start_[x];
  const std::size_t e = row_start_[x + 1];
  return {std::span(targets_).subspan(b, e - b), std::span(weights_).subspan(b, e - b)};
}

void StochasticMatrix::left_multiply(std::span<const double> v, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t n = size();
  for (std::size_t x = 0; x < n; ++x) {
    const double vx = v[x];
    if (vx == 0.0) continue;
    for (std::size_t k = row_start_[x]; k < row_start_[x + 1]; ++k) out[targets_[k]] += vx * weights_[k];
  }
}

void StochasticMatrix::right_multiply(std::span<const double> f, std::span<double> out) const {
  const std::size_t n = size();
  for (std::size_t x = 0; x < n; ++x) {
    double acc = 0.0;
    for (std::size_t k = row_start_[x]; k < row_start_[x + 1]; ++k) acc += weights_[k] * f[targets_[k]];
    out[x] = acc;
  }
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw Error(ErrorCode::InvalidArgument, "distribution has a negative or NaN entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance)
    throw Error(ErrorCode::InvalidArgument, "distribution does not sum to 1");
}

Distribution Distribution::unchecked(std::vector<double> probs) {
  Distribution d;
  d.probs_ = std::move(probs);
  return d;
}

Distribution Distribution::point_mass(std::size_t n, State x) {
  std::vector<double> p(n, 0.0);
  p.at(x) = 1.0;
  return unchecked(std::move(p));
}

Distribution Distribution::uniform(std::size_t n) { return unchecked(std::vector<double>(n, 1.0 / static_cast<double>(n))); }

double Distribution::mass() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

namespace {

double invariance_residual(const StochasticMatrix& P, const std::vector<double>& pi) {
  std::vector<double> next(pi.size());
  P.left_multiply(pi, next);
  double r = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) r = std::max(r, std::abs(next[i] - pi[i]));
  return r;
}

bool normalise(std::vector<double>& v) {
  double sum = 0.0;
  for (double& x : v) {
    if (x < 0.0) {
      if (x < -1e-12) return false;
      x = 0.0;
    }
    sum += x;
  }
  if (!(sum > 0.0)) return false;
  for (double& x : v) x /= sum;
  return true;
}

}  // namespace

Distribution stationary(const StochasticMatrix& P) {
  if (!P.irreducible()) throw Error(ErrorCode::NotIrreducible, "stationary law requires an irreducible chain");
  const auto n = static_cast<Eigen::Index>(P.size());

  // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  Matrix system = P.entries().transpose();
  system.diagonal().array() -= 1.0;
  system.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;
  const Eigen::PartialPivLU<Matrix> lu(system);
  const Eigen::VectorXd solution = lu.solve(rhs);

  std::vector<double> pi(solution.data(), solution.data() + n);
  if (normalise(pi) && invariance_residual(P, pi) <= 1e-10) return Distribution::unchecked(std::move(pi));

  // Ill-conditioned solve: power iteration with the heat kernel at unit time
  // (aperiodic even when P is periodic).
  std::vector<double> current(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
  const std::vector<double> weights = poisson_weights(1.0, 1e-16);
  std::vector<double> power(current.size()), acc(current.size()), scratch(current.size());
  for (int iter = 0; iter < 200000; ++iter) {
    power = current;
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (k > 0) {
        P.left_multiply(power, scratch);
        power.swap(scratch);
      }
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weights[k] * power[i];
    }
    normalise(acc);
    current.swap(acc);
    if (invariance_residual(P, current) <= 1e-12) break;
  }
  return Distribution::unchecked(std::move(current));
}

MetricData metric_data(const StochasticMatrix& P) {
  if (!P.symmetric_support())
    throw Error(ErrorCode::AsymmetricSupport, "graph metric requires P(x,y)>0 <=> P(y,x)>0");
  const std::size_t n = P.size();
  MetricData m;
  m.n = n;
  m.dist.assign(n * n, -1);
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s) {
    int* row = &m.dist[s * n];
    row[s] = 0;
    queue.assign(1, s);
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      for (std::size_t y : P.support_row(x).targets) {
        if (row[y] < 0) {
          row[y] = row[x] + 1;
          queue.push_back(y);
        }
      }
    }
  }
  for (int d : m.dist) {
    // Unreachable pairs only occur for reducible chains; report them as infinite diameter.
    m.diameter = (d < 0) ? std::numeric_limits<int>::max() : std::max(m.diameter, d);
    if (d < 0) break;
  }
  for (std::size_t x = 0; x < n; ++x) {
    const SupportRow row = P.support_row(x);
    for (std::size_t k = 0; k < row.targets.size(); ++k)
      if (row.targets[k] != x) m.delta = std::max(m.delta, 1.0 / row.weights[k]);
  }
  return m;
}

}  // namespace cutoff
