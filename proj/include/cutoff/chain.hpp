#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cutoff/error.hpp"

namespace cutoff {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Observable = std::vector<double>;
using State = std::size_t;

inline constexpr double kStochasticTolerance = 1e-12;

/// Report produced by validate(); never throws, so it can describe malformed input.
struct Diagnostics {
  std::size_t n = 0;
  bool square = true;
  bool nonnegative = true;
  bool finite = true;
  double max_row_residual = 0.0;   // max_x |sum_y P(x,y) - 1|
  std::size_t worst_row = 0;
  bool irreducible = false;
  bool symmetric_support = false;
  bool at_least_three_states = false;

  bool stochastic() const { return square && finite && nonnegative && max_row_residual <= kStochasticTolerance && n >= 2; }
};

Diagnostics validate(const Matrix& entries);

/// Compressed view of the positive entries of one row.
struct SupportRow {
  std::span<const std::size_t> targets;
  std::span<const double> weights;
};

/// Row-stochastic transition kernel P. Immutable after construction; the
/// constructor rejects anything validate() would flag as non-stochastic.
class StochasticMatrix {
 public:
  explicit StochasticMatrix(Matrix entries, std::vector<std::string> labels = {});

  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  double operator()(State x, State y) const { return entries_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)); }
  const Matrix& entries() const { return entries_; }
  const std::vector<std::string>& labels() const { return labels_; }

  bool irreducible() const { return irreducible_; }
  bool symmetric_support() const { return symmetric_support_; }

  SupportRow support_row(State x) const;
  std::size_t support_size() const { return targets_.size(); }

  /// out = v P (row vector times matrix), scatter over the positive entries.
  void left_multiply(std::span<const double> v, std::span<double> out) const;
  /// out = P f (matrix times column observable).
  void right_multiply(std::span<const double> f, std::span<double> out) const;

 private:
  Matrix entries_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> targets_;
  std::vector<double> weights_;
  bool irreducible_ = false;
  bool symmetric_support_ = false;
};

/// Probability vector over states.
class Distribution {
 public:
  Distribution() = default;
  /// Throws InvalidArgument unless entries are >= 0 and sum to 1 within 1e-12.
  explicit Distribution(std::vector<double> probs);

  /// Skips the normalisation check; used for truncated heat-kernel rows whose
  /// mass is 1 - (Poisson tail) rather than exactly 1.
  static Distribution unchecked(std::vector<double> probs);
  static Distribution point_mass(std::size_t n, State x);
  static Distribution uniform(std::size_t n);

  std::size_t size() const { return probs_.size(); }
  double operator[](State x) const { return probs_[x]; }
  const std::vector<double>& probs() const { return probs_; }
  std::span<const double> span() const { return probs_; }
  double mass() const;

 private:
  std::vector<double> probs_;
};

/// Graph metric of the support, plus the sparsity parameter.
struct MetricData {
  std::size_t n = 0;
  std::vector<int> dist;  // row-major n x n
  int diameter = 0;
  double delta = 1.0;     // max over x~y of 1/P(x,y)

  int operator()(State x, State y) const { return dist[x * n + y]; }
};

/// Solves pi P = pi. Throws NotIrreducible for reducible chains.
Distribution stationary(const StochasticMatrix& P);

/// All-pairs BFS distances on the support graph. Throws AsymmetricSupport.
MetricData metric_data(const StochasticMatrix& P);

/// Poisson(t) weights q(0..K), where K is the smallest truncation whose tail
/// mass is <= tol, but never below ceil(t + 8 sqrt(t) + 8).
std::vector<double> poisson_weights(double t, double tol);

/// Row o of the heat kernel exp(t(P - I)), truncated Poisson mixture of P^k.
Distribution heat_kernel_row(const StochasticMatrix& P, State o, double t, double tol);

/// All rows (or those listed in `starts`), evaluated independently in parallel.
std::vector<Distribution> heat_kernel_rows(const StochasticMatrix& P, std::span<const State> starts, double t,
                                           double tol, unsigned threads = 1);

/// Full heat kernel as a matrix.
Matrix heat_kernel(const StochasticMatrix& P, double t, double tol, unsigned threads = 1);

/// (P_t f)(x) = sum_y P_t(x, y) f(y), by the same truncated series applied to f.
Observable heat_semigroup_apply(const StochasticMatrix& P, std::span<const double> f, double t, double tol);

void check_tolerance(double tol);

}  // namespace cutoff
