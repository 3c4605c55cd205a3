#include <doctest.h>

#include <cmath>
#include <random>

#include "cutoff/chain.hpp"
#include "cutoff/entropy.hpp"
#include "cutoff/families.hpp"
#include "cutoff/spectral.hpp"
#include "oracles.hpp"

using namespace cutoff;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

const Matrix kFlip = mat({{0, 1}, {1, 0}});

}  // namespace

TEST_SUITE("chain") {

TEST_CASE("validate reports structure without throwing") {
  const Diagnostics flip = validate(kFlip);
  CHECK(flip.stochastic());
  CHECK(flip.irreducible);
  CHECK(flip.symmetric_support);
  CHECK_FALSE(flip.at_least_three_states);

  const Diagnostics id = validate(Matrix::Identity(3, 3));
  CHECK(id.stochastic());
  CHECK_FALSE(id.irreducible);

  const Diagnostics short_row = validate(mat({{0.5, 0.4}, {0.5, 0.5}}));
  CHECK_FALSE(short_row.stochastic());
  CHECK(short_row.max_row_residual == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(short_row.worst_row == 0);

  CHECK_FALSE(validate(mat({{1.5, -0.5}, {0.5, 0.5}})).nonnegative);
  CHECK_FALSE(validate(Matrix::Zero(2, 3)).square);
  CHECK(validate(mat({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}})).at_least_three_states);
  CHECK_FALSE(validate(mat({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}})).symmetric_support);
}

TEST_CASE("StochasticMatrix rejects what validate flags") {
  CHECK_THROWS_AS(StochasticMatrix(mat({{0.5, 0.4}, {0.5, 0.5}})), Error);
  try {
    StochasticMatrix bad(mat({{0.5, 0.4}, {0.5, 0.5}}));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidMatrix);
  }
  CHECK_THROWS(StochasticMatrix(kFlip, {"a"}));
  const StochasticMatrix P(kFlip, {"heads", "tails"});
  CHECK(P.labels()[1] == "tails");
}

TEST_CASE("Distribution checks normalisation") {
  CHECK_THROWS(Distribution({0.5, 0.6}));
  CHECK_THROWS(Distribution({1.5, -0.5}));
  CHECK(Distribution({0.25, 0.75}).mass() == doctest::Approx(1.0));
  CHECK(Distribution::point_mass(4, 2)[2] == 1.0);
  CHECK(Distribution::uniform(4)[3] == 0.25);
}

TEST_CASE("stationary law") {
  SUBCASE("doubly stochastic gives uniform") {
    const Distribution pi = stationary(StochasticMatrix(mat({{0.2, 0.5, 0.3}, {0.5, 0.1, 0.4}, {0.3, 0.4, 0.3}})));
    for (State x = 0; x < 3; ++x) CHECK(pi[x] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
  SUBCASE("birth-death detailed balance") {
    const double p = 0.3, q = 0.5;
    const Distribution pi = stationary(StochasticMatrix(mat({{1 - p, p, 0}, {q, 1 - p - q, p}, {0, q, 1 - q}})));
    const double r = p / q, z = 1 + r + r * r;
    CHECK(pi[0] == doctest::Approx(1 / z).epsilon(1e-12));
    CHECK(pi[1] == doctest::Approx(r / z).epsilon(1e-12));
    CHECK(pi[2] == doctest::Approx(r * r / z).epsilon(1e-12));
  }
  SUBCASE("two states") {
    const Distribution pi = stationary(StochasticMatrix(mat({{0.9, 0.1}, {0.2, 0.8}})));
    CHECK(pi[0] == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(pi[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
  SUBCASE("reducible chains are refused") {
    try {
      stationary(StochasticMatrix(Matrix::Identity(3, 3)));
      FAIL("expected NotIrreducible");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotIrreducible);
    }
  }
  SUBCASE("pi P = pi on random chains, including non-reversible ones") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      const StochasticMatrix P(oracle::random_chain(3 + trial % 25, rng, 0.3, trial % 2 == 0));
      const Distribution pi = stationary(P);
      std::vector<double> out(P.size());
      P.left_multiply(pi.span(), out);
      double worst = 0.0;
      for (State x = 0; x < P.size(); ++x) worst = std::max(worst, std::abs(out[x] - pi[x]));
      CHECK(worst <= 1e-10);
      CHECK(pi.mass() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("metric data") {
  const MetricData c6 = metric_data(cycle(6).matrix);
  CHECK(c6.diameter == 3);
  CHECK(c6.delta == doctest::Approx(2.0));
  const MetricData k7 = metric_data(complete_graph(7).matrix);
  CHECK(k7.diameter == 1);
  CHECK(k7.delta == doctest::Approx(6.0));
  const MetricData q4 = metric_data(hypercube(4).matrix);
  CHECK(q4.diameter == 4);
  CHECK(q4.delta == doctest::Approx(4.0));
  CHECK(q4(0, 15) == 4);

  try {
    metric_data(StochasticMatrix(mat({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}})));
    FAIL("expected AsymmetricSupport");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AsymmetricSupport);
  }
}

TEST_CASE("metric data matches Floyd-Warshall and is a metric") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 15; ++trial) {
    const StochasticMatrix P(oracle::random_chain(4 + trial, rng, 0.15));
    const MetricData m = metric_data(P);
    const auto d = oracle::floyd_distances(P.entries());
    for (State x = 0; x < P.size(); ++x)
      for (State y = 0; y < P.size(); ++y) {
        REQUIRE(m(x, y) == d[x][y]);
        CHECK(m(x, y) == m(y, x));
        CHECK((m(x, y) == 1) == (x != y && P(x, y) > 0));
        for (State z = 0; z < P.size(); ++z) CHECK(m(x, z) <= m(x, y) + m(y, z));
      }
  }
}

TEST_CASE("Poisson weights") {
  CHECK_THROWS_AS(poisson_weights(1.0, 0.0), Error);
  CHECK_THROWS_AS(poisson_weights(1.0, 1e-5), Error);
  CHECK_THROWS_AS(poisson_weights(-1.0, 1e-12), Error);
  for (double t : {0.01, 1.0, 7.5, 120.0}) {
    const std::vector<double> w = poisson_weights(t, 1e-12);
    CHECK(w.size() - 1 >= static_cast<std::size_t>(std::ceil(t + 8 * std::sqrt(t) + 8)));
    double s = 0.0;
    for (double q : w) s += q;
    CHECK(1.0 - s <= 1e-12 + 1e-15);
    CHECK(w[1] == doctest::Approx(t * std::exp(-t)).epsilon(1e-12));
  }
}

TEST_CASE("heat kernel rows") {
  const StochasticMatrix flip(kFlip);
  SUBCASE("t = 0 is the point mass") {
    const Distribution r = heat_kernel_row(flip, 1, 0.0, 1e-12);
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 1.0);
    CHECK(heat_kernel(hypercube(3).matrix, 0.0, 1e-12).isIdentity(0.0));
  }
  SUBCASE("two-state flip chain") {
    const Distribution r = heat_kernel_row(flip, 0, 1.0, 1e-15);
    CHECK(r[0] == doctest::Approx(0.5 * (1 + std::exp(-2.0))).epsilon(1e-14));
    CHECK(r[1] == doctest::Approx(0.5 * (1 - std::exp(-2.0))).epsilon(1e-14));
  }
  SUBCASE("long times reach equilibrium") {
    std::mt19937_64 rng(3);
    const StochasticMatrix P(oracle::random_chain(12, rng));
    const Distribution pi = stationary(P);
    const double t = 50 * relaxation_time(P).t_rel * std::log(12.0);
    for (State o : {0, 5, 11}) CHECK(tv_distance(heat_kernel_row(P, o, t, 1e-12), pi) <= 1e-6);
  }
  SUBCASE("doubly stochastic chains keep unit row and column sums") {
    const Matrix H = heat_kernel(abelian_cayley(GroupSpec{{12}}, {{1}, {-1}, {5}, {-5}}).matrix, 2.5, 1e-14);
    for (Eigen::Index i = 0; i < H.rows(); ++i) {
      CHECK(H.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(H.col(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("every row is a distribution") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
      const StochasticMatrix P(oracle::random_chain(6 + trial, rng, 0.3, false));
      for (double t : {0.0, 0.3, 4.0, 30.0}) {
        const Distribution r = heat_kernel_row(P, static_cast<State>(trial % 6), t, 1e-14);
        CHECK(r.mass() == doctest::Approx(1.0).epsilon(1e-13));
        for (double v : r.probs()) CHECK(v >= 0.0);
        CHECK_NOTHROW(Distribution(r.probs()));
      }
    }
  }
}

TEST_CASE("heat kernel matches the Taylor series of exp(t(P - I))") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t n = 3 + static_cast<std::size_t>(trial) * 3;
    const StochasticMatrix P(oracle::random_chain(n, rng, 0.3, trial % 2 == 1));
    for (double t : {0.1, 1.0, 5.0, 10.0}) {
      const Matrix H = heat_kernel(P, t, 1e-30);
      const auto T = oracle::taylor_expm(P.entries(), t, 4 * poisson_weights(t, 1e-30).size());
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          worst = std::max(worst, static_cast<double>(std::abs(static_cast<long double>(H(i, j)) - T[i][j])));
      CHECK(worst <= 1e-10);
    }
  }
}

TEST_CASE("semigroup property") {
  std::mt19937_64 rng(99);
  for (std::size_t n : {5, 20, 50}) {
    const StochasticMatrix P(oracle::random_chain(n, rng, 0.1, false));
    for (auto [s, t] : {std::pair{0.3, 1.7}, std::pair{2.0, 5.0}}) {
      const Matrix lhs = heat_kernel(P, s + t, 1e-30);
      const Matrix rhs = heat_kernel(P, s, 1e-30) * heat_kernel(P, t, 1e-30);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("parallel rows are identical to serial rows") {
  const StochasticMatrix P = hypercube(6).matrix;
  const Matrix serial = heat_kernel(P, 2.25, 1e-20, 1);
  const Matrix threaded = heat_kernel(P, 2.25, 1e-20, 4);
  CHECK((serial - threaded).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("semigroup apply agrees with kernel rows") {
  std::mt19937_64 rng(4);
  const StochasticMatrix P(oracle::random_chain(9, rng, 0.3, false));
  std::vector<double> f(9);
  std::normal_distribution<double> g;
  for (double& v : f) v = g(rng);
  const Observable pf = heat_semigroup_apply(P, f, 1.3, 1e-25);
  for (State x = 0; x < 9; ++x) {
    const Distribution r = heat_kernel_row(P, x, 1.3, 1e-25);
    double s = 0.0;
    for (State y = 0; y < 9; ++y) s += r[y] * f[y];
    CHECK(pf[x] == doctest::Approx(s).epsilon(1e-12));
  }
  CHECK_THROWS(heat_semigroup_apply(P, std::vector<double>(3), 1.0, 1e-12));
}

}  // TEST_SUITE
