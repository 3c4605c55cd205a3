// Independent reference implementations used only by the tests. None of them
// calls into the library's numerical routines.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "cutoff/chain.hpp"

namespace oracle {

using cutoff::Matrix;

/// Random irreducible stochastic matrix. A Hamiltonian cycle (made
/// bidirectional when `symmetric`) guarantees irreducibility; other entries are
/// kept with probability `density`.
inline Matrix random_chain(std::size_t n, std::mt19937_64& rng, double density = 0.4, bool symmetric = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix P = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::vector<bool>> edge(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    const int a = perm[i], b = perm[(i + 1) % n];
    edge[a][b] = true;
    if (symmetric) edge[b][a] = true;
  }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (u(rng) < density) {
        edge[x][y] = true;
        if (symmetric) edge[y][x] = true;
      }
  for (std::size_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (std::size_t y = 0; y < n; ++y)
      if (edge[x][y]) s += P(x, y) = 0.05 + u(rng);
    for (std::size_t y = 0; y < n; ++y) P(x, y) /= s;
  }
  return P;
}

/// exp(t (P - I)) by its plain Taylor series in long double, `terms` terms.
inline std::vector<std::vector<long double>> taylor_expm(const Matrix& P, double t, std::size_t terms) {
  const std::size_t n = static_cast<std::size_t>(P.rows());
  std::vector<std::vector<long double>> A(n, std::vector<long double>(n)), term(n, std::vector<long double>(n, 0.0L)),
      sum(n, std::vector<long double>(n, 0.0L)), next(n, std::vector<long double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      A[i][j] = static_cast<long double>(t) * (static_cast<long double>(P(i, j)) - (i == j ? 1.0L : 0.0L));
  for (std::size_t i = 0; i < n; ++i) term[i][i] = sum[i][i] = 1.0L;
  for (std::size_t k = 1; k < terms; ++k) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        long double acc = 0.0L;
        for (std::size_t m = 0; m < n; ++m) acc += term[i][m] * A[m][j];
        next[i][j] = acc / static_cast<long double>(k);
      }
    std::swap(term, next);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) sum[i][j] += term[i][j];
  }
  return sum;
}

/// Graph distances by Floyd-Warshall on the positive-entry graph.
inline std::vector<std::vector<int>> floyd_distances(const Matrix& P) {
  const std::size_t n = static_cast<std::size_t>(P.rows());
  const int inf = std::numeric_limits<int>::max() / 4;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (std::size_t x = 0; x < n; ++x) {
    d[x][x] = 0;
    for (std::size_t y = 0; y < n; ++y)
      if (x != y && P(x, y) > 0) d[x][y] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

/// W1 on a union support of at most ~7 points by vertex enumeration of the
/// dual polytope {f : |f(a) - f(b)| <= d(a,b)} with f(first) = 0. Each vertex
/// is fixed by a spanning tree of tight constraints; trees come from Pruefer
/// sequences and every edge orientation is tried.
inline double w1_exhaustive(const std::vector<double>& mu, const std::vector<double>& nu,
                            const std::vector<std::vector<int>>& dist) {
  std::vector<std::size_t> pts;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu[i] > 0 || nu[i] > 0) pts.push_back(i);
  const std::size_t k = pts.size();
  if (k <= 1) return 0.0;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> trees;
  if (k == 2) {
    trees.push_back({{0, 1}});
  } else {
    std::vector<std::size_t> seq(k - 2, 0);
    while (true) {
      std::vector<int> degree(k, 1);
      for (std::size_t s : seq) ++degree[s];
      std::vector<std::pair<std::size_t, std::size_t>> edges;
      for (std::size_t s : seq) {
        std::size_t leaf = 0;
        while (degree[leaf] != 1) ++leaf;
        edges.emplace_back(leaf, s);
        --degree[leaf];
        --degree[s];
      }
      std::size_t a = k, b = k;
      for (std::size_t i = 0; i < k; ++i)
        if (degree[i] == 1) (a == k ? a : b) = i;
      edges.emplace_back(a, b);
      trees.push_back(edges);
      std::size_t pos = 0;
      while (pos < seq.size() && ++seq[pos] == k) seq[pos++] = 0;
      if (pos == seq.size()) break;
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& tree : trees) {
    for (unsigned signs = 0; signs < (1u << (k - 1)); ++signs) {
      // Propagate values from point 0 along the tree.
      std::vector<double> f(k, std::numeric_limits<double>::quiet_NaN());
      f[0] = 0.0;
      for (std::size_t pass = 0; pass < k; ++pass)
        for (std::size_t e = 0; e < tree.size(); ++e) {
          const auto [a, b] = tree[e];
          const double len = dist[pts[a]][pts[b]] * ((signs >> e) & 1u ? 1.0 : -1.0);
          if (!std::isnan(f[a]) && std::isnan(f[b])) f[b] = f[a] + len;
          if (!std::isnan(f[b]) && std::isnan(f[a])) f[a] = f[b] - len;
        }
      bool feasible = true;
      for (std::size_t i = 0; i < k && feasible; ++i)
        for (std::size_t j = 0; j < k; ++j)
          if (std::abs(f[i] - f[j]) > dist[pts[i]][pts[j]] + 1e-12) {
            feasible = false;
            break;
          }
      if (!feasible) continue;
      double v = 0.0;
      for (std::size_t i = 0; i < k; ++i) v += f[i] * (mu[pts[i]] - nu[pts[i]]);
      best = std::max(best, v);
    }
  }
  return best;
}

/// Gamma_2(f,f)(x) straight from the definition: 1/2 L Gamma(f,f) - Gamma(f, Lf),
/// with every operator a dense double loop.
inline double gamma2_naive(const Matrix& P, const std::vector<double>& f, std::size_t x) {
  const std::size_t n = static_cast<std::size_t>(P.rows());
  auto L = [&](const std::vector<double>& g, std::size_t z) {
    double s = 0.0;
    for (std::size_t y = 0; y < n; ++y) s += P(z, y) * (g[y] - g[z]);
    return s;
  };
  auto Gamma = [&](const std::vector<double>& g, const std::vector<double>& h, std::size_t z) {
    double s = 0.0;
    for (std::size_t y = 0; y < n; ++y) s += P(z, y) * (g[y] - g[z]) * (h[y] - h[z]);
    return 0.5 * s;
  };
  std::vector<double> gff(n), lf(n);
  for (std::size_t z = 0; z < n; ++z) {
    gff[z] = Gamma(f, f, z);
    lf[z] = L(f, z);
  }
  return 0.5 * L(gff, x) - Gamma(f, lf, x);
}

/// Worst-case TV for the complete graph K_n: (1 - 1/n) e^{-t n / (n-1)}.
inline double complete_graph_tmix(std::size_t n, double eps) {
  const double nn = static_cast<double>(n);
  return ((nn - 1.0) / nn) * std::log((1.0 - 1.0 / nn) / eps);
}

}  // namespace oracle
