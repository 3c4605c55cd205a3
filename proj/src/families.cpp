#include "cutoff/families.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>
#include <sstream>

namespace cutoff {

std::string_view to_string(CurvatureClaim claim) noexcept {
  switch (claim) {
    case CurvatureClaim::NonnegAbelian: return "nonneg-abelian";
    case CurvatureClaim::NonnegOther: return "nonneg-other";
    case CurvatureClaim::Unknown: return "unknown";
  }
  return "unknown";
}

std::size_t GroupSpec::order() const {
  std::size_t n = 1;
  for (long m : factors) n *= static_cast<std::size_t>(m);
  return n;
}

std::vector<long> GroupSpec::decode(std::size_t index) const {
  std::vector<long> e(factors.size());
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto m = static_cast<std::size_t>(factors[i]);
    e[i] = static_cast<long>(index % m);
    index /= m;
  }
  return e;
}

std::size_t GroupSpec::encode(const std::vector<long>& element) const {
  std::size_t index = 0;
  for (std::size_t i = factors.size(); i-- > 0;) {
    const long m = factors[i];
    const long r = ((element[i] % m) + m) % m;
    index = index * static_cast<std::size_t>(m) + static_cast<std::size_t>(r);
  }
  return index;
}

std::vector<long> GroupSpec::negate(const std::vector<long>& element) const {
  std::vector<long> out(element.size());
  for (std::size_t i = 0; i < element.size(); ++i) out[i] = ((-element[i]) % factors[i] + factors[i]) % factors[i];
  return out;
}

std::vector<State> ChainInstance::worst_case_starts() const {
  if (transitive) return {0};
  std::vector<State> all(matrix.size());
  std::iota(all.begin(), all.end(), State{0});
  return all;
}

namespace {

void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    std::ostringstream msg;
    msg << n << " states exceed the cap of " << cap;
    throw Error(ErrorCode::StateCapExceeded, msg.str());
  }
}

void check_group(const GroupSpec& group, std::size_t cap) {
  if (group.factors.empty()) throw Error(ErrorCode::InvalidArgument, "group needs at least one cyclic factor");
  std::size_t n = 1;
  for (long m : group.factors) {
    if (m < 2) throw Error(ErrorCode::InvalidArgument, "cyclic factors must have order >= 2");
    n *= static_cast<std::size_t>(m);
    check_cap(n, cap);
  }
}

bool generates(const GroupSpec& group, const std::vector<std::size_t>& gens) {
  const std::size_t n = group.order();
  std::vector<char> seen(n, 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!queue.empty()) {
    const std::size_t x = queue.front();
    queue.pop_front();
    const std::vector<long> ex = group.decode(x);
    for (std::size_t g : gens) {
      std::vector<long> sum = group.decode(g);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += ex[i];
      const std::size_t y = group.encode(sum);
      if (!seen[y]) {
        seen[y] = 1;
        ++count;
        queue.push_back(y);
      }
    }
  }
  return count == n;
}

std::string join(const std::vector<long>& v, char sep) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? std::string(1, sep) : "") << v[i];
  return s.str();
}

// Rejection sampling keeps draws identical across standard-library implementations.
long uniform_below(std::mt19937_64& rng, long m) {
  const auto range = static_cast<std::uint64_t>(m);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return static_cast<long>(r % range);
}

ChainInstance cayley_from_indices(const GroupSpec& group, const std::vector<std::size_t>& gens) {
  const std::size_t n = group.order();
  Matrix P = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double w = 1.0 / static_cast<double>(gens.size());
  for (std::size_t x = 0; x < n; ++x) {
    const std::vector<long> ex = group.decode(x);
    for (std::size_t g : gens) {
      std::vector<long> sum = group.decode(g);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += ex[i];
      P(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(group.encode(sum))) += w;
    }
  }
  ChainInstance inst{StochasticMatrix(std::move(P)), "cayley", {}, true, CurvatureClaim::NonnegAbelian};
  std::ostringstream label;
  for (std::size_t i = 0; i < group.factors.size(); ++i) label << (i ? "x" : "") << 'Z' << group.factors[i];
  inst.params["group"] = label.str();
  // Same syntax as the cayley spec string: coordinates joined by '/', elements by ','.
  std::ostringstream g;
  for (std::size_t i = 0; i < gens.size(); ++i) g << (i ? "," : "") << join(group.decode(gens[i]), '/');
  inst.params["gens"] = g.str();
  return inst;
}

}  // namespace

ChainInstance abelian_cayley(const GroupSpec& group, const std::vector<GroupElement>& generators, std::size_t state_cap) {
  check_group(group, state_cap);
  if (generators.empty()) throw Error(ErrorCode::NotGenerating, "empty generator set");
  std::vector<std::size_t> gens;
  for (const GroupElement& g : generators) {
    if (g.size() != group.factors.size())
      throw Error(ErrorCode::DimensionMismatch, "generator has the wrong number of coordinates");
    gens.push_back(group.encode(g));
  }
  // Multiset symmetry: each z occurs as often as -z.
  std::vector<std::size_t> sorted = gens, negated;
  for (std::size_t g : gens) negated.push_back(group.encode(group.negate(group.decode(g))));
  std::sort(sorted.begin(), sorted.end());
  std::sort(negated.begin(), negated.end());
  if (sorted != negated) throw Error(ErrorCode::NotSymmetricSet, "generator multiset is not closed under negation");
  if (!generates(group, gens)) throw Error(ErrorCode::NotGenerating, "generators do not generate the group");
  return cayley_from_indices(group, gens);
}

ChainInstance random_abelian_cayley(const GroupSpec& group, std::size_t d, std::uint64_t seed, std::size_t state_cap) {
  check_group(group, state_cap);
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "need at least one random generator");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<std::size_t> gens;
    for (std::size_t i = 0; i < d; ++i) {
      GroupElement z(group.factors.size());
      for (std::size_t c = 0; c < z.size(); ++c) z[c] = uniform_below(rng, group.factors[c]);
      gens.push_back(group.encode(z));
      gens.push_back(group.encode(group.negate(z)));
    }
    if (!generates(group, gens)) continue;
    ChainInstance inst = cayley_from_indices(group, gens);
    inst.family = "cayley-random";
    inst.params["d"] = std::to_string(d);
    inst.params["seed"] = std::to_string(seed);
    inst.params["attempts"] = std::to_string(attempt + 1);
    return inst;
  }
  throw Error(ErrorCode::GenerationFailed, "no generating set found after 100 draws");
}

namespace {

ChainInstance make_lazy(ChainInstance inst, double laziness) {
  if (!(laziness >= 0.0 && laziness < 1.0)) throw Error(ErrorCode::InvalidArgument, "laziness must lie in [0,1)");
  if (laziness == 0.0) return inst;
  Matrix P = (1.0 - laziness) * inst.matrix.entries();
  P.diagonal().array() += laziness;
  inst.matrix = StochasticMatrix(std::move(P));
  return inst;
}

}  // namespace

ChainInstance hypercube(std::size_t d, double laziness, std::size_t state_cap) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "hypercube dimension must be >= 1");
  if (d >= 63) throw Error(ErrorCode::StateCapExceeded, "hypercube dimension too large");
  GroupSpec group{std::vector<long>(d, 2)};
  check_group(group, state_cap);
  std::vector<std::size_t> gens;
  for (std::size_t i = 0; i < d; ++i) gens.push_back(std::size_t{1} << i);
  ChainInstance inst = make_lazy(cayley_from_indices(group, gens), laziness);
  inst.family = "hypercube";
  inst.params = {{"d", std::to_string(d)}, {"lazy", std::to_string(laziness)}};
  return inst;
}

ChainInstance cycle(std::size_t n, std::size_t state_cap) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "cycle needs n >= 2");
  check_cap(n, state_cap);
  GroupSpec group{{static_cast<long>(n)}};
  ChainInstance inst = cayley_from_indices(group, {1, n - 1});
  inst.family = "cycle";
  inst.params = {{"n", std::to_string(n)}};
  return inst;
}

ChainInstance complete_graph(std::size_t n, std::size_t state_cap) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "complete graph needs n >= 2");
  check_cap(n, state_cap);
  GroupSpec group{{static_cast<long>(n)}};
  std::vector<std::size_t> gens(n - 1);
  std::iota(gens.begin(), gens.end(), std::size_t{1});
  ChainInstance inst = cayley_from_indices(group, gens);
  inst.family = "complete";
  inst.params = {{"n", std::to_string(n)}};
  return inst;
}

ChainInstance birth_death(const std::vector<double>& up, const std::vector<double>& down, std::size_t state_cap) {
  if (up.empty() || up.size() != down.size())
    throw Error(ErrorCode::InvalidArgument, "birth-death chain needs equally many (>= 1) up and down rates");
  const std::size_t n = up.size() + 1;
  check_cap(n, state_cap);
  Matrix P = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(up[i] > 0.0) || !(down[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "rates must be positive");
    P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = up[i];
    P(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = down[i];
  }
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    const double hold = 1.0 - P.row(i).sum();
    if (hold < -1e-15) throw Error(ErrorCode::InvalidArgument, "rates leaving a state exceed 1");
    P(i, i) = std::max(0.0, hold);
  }
  // Stochastic monotonicity: the CDF of row i dominates that of row i+1.
  bool monotone = true;
  for (Eigen::Index i = 0; i + 1 < static_cast<Eigen::Index>(n); ++i) {
    double fi = 0.0, fj = 0.0;
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(n); ++k) {
      fi += P(i, k);
      fj += P(i + 1, k);
      if (fj > fi + 1e-15) monotone = false;
    }
  }
  ChainInstance inst{StochasticMatrix(std::move(P)), "bd", {}, false,
                     monotone ? CurvatureClaim::NonnegOther : CurvatureClaim::Unknown};
  inst.params["n"] = std::to_string(n);
  inst.params["monotone"] = monotone ? "true" : "false";
  return inst;
}

ChainInstance perturb_toward_uniform(const ChainInstance& base, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "theta must lie in [0,1]");
  if (theta == 0.0) return base;
  const std::size_t n = base.matrix.size();
  // Stationary law of the base chain, which the perturbation preserves.
  Eigen::VectorXd pi;
  {
    Matrix system = base.matrix.entries().transpose();
    system.diagonal().array() -= 1.0;
    system.row(static_cast<Eigen::Index>(n) - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    rhs(static_cast<Eigen::Index>(n) - 1) = 1.0;
    pi = Eigen::PartialPivLU<Matrix>(system).solve(rhs);
  }
  Matrix P = (1.0 - theta) * base.matrix.entries();
  for (Eigen::Index x = 0; x < static_cast<Eigen::Index>(n); ++x) P.row(x) += theta * pi.transpose();
  ChainInstance inst{StochasticMatrix(std::move(P)), "perturb", base.params, base.transitive, base.curvature_claim};
  inst.params["theta"] = std::to_string(theta);
  inst.params["inner"] = base.family;
  double min_pi = pi.minCoeff();
  inst.params["delta_lower_bound"] = std::to_string(1.0 / (theta * min_pi));
  return inst;
}

ChainInstance conjugacy_walk(std::size_t k, const std::vector<int>& cycle_type, std::size_t state_cap) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "symmetric group needs k >= 2");
  if (k > 6) throw Error(ErrorCode::StateCapExceeded, "conjugacy walks are limited to k <= 6");
  std::size_t moved = 0;
  for (int c : cycle_type) {
    if (c < 2) throw Error(ErrorCode::InvalidArgument, "cycle lengths must be >= 2");
    moved += static_cast<std::size_t>(c);
  }
  if (moved == 0 || moved > k) throw Error(ErrorCode::InvalidArgument, "cycle type does not fit in S_k");

  std::vector<std::vector<int>> perms;
  std::vector<int> p(k);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  check_cap(perms.size(), state_cap);

  auto type_of = [&](const std::vector<int>& perm) {
    std::vector<int> lengths;
    std::vector<char> seen(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
      if (seen[i]) continue;
      int len = 0;
      for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) {
        seen[j] = 1;
        ++len;
      }
      if (len > 1) lengths.push_back(len);
    }
    std::sort(lengths.begin(), lengths.end());
    return lengths;
  };
  std::vector<int> wanted = cycle_type;
  std::sort(wanted.begin(), wanted.end());
  std::vector<std::size_t> klass;
  for (std::size_t i = 0; i < perms.size(); ++i)
    if (type_of(perms[i]) == wanted) klass.push_back(i);

  // Lexicographic rank lookup; permutations are already sorted.
  auto index_of = [&](const std::vector<int>& perm) {
    return static_cast<std::size_t>(std::lower_bound(perms.begin(), perms.end(), perm) - perms.begin());
  };
  const std::size_t n = perms.size();
  Matrix P = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double w = 1.0 / static_cast<double>(klass.size());
  std::vector<int> composed(k);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t c : klass) {
      for (std::size_t i = 0; i < k; ++i) composed[i] = perms[c][static_cast<std::size_t>(perms[s][i])];
      P(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(index_of(composed))) += w;
    }
  }
  ChainInstance inst{StochasticMatrix(std::move(P)), "sym", {}, true, CurvatureClaim::NonnegOther};
  inst.params["k"] = std::to_string(k);
  std::ostringstream t;
  for (std::size_t i = 0; i < cycle_type.size(); ++i) t << (i ? "+" : "") << cycle_type[i];
  inst.params["class"] = t.str();
  return inst;
}

}  // namespace cutoff
