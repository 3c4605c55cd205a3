#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cutoff/chain.hpp"

namespace cutoff {

inline constexpr std::size_t kDefaultStateCap = 5000;

enum class CurvatureClaim { NonnegAbelian, NonnegOther, Unknown };

std::string_view to_string(CurvatureClaim claim) noexcept;

/// Z_{m1} x ... x Z_{mk}; elements are encoded in mixed radix, first factor fastest.
struct GroupSpec {
  std::vector<long> factors;

  std::size_t order() const;
  std::vector<long> decode(std::size_t index) const;
  std::size_t encode(const std::vector<long>& element) const;  // reduces each coordinate mod its factor
  std::vector<long> negate(const std::vector<long>& element) const;
};

using GroupElement = std::vector<long>;

struct ChainInstance {
  StochasticMatrix matrix;
  std::string family;
  std::map<std::string, std::string> params;
  bool transitive = false;
  CurvatureClaim curvature_claim = CurvatureClaim::Unknown;

  /// Starting states that realise the worst case: {0} for transitive chains, all states otherwise.
  std::vector<State> worst_case_starts() const;
};

/// P(x, y) = #{z in S : y = x + z} / |S|. S must be closed under negation (as a
/// multiset) and generate the group.
ChainInstance abelian_cayley(const GroupSpec& group, const std::vector<GroupElement>& generators,
                             std::size_t state_cap = kDefaultStateCap);

/// d i.i.d. uniform draws, symmetrised as draws + (-draws); redrawn up to 100 times until generating.
ChainInstance random_abelian_cayley(const GroupSpec& group, std::size_t d, std::uint64_t seed,
                                    std::size_t state_cap = kDefaultStateCap);

/// Simple random walk on {0,1}^d, made lazy as laziness*I + (1 - laziness)*P.
ChainInstance hypercube(std::size_t d, double laziness = 0.0, std::size_t state_cap = kDefaultStateCap);
ChainInstance cycle(std::size_t n, std::size_t state_cap = kDefaultStateCap);
ChainInstance complete_graph(std::size_t n, std::size_t state_cap = kDefaultStateCap);

/// Tridiagonal chain on {0..n-1} with n = up.size() + 1: P(i,i+1) = up[i], P(i+1,i) = down[i],
/// remaining mass held in place.
ChainInstance birth_death(const std::vector<double>& up, const std::vector<double>& down,
                          std::size_t state_cap = kDefaultStateCap);

/// (1 - theta) P + theta * (every row equal to pi).
ChainInstance perturb_toward_uniform(const ChainInstance& base, double theta);

/// Random walk on S_k driven by a uniformly chosen element of one conjugacy class,
/// given by its non-trivial cycle lengths (default: transpositions).
ChainInstance conjugacy_walk(std::size_t k, const std::vector<int>& cycle_type = {2},
                             std::size_t state_cap = kDefaultStateCap);

}  // namespace cutoff
