#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cutoff/families.hpp"

namespace cutoff::report {

/// Builds the chain named by a family spec such as `hypercube:d=8:lazy=0.0`,
/// `cayley:Z12xZ2:gens=1,-1,5,-5` or `perturb:theta=0.01:cycle:n=32`.
/// Throws SpecParseError on malformed text; generator errors propagate.
ChainInstance build_from_spec(std::string_view spec, std::size_t state_cap = kDefaultStateCap);

/// Parses `Z12xZ2` and `Z2^8`.
GroupSpec parse_group(std::string_view text);

/// One member of an expanded range spec.
struct SpecMember {
  std::string spec;
  std::string param;   // e.g. "d=6"; empty when the spec had no range
  double size = 0.0;   // the swept value
};

/// Expands the single `a..b` range in a spec (e.g. `hypercube:d=4..10`) into
/// one spec per integer value. A spec without a range yields itself.
std::vector<SpecMember> expand_range(std::string_view spec);

}  // namespace cutoff::report
