#pragma once

#include <cstdint>
#include <vector>

#include "cutoff/curvature.hpp"
#include "cutoff/entropy.hpp"
#include "cutoff/spectral.hpp"
#include "cutoff/verdict.hpp"

namespace cutoff {

struct SuiteConfig {
  std::vector<double> eps{0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95};
  /// Times at which the time-indexed inequalities are checked; empty selects an
  /// automatic grid spanning [0, 2 t_mix(1/4)] plus diam/4.
  std::vector<double> times;
  int concentration_samples = 100;
  std::uint64_t seed = 1;
};

/// Inputs shared by every verdict of the suite.
struct ChainFacts {
  const Semigroup& semigroup;
  const MetricData& metric;
  const SpectralReport& spectral;
  const CurvatureReport& curvature;
};

std::vector<double> automatic_time_grid(const Semigroup& S, const MetricData& metric);

/// Every proved inequality (entropic upper and lower bounds, the window bound,
/// local concentration, the log-gradient estimate, the diameter bound, and both
/// varentropy forms), one verdict per (inequality, parameter) pair.
std::vector<InequalityVerdict> run_theorem_suite(const ChainFacts& facts, const SuiteConfig& config);

bool all_pass(const std::vector<InequalityVerdict>& verdicts);

}  // namespace cutoff
