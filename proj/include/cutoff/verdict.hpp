#pragma once

#include <string>
#include <vector>

namespace cutoff {

/// One checked inequality lhs <= rhs. For sweeps over many samples the verdict
/// carries the sample with the smallest slack.
struct InequalityVerdict {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;        // rhs - lhs
  double tolerance = 1e-9;
  bool pass = false;         // slack >= -tolerance
  bool vacuous = false;      // hypothesis not met; passes without testing the conclusion
  std::string context;       // free-form "key=value;..." parameters (eps, t, o, ...)
  int samples = 0;
};

InequalityVerdict make_verdict(std::string name, double lhs, double rhs, double tolerance, std::string context = {});

/// Keeps the tighter of two verdicts for the same inequality; sample counts add up.
void keep_worst(InequalityVerdict& worst, const InequalityVerdict& candidate);

}  // namespace cutoff
