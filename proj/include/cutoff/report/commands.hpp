#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cutoff/families.hpp"

namespace cutoff::report {

enum ExitCode : int { kOk = 0, kFailure = 1, kSpecError = 2, kVerdictFailure = 3, kResourceCap = 4 };

struct RunConfig {
  std::string command;
  std::string spec;
  std::string chain_file;
  std::vector<double> eps;     // empty: the command's own default
  std::string tgrid = "auto";
  double tol = 1e-30;          // Poisson tail mass of the heat-kernel truncation
  double tmix_tol = 0.0;       // bisection tolerance for t_mix; 0 = relative 1e-4
  std::uint64_t seed = 1;
  std::string out = ".";
  bool cache = true;
  unsigned threads = 1;
  std::size_t state_cap = kDefaultStateCap;
};

/// Throws InvalidArgument for eps outside (0,1), a bad tolerance or zero threads.
void validate_config(const RunConfig& config);

/// `auto` yields an empty grid (the caller picks one); `a:b:steps` yields steps
/// evenly spaced points from a to b inclusive.
std::vector<double> parse_time_grid(const std::string& text);

int cmd_analyze(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);
int cmd_scan(const RunConfig& config, std::ostream& log);
int cmd_curvature(const RunConfig& config, std::ostream& log);
int cmd_random_cayley(const RunConfig& config, std::ostream& log);

/// Dispatches on config.command and maps errors onto exit codes.
int run_command(const RunConfig& config, std::ostream& log);

}  // namespace cutoff::report
