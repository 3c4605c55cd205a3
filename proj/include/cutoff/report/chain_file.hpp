#pragma once

#include <string>
#include <vector>

#include "cutoff/chain.hpp"

namespace cutoff::report {

/// Unvalidated contents of a chain file.
struct RawChain {
  Matrix entries;
  std::vector<std::string> labels;
};

/// Text format: the state count n, then n rows of n numbers. Blank lines and
/// text after '#' are ignored; an optional `labels: a b c ...` line names the states.
RawChain read_chain_file(const std::string& path);
RawChain parse_chain_text(const std::string& text);

void write_chain_file(const std::string& path, const StochasticMatrix& P);

}  // namespace cutoff::report
