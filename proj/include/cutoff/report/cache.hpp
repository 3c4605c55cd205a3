#pragma once

#include <filesystem>
#include <string>

#include "cutoff/entropy.hpp"

namespace cutoff::report {

/// SHA-256 over the matrix written row by row at 17 significant digits.
std::string matrix_digest(const StochasticMatrix& P);

/// Heat-kernel rows stored one file per key under `dir`, named by the digest of
/// (matrix digest, t, tol, starts). A file that fails its checksum is reported
/// on stderr and treated as a miss; the next store overwrites it.
class DiskRowCache final : public RowCache {
 public:
  DiskRowCache(std::filesystem::path dir, std::string matrix_digest);

  std::optional<std::vector<Distribution>> load(double t, double tol, std::span<const State> starts) override;
  void store(double t, double tol, std::span<const State> starts, const std::vector<Distribution>& rows) override;

  std::filesystem::path path_for(double t, double tol, std::span<const State> starts) const;

 private:
  std::filesystem::path dir_;
  std::string matrix_digest_;
};

}  // namespace cutoff::report
