#include "cutoff/report/cache.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cutoff::report {

namespace {

constexpr char kMagic[8] = {'C', 'L', 'R', 'O', 'W', 'S', '0', '1'};

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::IoError, "SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

template <class T>
void put(std::string& out, const T& value) {
  out.append(reinterpret_cast<const char*>(&value), sizeof value);
}

}  // namespace

std::string matrix_digest(const StochasticMatrix& P) {
  std::string text = std::to_string(P.size()) + "\n";
  char buf[40];
  for (State x = 0; x < P.size(); ++x) {
    for (State y = 0; y < P.size(); ++y) {
      std::snprintf(buf, sizeof buf, "%.17g", P(x, y));
      text += y ? " " : "";
      text += buf;
    }
    text += '\n';
  }
  return sha256_hex(text);
}

DiskRowCache::DiskRowCache(std::filesystem::path dir, std::string matrix_digest)
    : dir_(std::move(dir)), matrix_digest_(std::move(matrix_digest)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path DiskRowCache::path_for(double t, double tol, std::span<const State> starts) const {
  std::ostringstream key;
  key << matrix_digest_ << '|' << exact(t) << '|' << exact(tol) << '|';
  for (State s : starts) key << s << ',';
  return dir_ / (sha256_hex(key.str()) + ".rows");
}

std::optional<std::vector<Distribution>> DiskRowCache::load(double t, double tol, std::span<const State> starts) {
  const std::filesystem::path path = path_for(t, tol, starts);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();

  auto corrupt = [&](const char* why) -> std::optional<std::vector<Distribution>> {
    std::cerr << "warning: cache file " << path.string() << " is corrupt (" << why << "); recomputing\n";
    return std::nullopt;
  };
  const std::size_t header = sizeof kMagic + 2 * sizeof(std::uint64_t);
  if (bytes.size() < header + 64 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) return corrupt("bad header");
  const std::string body = bytes.substr(0, bytes.size() - 64);
  if (sha256_hex(body) != bytes.substr(bytes.size() - 64)) return corrupt("checksum mismatch");
  std::uint64_t rows = 0, length = 0;
  std::memcpy(&rows, body.data() + sizeof kMagic, sizeof rows);
  std::memcpy(&length, body.data() + sizeof kMagic + sizeof rows, sizeof length);
  if (rows != starts.size() || body.size() != header + rows * length * sizeof(double)) return corrupt("bad size");

  std::vector<Distribution> out;
  const char* p = body.data() + header;
  for (std::uint64_t r = 0; r < rows; ++r) {
    std::vector<double> probs(length);
    std::memcpy(probs.data(), p, length * sizeof(double));
    p += length * sizeof(double);
    out.push_back(Distribution::unchecked(std::move(probs)));
  }
  return out;
}

void DiskRowCache::store(double t, double tol, std::span<const State> starts, const std::vector<Distribution>& rows) {
  std::string body(kMagic, sizeof kMagic);
  put(body, static_cast<std::uint64_t>(rows.size()));
  put(body, static_cast<std::uint64_t>(rows.empty() ? 0 : rows.front().size()));
  for (const Distribution& row : rows) body.append(reinterpret_cast<const char*>(row.probs().data()), row.size() * sizeof(double));
  body += sha256_hex(body);

  const std::filesystem::path path = path_for(t, tol, starts);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write cache file " + tmp.string());
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace cutoff::report
