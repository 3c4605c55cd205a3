#include "cutoff/report/chain_file.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace cutoff::report {

namespace {

[[noreturn]] void fail(const std::string& why) { throw Error(ErrorCode::SpecParseError, "chain file: " + why); }

}  // namespace

RawChain parse_chain_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> labels;
  std::vector<double> numbers;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    if (word == "labels:") {
      while (fields >> word) labels.push_back(word);
      continue;
    }
    do {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(word, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != word.size()) fail("not a number: '" + word + "'");
      numbers.push_back(v);
    } while (fields >> word);
  }
  if (numbers.empty()) fail("empty");
  const double n_value = numbers.front();
  if (n_value < 1 || n_value != static_cast<double>(static_cast<std::size_t>(n_value)))
    fail("the first number must be the state count");
  const auto n = static_cast<std::size_t>(n_value);
  if (numbers.size() != 1 + n * n)
    fail("expected " + std::to_string(n * n) + " entries, found " + std::to_string(numbers.size() - 1));
  if (!labels.empty() && labels.size() != n) fail("labels line must name every state");

  RawChain raw;
  raw.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n * n; ++i)
    raw.entries(static_cast<Eigen::Index>(i / n), static_cast<Eigen::Index>(i % n)) = numbers[1 + i];
  raw.labels = std::move(labels);
  return raw;
}

RawChain read_chain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open chain file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_chain_text(text.str());
}

void write_chain_file(const std::string& path, const StochasticMatrix& P) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << P.size() << '\n';
  if (!P.labels().empty()) {
    out << "labels:";
    for (const std::string& l : P.labels()) out << ' ' << l;
    out << '\n';
  }
  out << std::setprecision(17);
  for (State x = 0; x < P.size(); ++x) {
    for (State y = 0; y < P.size(); ++y) out << (y ? " " : "") << P(x, y);
    out << '\n';
  }
}

}  // namespace cutoff::report
