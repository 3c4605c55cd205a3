#include "cutoff/report/spec_parser.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <regex>
#include <string>

#include "cutoff/entropy.hpp"

namespace cutoff::report {

namespace {

[[noreturn]] void fail(std::string_view spec, const std::string& why) {
  throw Error(ErrorCode::SpecParseError, "cannot parse spec '" + std::string(spec) + "': " + why);
}

std::vector<std::string> split(std::string_view text, std::string_view separators) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (separators.find(c) != std::string_view::npos) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  parts.push_back(current);
  return parts;
}

template <class T>
T parse_number(std::string_view spec, std::string_view text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) fail(spec, "bad number '" + std::string(text) + "'");
  return value;
}

std::size_t parse_count(std::string_view spec, std::string_view text) {
  const long v = parse_number<long>(spec, text);
  if (v < 0) fail(spec, "expected a non-negative integer, got '" + std::string(text) + "'");
  return static_cast<std::size_t>(v);
}

/// key=value fields; "θ" is accepted as an alias of "theta".
std::map<std::string, std::string> parse_fields(std::string_view spec, const std::vector<std::string>& parts) {
  std::map<std::string, std::string> fields;
  for (const std::string& part : parts) {
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos || eq == 0) fail(spec, "expected key=value, got '" + part + "'");
    std::string key = part.substr(0, eq);
    if (key == "\xCE\xB8") key = "theta";
    if (!fields.emplace(key, part.substr(eq + 1)).second) fail(spec, "repeated key '" + key + "'");
  }
  return fields;
}

class Fields {
 public:
  Fields(std::string_view spec, std::map<std::string, std::string> fields) : spec_(spec), fields_(std::move(fields)) {}

  bool has(const std::string& key) const { return fields_.count(key) != 0; }
  const std::string& get(const std::string& key) {
    const auto it = fields_.find(key);
    if (it == fields_.end()) fail(spec_, "missing '" + key + "='");
    used_.push_back(key);
    return it->second;
  }
  std::string get_or(const std::string& key, std::string fallback) { return has(key) ? get(key) : fallback; }
  void finish() const {
    for (const auto& [key, value] : fields_)
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) fail(spec_, "unknown key '" + key + "'");
  }

 private:
  std::string_view spec_;
  std::map<std::string, std::string> fields_;
  std::vector<std::string> used_;
};

std::vector<double> parse_rates(std::string_view spec, const std::string& text) {
  std::vector<double> rates;
  for (const std::string& r : split(text, ",")) rates.push_back(parse_number<double>(spec, r));
  return rates;
}

GroupElement parse_element(std::string_view spec, const GroupSpec& group, const std::string& text) {
  if (text.find('/') == std::string::npos) {
    // A bare integer acts diagonally on every factor.
    const long k = parse_number<long>(spec, text);
    return GroupElement(group.factors.size(), k);
  }
  GroupElement element;
  for (const std::string& c : split(text, "/")) element.push_back(parse_number<long>(spec, c));
  if (element.size() != group.factors.size()) fail(spec, "element '" + text + "' has the wrong number of coordinates");
  return element;
}

std::vector<int> parse_class(std::string_view spec, const std::string& text) {
  if (text == "transpositions") return {2};
  static const std::regex k_cycles(R"((\d+)-cycles)");
  std::smatch m;
  if (std::regex_match(text, m, k_cycles)) return {parse_number<int>(spec, m[1].str())};
  std::vector<int> lengths;
  for (const std::string& c : split(text, ",")) lengths.push_back(parse_number<int>(spec, c));
  return lengths;
}

}  // namespace

GroupSpec parse_group(std::string_view text) {
  GroupSpec group;
  for (const std::string& factor : split(text, "x")) {
    if (factor.size() < 2 || factor[0] != 'Z') fail(text, "group factors look like Z12 or Z2^8");
    const std::string body = factor.substr(1);
    const auto caret = body.find('^');
    const long m = parse_number<long>(text, body.substr(0, caret));
    std::size_t power = 1;
    if (caret != std::string::npos) power = parse_count(text, body.substr(caret + 1));
    if (m < 2 || power == 0) fail(text, "factor orders must be >= 2 with a positive power");
    for (std::size_t i = 0; i < power; ++i) group.factors.push_back(m);
  }
  return group;
}

ChainInstance build_from_spec(std::string_view spec, std::size_t state_cap) {
  const auto colon = spec.find(':');
  const std::string family(spec.substr(0, colon));
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);

  if (family == "perturb") {
    const auto next = rest.find(':');
    if (next == std::string_view::npos) fail(spec, "perturb needs theta=...:<inner spec>");
    Fields f(spec, parse_fields(spec, {std::string(rest.substr(0, next))}));
    const std::string theta_text = f.get("theta");
    f.finish();
    const ChainInstance inner = build_from_spec(rest.substr(next + 1), state_cap);
    double theta = 0.0;
    if (const auto slash = theta_text.find("/tmix"); slash != std::string::npos && slash + 5 == theta_text.size()) {
      const double c = parse_number<double>(spec, theta_text.substr(0, slash));
      const Semigroup S(inner.matrix, inner.worst_case_starts());
      theta = c / mixing_time(S, 0.25);
      if (theta > 1.0) fail(spec, "c / t_mix(1/4) exceeds 1");
    } else {
      theta = parse_number<double>(spec, theta_text);
    }
    if (!(theta >= 0.0 && theta <= 1.0)) fail(spec, "theta must lie in [0, 1]");
    ChainInstance out = perturb_toward_uniform(inner, theta);
    out.params["theta_spec"] = theta_text;
    out.params["inner"] = std::string(rest.substr(next + 1));
    return out;
  }

  std::vector<std::string> parts = split(rest, ":;");
  if (rest.empty()) parts.clear();

  if (family == "cayley" || family == "cayley-random") {
    if (parts.empty()) fail(spec, "missing group, e.g. Z12xZ2");
    const GroupSpec group = parse_group(parts.front());
    Fields f(spec, parse_fields(spec, {parts.begin() + 1, parts.end()}));
    if (family == "cayley") {
      std::vector<GroupElement> gens;
      for (const std::string& g : split(f.get("gens"), ",")) gens.push_back(parse_element(spec, group, g));
      f.finish();
      return abelian_cayley(group, gens, state_cap);
    }
    const std::size_t d = parse_count(spec, f.get("d"));
    const auto seed = static_cast<std::uint64_t>(parse_count(spec, f.get_or("seed", "1")));
    f.finish();
    return random_abelian_cayley(group, d, seed, state_cap);
  }

  Fields f(spec, parse_fields(spec, parts));
  ChainInstance out = [&]() -> ChainInstance {
    if (family == "hypercube") {
      const std::size_t d = parse_count(spec, f.get("d"));
      const double lazy = parse_number<double>(spec, f.get_or("lazy", "0"));
      return hypercube(d, lazy, state_cap);
    }
    if (family == "cycle") return cycle(parse_count(spec, f.get("n")), state_cap);
    if (family == "complete") return complete_graph(parse_count(spec, f.get("n")), state_cap);
    if (family == "bd") {
      std::vector<double> up = parse_rates(spec, f.get("p"));
      std::vector<double> down = parse_rates(spec, f.get("q"));
      if (f.has("n")) {
        // Constant-rate shorthand: bd:n=20:p=0.3:q=0.4.
        const std::size_t n = parse_count(spec, f.get("n"));
        if (n < 2 || up.size() != 1 || down.size() != 1) fail(spec, "n= takes single rates p and q");
        up.assign(n - 1, up.front());
        down.assign(n - 1, down.front());
      }
      return birth_death(up, down, state_cap);
    }
    if (family == "sym") {
      const std::size_t k = parse_count(spec, f.get("k"));
      return conjugacy_walk(k, parse_class(spec, f.get_or("class", "transpositions")), state_cap);
    }
    fail(spec, "unknown family '" + family + "'");
  }();
  f.finish();
  return out;
}

std::vector<SpecMember> expand_range(std::string_view spec) {
  static const std::regex range(R"(([A-Za-z_]+)=(-?\d+)\.\.(-?\d+))");
  const std::string text(spec);
  std::smatch m;
  if (!std::regex_search(text, m, range)) return {SpecMember{text, "", 0.0}};
  const long a = parse_number<long>(spec, m[2].str());
  const long b = parse_number<long>(spec, m[3].str());
  if (b < a) fail(spec, "empty range");
  const std::string rest = m.suffix().str();
  if (std::regex_search(rest, range)) fail(spec, "only one range per spec");
  std::vector<SpecMember> members;
  for (long v = a; v <= b; ++v) {
    const std::string param = m[1].str() + "=" + std::to_string(v);
    members.push_back({m.prefix().str() + param + rest, param, static_cast<double>(v)});
  }
  return members;
}

}  // namespace cutoff::report
