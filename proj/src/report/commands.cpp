#include "cutoff/report/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <set>

#include "cutoff/curvature.hpp"
#include "cutoff/entropy.hpp"
#include "cutoff/spectral.hpp"
#include "cutoff/suite.hpp"
#include "cutoff/report/cache.hpp"
#include "cutoff/report/chain_file.hpp"
#include "cutoff/report/csv.hpp"
#include "cutoff/report/spec_parser.hpp"
#include "cutoff/report/svg.hpp"

namespace cutoff::report {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Curvature is skipped above this support degree; the transport problems grow with it.
constexpr std::size_t kCurvatureDegreeLimit = 64;

std::string eps_label(double eps) { return format_number(eps); }

std::vector<double> eps_or(const RunConfig& config, std::vector<double> fallback) {
  return config.eps.empty() ? fallback : config.eps;
}

std::size_t max_degree(const StochasticMatrix& P) {
  std::size_t d = 0;
  for (State x = 0; x < P.size(); ++x) d = std::max(d, P.support_row(x).targets.size());
  return d;
}

std::string describe(const Diagnostics& d) {
  if (!d.square) return "matrix is not square";
  if (!d.finite) return "matrix has non-finite entries";
  if (!d.nonnegative) return "matrix has negative entries";
  if (d.n < 2) return "matrix needs at least two states";
  if (d.max_row_residual > kStochasticTolerance)
    return "row " + std::to_string(d.worst_row) + " sum is off 1 by " + format_number(d.max_row_residual);
  return "matrix is not irreducible";
}

ChainInstance load_instance(const RunConfig& config) {
  if (config.spec.empty() == config.chain_file.empty())
    throw Error(ErrorCode::InvalidArgument, "give exactly one of --spec and --chain-file");
  if (!config.spec.empty()) return build_from_spec(config.spec, config.state_cap);

  RawChain raw = read_chain_file(config.chain_file);
  if (static_cast<std::size_t>(raw.entries.rows()) > config.state_cap)
    throw Error(ErrorCode::StateCapExceeded, "chain file exceeds the state cap");
  const Diagnostics d = validate(raw.entries);
  if (!d.stochastic()) throw Error(ErrorCode::InvalidMatrix, "validate failed: " + describe(d));
  if (!d.irreducible) throw Error(ErrorCode::NotIrreducible, "validate failed: chain is not irreducible");
  ChainInstance inst{StochasticMatrix(std::move(raw.entries), std::move(raw.labels)), "file", {}, false,
                     CurvatureClaim::Unknown};
  inst.params["path"] = config.chain_file;
  return inst;
}

/// Everything the commands report about one chain. Heap-allocated because the
/// semigroup keeps a pointer to the matrix.
struct Workspace {
  ChainInstance inst;
  std::string spec;
  Distribution pi;
  std::unique_ptr<Semigroup> S;
  std::optional<MetricData> metric;
  SpectralReport spectral;
  std::optional<CurvatureReport> curv;
  std::vector<State> curvature_vertices;

  explicit Workspace(ChainInstance i) : inst(std::move(i)) {}

  double kappa_ollivier() const { return curv && curv->has_ollivier() ? curv->ollivier_min : kNaN; }
  double kappa_bakry_emery() const { return curv && curv->has_bakry_emery() ? curv->bakry_emery_min : kNaN; }
  double delta() const { return metric ? metric->delta : kNaN; }
  double diameter() const { return metric ? metric->diameter : kNaN; }
};

std::unique_ptr<Workspace> prepare(ChainInstance inst, std::string spec, const RunConfig& config, bool want_curvature,
                                   std::ostream& log) {
  auto ws = std::make_unique<Workspace>(std::move(inst));
  ws->spec = std::move(spec);
  const StochasticMatrix& P = ws->inst.matrix;
  ws->pi = stationary(P);

  std::shared_ptr<RowCache> cache;
  if (config.cache)
    cache = std::make_shared<DiskRowCache>(fs::path(config.out) / ".cutoff-cache", matrix_digest(P));
  else
    cache = std::make_shared<MemoryRowCache>();
  ws->S = std::make_unique<Semigroup>(P, ws->pi, ws->inst.worst_case_starts(), config.tol, config.threads, cache);

  ws->spectral = relaxation_time(P, ws->pi, config.seed);
  if (P.symmetric_support()) ws->metric = metric_data(P);

  if (want_curvature && ws->metric) {
    if (max_degree(P) > kCurvatureDegreeLimit) {
      log << "note: support degree above " << kCurvatureDegreeLimit << ", curvature skipped\n";
    } else {
      if (ws->inst.transitive) ws->curvature_vertices = {0};
      ws->curv = curvature(P, *ws->metric, ws->curvature_vertices, 1000, config.seed + 16);
    }
  }
  return ws;
}

std::vector<double> linspace(double a, double b, std::size_t steps) {
  std::vector<double> out(steps);
  for (std::size_t i = 0; i < steps; ++i)
    out[i] = steps == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(steps - 1);
  return out;
}

std::string fmt(double v) { return format_number(v); }

/// Verdicts that need neither a metric nor curvature; used for chains with asymmetric support.
std::vector<InequalityVerdict> support_free_suite(const Semigroup& S, double t_rel, const SuiteConfig& config) {
  std::vector<double> times = config.times;
  if (times.empty()) {
    const double quarter = mixing_time(S, 0.25);
    for (int k = 0; k <= 8; ++k) times.push_back(quarter * k / 4.0);
  }
  std::vector<InequalityVerdict> out;
  for (double eps : config.eps)
    for (double t : times) out.push_back(entropic_upper_bound(S, t_rel, t, eps));
  for (double eps : config.eps) {
    const double t = mixing_time(S, 1.0 - eps);
    InequalityVerdict worst;
    bool first = true;
    for (const Distribution& row : S.rows(t)) {
      InequalityVerdict v = entropic_lower_bound_check(row.span(), S.pi().span(), eps);
      v.context += ";t=" + fmt(t);
      if (first) {
        worst = v;
        first = false;
      } else {
        keep_worst(worst, v);
      }
    }
    out.push_back(worst);
  }
  for (double eps : config.eps)
    if (eps < 0.5) out.push_back(cutoff_window_bound(S, t_rel, eps));
  return out;
}

}  // namespace

void validate_config(const RunConfig& config) {
  for (double eps : config.eps)
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidArgument, "eps values must lie in (0, 1)");
  check_tolerance(config.tol);
  if (config.tmix_tol < 0.0) throw Error(ErrorCode::InvalidArgument, "t_mix tolerance must be >= 0");
  if (config.threads == 0) throw Error(ErrorCode::InvalidArgument, "--threads must be >= 1");
  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec || !fs::is_directory(config.out))
    throw Error(ErrorCode::IoError, "output directory " + config.out + " is not writable");
  parse_time_grid(config.tgrid);
}

std::vector<double> parse_time_grid(const std::string& text) {
  if (text.empty() || text == "auto") return {};
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  auto bad = [&]() { return Error(ErrorCode::SpecParseError, "time grid must be auto or a:b:steps, got '" + text + "'"); };
  if (c2 == std::string::npos) throw bad();
  double a = 0.0, b = 0.0;
  long steps = 0;
  try {
    std::size_t used = 0;
    a = std::stod(text.substr(0, c1), &used);
    if (used != c1) throw bad();
    b = std::stod(text.substr(c1 + 1, c2 - c1 - 1), &used);
    if (used != c2 - c1 - 1) throw bad();
    steps = std::stol(text.substr(c2 + 1), &used);
    if (used != text.size() - c2 - 1) throw bad();
  } catch (const std::logic_error&) {
    throw bad();
  }
  if (!(a >= 0.0) || !(b >= a) || steps < 1) throw bad();
  return linspace(a, b, static_cast<std::size_t>(steps));
}

int cmd_analyze(const RunConfig& config, std::ostream& log) {
  const std::vector<double> eps = eps_or(config, {0.25, 0.75});
  auto ws = prepare(load_instance(config), config.spec, config, true, log);
  const Semigroup& S = *ws->S;

  std::vector<std::string> header{"family", "spec", "n", "delta", "diam", "t_rel", "kappa_ollivier", "kappa_bakry_emery"};
  std::vector<std::string> row{ws->inst.family, ws->spec.empty() ? config.chain_file : ws->spec,
                               std::to_string(ws->inst.matrix.size()), fmt(ws->delta()), fmt(ws->diameter()),
                               fmt(ws->spectral.t_rel), fmt(ws->kappa_ollivier()), fmt(ws->kappa_bakry_emery())};
  std::vector<Marker> markers;
  double t_max = 0.0;
  for (double e : eps) {
    const double t = mixing_time(S, e, config.tmix_tol);
    const EntropyPoint at = entropy_at(S, t);
    for (const char* name : {"t_mix_", "d_star_", "v_star_"}) header.push_back(name + eps_label(e));
    row.push_back(fmt(t));
    row.push_back(fmt(at.d_star));
    row.push_back(fmt(at.v_star));
    markers.push_back({t, "t_mix(" + eps_label(e) + ")"});
    t_max = std::max(t_max, t);
    log << "t_mix(" << eps_label(e) << ") = " << fmt(t) << "\n";
  }
  CsvWriter csv((fs::path(config.out) / "analysis.csv").string(), header);
  csv.row(row);

  std::vector<double> times = parse_time_grid(config.tgrid);
  if (times.empty()) times = linspace(0.0, 2.0 * std::max(t_max, 1e-3), 81);
  const MixingProfile mp = mixing_profile(S, times);
  const EntropyProfile ep = entropy_profile(S, times);
  Plot plot;
  plot.title = "Worst-case distance to equilibrium";
  plot.x_label = "t";
  plot.y_label = "distance";
  plot.series.push_back({"TV", mp.times, mp.worst_tv});
  plot.series.push_back({"d* (KL)", ep.times, ep.d_star});
  plot.vertical_markers = markers;
  write_svg((fs::path(config.out) / "profile.svg").string(), plot);
  log << "n = " << ws->inst.matrix.size() << ", t_rel = " << fmt(ws->spectral.t_rel) << "\n";
  return kOk;
}

int cmd_verify(const RunConfig& config, std::ostream& log) {
  SuiteConfig suite;
  suite.eps = eps_or(config, suite.eps);
  suite.times = parse_time_grid(config.tgrid);
  suite.seed = config.seed;
  auto ws = prepare(load_instance(config), config.spec, config, true, log);
  const Semigroup& S = *ws->S;

  std::vector<InequalityVerdict> verdicts;
  if (ws->metric) {
    const CurvatureReport empty;
    const CurvatureReport& curv = ws->curv ? *ws->curv : empty;
    verdicts = run_theorem_suite({S, *ws->metric, ws->spectral, curv}, suite);
    const std::vector<double> grid = suite.times.empty() ? automatic_time_grid(S, *ws->metric) : suite.times;
    if (curv.has_ollivier() && std::isfinite(curv.ollivier_min))
      verdicts.push_back(contraction_check(ws->inst.matrix, *ws->metric, curv.ollivier_min, grid,
                                           ws->curvature_vertices, config.seed + 22));
    if (curv.has_bakry_emery() && std::isfinite(curv.bakry_emery_min))
      verdicts.push_back(subcommutativity_check(ws->inst.matrix, curv.bakry_emery_min, grid, config.seed + 28));
  } else {
    log << "note: asymmetric support, metric-based inequalities skipped\n";
    verdicts = support_free_suite(S, ws->spectral.t_rel, suite);
  }
  InequalityVerdict poincare = make_verdict("poincare", ws->spectral.poincare_max_ratio, 1.0, 1e-9,
                                            "samples=" + std::to_string(ws->spectral.poincare_samples));
  poincare.samples = ws->spectral.poincare_samples;
  verdicts.push_back(poincare);

  CsvWriter csv((fs::path(config.out) / "verdicts.csv").string(),
                {"name", "lhs", "rhs", "slack", "tolerance", "pass", "vacuous", "samples", "context"});
  int failures = 0;
  for (const InequalityVerdict& v : verdicts) {
    csv.row({v.name, fmt(v.lhs), fmt(v.rhs), fmt(v.slack), fmt(v.tolerance), v.pass ? "true" : "false",
             v.vacuous ? "true" : "false", std::to_string(v.samples), v.context});
    if (!v.pass) {
      ++failures;
      log << "FAIL " << v.name << " lhs=" << fmt(v.lhs) << " rhs=" << fmt(v.rhs) << " " << v.context << "\n";
    }
  }
  log << verdicts.size() << " verdicts, " << failures << " failed\n";
  return failures ? kVerdictFailure : kOk;
}

int cmd_scan(const RunConfig& config, std::ostream& log) {
  if (config.spec.empty()) throw Error(ErrorCode::InvalidArgument, "scan needs --spec with a range, e.g. hypercube:d=4..10");
  std::vector<double> eps = eps_or(config, {0.25, 0.75});
  for (double e : {0.25, 0.75})
    if (std::find(eps.begin(), eps.end(), e) == eps.end()) eps.push_back(e);
  std::sort(eps.begin(), eps.end());

  std::vector<std::string> header{"family", "param", "size", "n", "delta", "diam", "t_rel", "kappa_ollivier",
                                  "kappa_bakry_emery"};
  for (double e : eps) header.push_back("t_mix_" + eps_label(e));
  for (const char* c : {"d_star", "v_star", "window", "window_bound", "ratio", "entropic_stat", "sparse_stat",
                        "expansion_stat", "window_scale"})
    header.push_back(c);
  CsvWriter csv((fs::path(config.out) / "scan.csv").string(), header);

  Series ratio{"t_mix(1/4) / t_mix(3/4)", {}, {}, true};
  Series window{"window", {}, {}, true, false};
  Series bound{"entropic window bound", {}, {}, true, false};
  for (const SpecMember& member : expand_range(config.spec)) {
    RunConfig one = config;
    one.spec = member.spec;
    auto ws = prepare(build_from_spec(member.spec, config.state_cap), member.spec, one, true, log);
    const Semigroup& S = *ws->S;
    const double n = static_cast<double>(ws->inst.matrix.size());
    const double size = member.param.empty() ? n : member.size;

    std::vector<std::string> row{ws->inst.family, member.param, fmt(size), fmt(n), fmt(ws->delta()),
                                 fmt(ws->diameter()), fmt(ws->spectral.t_rel), fmt(ws->kappa_ollivier()),
                                 fmt(ws->kappa_bakry_emery())};
    double quarter = kNaN, three_quarters = kNaN;
    for (double e : eps) {
      const double t = mixing_time(S, e, config.tmix_tol);
      if (e == 0.25) quarter = t;
      if (e == 0.75) three_quarters = t;
      row.push_back(fmt(t));
    }
    const EntropyPoint at = entropy_at(S, quarter);
    const InequalityVerdict wb = cutoff_window_bound(S, ws->spectral.t_rel, 0.25);
    const double log_delta = std::log(ws->delta());
    const double t_rel = ws->spectral.t_rel;
    const double r = quarter / three_quarters;
    const double scale = std::sqrt(quarter) * t_rel * log_delta;
    row.push_back(fmt(at.d_star));
    row.push_back(fmt(at.v_star));
    row.push_back(fmt(quarter - three_quarters));
    row.push_back(fmt(wb.rhs));
    row.push_back(fmt(r));
    row.push_back(fmt(entropic_concentration_ratio(S, t_rel, 0.75)));
    row.push_back(fmt(std::pow(t_rel * log_delta, 2) / quarter));
    row.push_back(fmt(t_rel * std::pow(log_delta, 1.5) / std::sqrt(std::log(n))));
    row.push_back(fmt(scale));
    csv.row(row);

    ratio.xs.push_back(size);
    ratio.ys.push_back(r);
    window.xs.push_back(scale);
    window.ys.push_back(quarter - three_quarters);
    bound.xs.push_back(scale);
    bound.ys.push_back(wb.rhs);
    log << (member.param.empty() ? member.spec : member.param) << ": t_mix(1/4) = " << fmt(quarter)
        << ", ratio = " << fmt(r) << "\n";
  }

  Plot rp;
  rp.title = "Cutoff ratio";
  rp.x_label = "size parameter";
  rp.y_label = "t_mix(1/4) / t_mix(3/4)";
  rp.series.push_back(ratio);
  rp.series.push_back({"1", {ratio.xs.empty() ? 0.0 : ratio.xs.front(), ratio.xs.empty() ? 1.0 : ratio.xs.back()},
                       {1.0, 1.0}});
  write_svg((fs::path(config.out) / "cutoff_ratio.svg").string(), rp);

  Plot wp;
  wp.title = "Cutoff window";
  wp.x_label = "sqrt(t_mix(1/4)) t_rel log(Delta)";
  wp.y_label = "t_mix(1/4) - t_mix(3/4)";
  wp.series.push_back(window);
  wp.series.push_back(bound);
  write_svg((fs::path(config.out) / "window.svg").string(), wp);
  return kOk;
}

int cmd_curvature(const RunConfig& config, std::ostream& log) {
  auto ws = prepare(load_instance(config), config.spec, config, true, log);
  if (!ws->curv) throw Error(ErrorCode::AsymmetricSupport, "curvature needs a symmetric support of moderate degree");
  const CurvatureReport& c = *ws->curv;
  CsvWriter csv((fs::path(config.out) / "curvature.csv").string(), {"notion", "x", "y", "kappa"});
  for (const auto& [edge, k] : c.ollivier_edges)
    csv.row({"ollivier", std::to_string(edge.first), std::to_string(edge.second), fmt(k)});
  for (const auto& [x, k] : c.bakry_emery_vertices) csv.row({"bakry_emery", std::to_string(x), "", fmt(k)});
  log << "one-step Ollivier min = " << fmt(c.ollivier_min) << ", Bakry-Emery min = " << fmt(c.bakry_emery_min)
      << ", certificate violation = " << fmt(c.bakry_emery_certificate_violation)
      << ", max duality gap = " << fmt(c.max_duality_gap) << "\n";
  if (ws->inst.transitive) log << "note: vertex-transitive chain, evaluated at state 0\n";
  return kOk;
}

int cmd_random_cayley(const RunConfig& config, std::ostream& log) {
  if (config.spec.rfind("cayley-random:", 0) != 0)
    throw Error(ErrorCode::InvalidArgument, "random-cayley needs --spec cayley-random:<group>:d=<d>[:seed=<s>]");
  auto ws = prepare(build_from_spec(config.spec, config.state_cap), config.spec, config, true, log);
  const auto& params = ws->inst.params;
  const double n = static_cast<double>(ws->inst.matrix.size());
  write_chain_file((fs::path(config.out) / "random_cayley.chain").string(), ws->inst.matrix);
  CsvWriter csv((fs::path(config.out) / "random_cayley.csv").string(),
                {"group", "n", "d", "seed", "attempts", "generators", "equivalent_spec", "t_rel", "delta", "diam",
                 "kappa_ollivier", "kappa_bakry_emery", "expansion_stat"});
  const std::string gens = params.at("gens");
  csv.row({params.at("group"), fmt(n), params.at("d"), params.at("seed"), params.at("attempts"), gens,
           "cayley:" + params.at("group") + ":gens=" + gens, fmt(ws->spectral.t_rel), fmt(ws->delta()),
           fmt(ws->diameter()), fmt(ws->kappa_ollivier()), fmt(ws->kappa_bakry_emery()),
           fmt(ws->spectral.t_rel * std::pow(std::log(ws->delta()), 1.5) / std::sqrt(std::log(n)))});
  log << "generators " << gens << " (attempt " << params.at("attempts") << ")\n";
  return kOk;
}

int run_command(const RunConfig& config, std::ostream& log) {
  try {
    validate_config(config);
    if (config.command == "analyze") return cmd_analyze(config, log);
    if (config.command == "verify") return cmd_verify(config, log);
    if (config.command == "scan") return cmd_scan(config, log);
    if (config.command == "curvature") return cmd_curvature(config, log);
    if (config.command == "random-cayley") return cmd_random_cayley(config, log);
    log << "error: unknown command '" << config.command << "'\n";
    return kSpecError;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::StateCapExceeded: return kResourceCap;
      case ErrorCode::SpecParseError:
      case ErrorCode::InvalidArgument:
      case ErrorCode::InvalidMatrix:
      case ErrorCode::NotIrreducible:
      case ErrorCode::InvalidTolerance:
      case ErrorCode::DimensionMismatch:
      case ErrorCode::NotGenerating:
      case ErrorCode::NotSymmetricSet:
      case ErrorCode::GenerationFailed:
      case ErrorCode::AsymmetricSupport: return kSpecError;
      default: return kFailure;
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace cutoff::report
