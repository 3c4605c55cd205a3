// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "cutoff/families.hpp"
#include "cutoff/report/commands.hpp"
#include "cutoff/report/csv.hpp"
#include "cutoff/spectral.hpp"
#include "cutoff/suite.hpp"
#include "cutoff/transport.hpp"
#include "oracles.hpp"

using namespace cutoff;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failure and keeps the worst observed number for the summary.
struct Tally {
  bool pass = true;
  std::string first_failure;
  double worst = 0.0;

  void expect(bool ok, const std::string& what) {
    if (!ok && pass) first_failure = what;
    pass = pass && ok;
  }
  void observe(double err) { worst = std::max(worst, err); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cutoff-lab-acceptance-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double cell(const report::CsvTable& t, std::size_t row, const std::string& column) {
  return std::stod(t.rows.at(row).at(t.column(column)));
}

report::CsvTable run_scan(const std::string& spec, const std::string& dir) {
  report::RunConfig c;
  c.command = "scan";
  c.spec = spec;
  c.out = scratch(dir).string();
  c.eps = {0.25, 0.75};
  std::ostringstream log;
  const int code = report::run_command(c, log);
  if (code != report::kOk) throw std::runtime_error("scan " + spec + " exited " + std::to_string(code) + ": " + log.str());
  return report::read_csv((fs::path(c.out) / "scan.csv").string());
}

Outcome heat_kernel_oracle() {
  constexpr double kTol = 1e-10;
  std::mt19937_64 rng(2024);
  Tally tally;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) % 19;
    const StochasticMatrix P(oracle::random_chain(n, rng, 0.35, trial % 3 != 0));
    for (double t : {0.1, 1.0, 5.0, 10.0}) {
      const Matrix H = heat_kernel(P, t, 1e-30);
      const auto ref = oracle::taylor_expm(P.entries(), t, 4 * poisson_weights(t, 1e-30).size());
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
          const double err = std::abs(H(x, y) - static_cast<double>(ref[x][y]));
          tally.observe(err);
          tally.expect(err <= kTol, fmt("trial %d t=%g (%zu,%zu) err=%.3g", trial, t, x, y, err));
        }
    }
  }
  return {tally.pass, fmt("20 chains x 4 times, max entry error %.3g (tol %.0e)", tally.worst, kTol) +
                          (tally.pass ? "" : "; " + tally.first_failure)};
}

Outcome closed_form_mixing() {
  constexpr double kTol = 1e-3;
  Tally tally;
  for (std::size_t n : {10, 50}) {
    const ChainInstance k = complete_graph(n);
    const Semigroup S(k.matrix, k.worst_case_starts());
    for (double eps : {0.05, 0.25, 0.5}) {
      const double err = std::abs(mixing_time(S, eps) - oracle::complete_graph_tmix(n, eps));
      tally.observe(err);
      tally.expect(err <= kTol, fmt("n=%zu eps=%g err=%.3g", n, eps, err));
    }
  }
  return {tally.pass, fmt("K_10, K_50 x 3 eps, max |t_mix - closed form| %.3g (tol %.0e)", tally.worst, kTol) +
                          (tally.pass ? "" : "; " + tally.first_failure)};
}

std::vector<double> random_measure(std::size_t n, std::size_t support, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> m(n, 0.0);
  double s = 0.0;
  for (std::size_t i = 0; i < support; ++i) s += m[idx[i]] = u(rng);
  for (double& v : m) v /= s;
  return m;
}

Outcome transport_duality() {
  constexpr double kGapTol = 1e-8, kOracleTol = 1e-9;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> pick(1, 30);
  Tally gap, small;
  int small_count = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const bool tiny = trial % 2 == 0;
    const std::size_t n = tiny ? 4 + static_cast<std::size_t>(trial) % 5 : 30 + static_cast<std::size_t>(trial) % 20;
    const StochasticMatrix P(oracle::random_chain(n, rng, tiny ? 0.3 : 0.1));
    const MetricData metric = metric_data(P);
    const std::size_t a = tiny ? 1 + static_cast<std::size_t>(trial) % 3 : std::min(pick(rng), n);
    const std::size_t b = tiny ? 1 + static_cast<std::size_t>(trial / 2) % 3 : std::min(pick(rng), n);
    const std::vector<double> mu = random_measure(n, a, rng), nu = random_measure(n, b, rng);
    const TransportPlan plan = wasserstein1(mu, nu, metric);
    double dual = 0.0;
    for (std::size_t x = 0; x < n; ++x) dual += plan.dual_potential[x] * (mu[x] - nu[x]);
    const double lip = lipschitz_norm(metric, plan.dual_potential);
    const double g = std::abs(plan.value - dual);
    gap.observe(g);
    gap.expect(g <= kGapTol && lip <= 1.0 + 1e-9, fmt("trial %d gap=%.3g lip=%.12g", trial, g, lip));
    if (tiny) {
      ++small_count;
      const double err = std::abs(plan.value - oracle::w1_exhaustive(mu, nu, oracle::floyd_distances(P.entries())));
      small.observe(err);
      small.expect(err <= kOracleTol, fmt("trial %d oracle err=%.3g", trial, err));
    }
  }
  const bool pass = gap.pass && small.pass;
  return {pass, fmt("200 instances, max |primal - dual| %.3g (tol %.0e); %d small vs exhaustive LP max err %.3g (tol %.0e)",
                    gap.worst, kGapTol, small_count, small.worst, kOracleTol) +
                    (gap.pass ? "" : "; " + gap.first_failure) + (small.pass ? "" : "; " + small.first_failure)};
}

Outcome curvature_ground_truths() {
  constexpr double kTol = 1e-8;
  Tally tally;
  double cycle_worst = 0.0;
  for (std::size_t n : {6, 16, 32}) {
    const double k = ollivier_curvature(cycle(n).matrix).ollivier_min;
    cycle_worst = std::max(cycle_worst, std::abs(k));
    tally.expect(std::abs(k) <= kTol, fmt("cycle n=%zu kappa=%.3g", n, k));
  }

  const std::vector<ChainInstance> cayley{
      cycle(6), cycle(16), cycle(32), hypercube(3), hypercube(4), hypercube(6),
      abelian_cayley(GroupSpec{{12, 2}}, {{1, 1}, {11, 1}, {5, 0}, {7, 0}}),
      abelian_cayley(GroupSpec{{4, 3}}, {{1, 0}, {3, 0}, {0, 1}, {0, 2}}),
      random_abelian_cayley(GroupSpec{{64}}, 2, 7),
      random_abelian_cayley(GroupSpec{std::vector<long>(8, 2)}, 16, 1),
      random_abelian_cayley(GroupSpec{{5, 5}}, 3, 3)};
  double cayley_min = std::numeric_limits<double>::infinity();
  for (const ChainInstance& c : cayley) {
    const MetricData m = metric_data(c.matrix);
    const std::vector<State> at{0};
    const CurvatureReport r = curvature(c.matrix, m, at);
    const double k = std::max(r.ollivier_min, r.bakry_emery_min);
    cayley_min = std::min(cayley_min, k);
    tally.expect(k >= -kTol, fmt("%s kappa=%.3g", c.family.c_str(), k));
  }

  // Flip chain: f = (a, b), u = b - a gives Gamma = u^2/2 and Gamma_2 = (1/2)(2 u^2) at both states.
  const CurvatureReport flip = bakry_emery_curvature(hypercube(1).matrix);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  double flip_err = 0.0;
  for (State x : {0, 1}) {
    for (int i = 0; i < 20; ++i) {
      const double a = g(rng), b = g(rng), u = b - a;
      const double hand = (u * u) / (u * u / 2);
      flip_err = std::max(flip_err, std::abs(flip.bakry_emery_vertices.at(x) - hand));
    }
  }
  tally.expect(flip_err <= kTol, fmt("flip chain Bakry-Emery err=%.3g", flip_err));
  return {tally.pass, fmt("cycle |kappa| max %.3g; %zu abelian Cayley min kappa %.3g; flip chain BE err %.3g (tol %.0e)",
                          cycle_worst, cayley.size(), cayley_min, flip_err, kTol) +
                          (tally.pass ? "" : "; " + tally.first_failure)};
}

Outcome theorem_suite() {
  const std::vector<std::pair<std::string, ChainInstance>> chains{
      {"hypercube d=4", hypercube(4)},
      {"hypercube d=6", hypercube(6)},
      {"hypercube d=8", hypercube(8)},
      {"cycle n=16", cycle(16)},
      {"cycle n=32", cycle(32)},
      {"complete n=20", complete_graph(20)},
      {"Z64 4 generators seed 7", random_abelian_cayley(GroupSpec{{64}}, 2, 7)},
      {"birth-death n=20", birth_death(std::vector<double>(19, 0.3), std::vector<double>(19, 0.4))}};
  std::size_t verdicts = 0, failures = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  std::string first;
  for (const auto& [label, c] : chains) {
    const Semigroup S(c.matrix, c.worst_case_starts());
    const MetricData metric = metric_data(c.matrix);
    const SpectralReport spec = relaxation_time(c.matrix, S.pi());
    std::vector<State> at;
    if (c.transitive) at = {0};
    const CurvatureReport curv = curvature(c.matrix, metric, at);
    SuiteConfig config;
    config.concentration_samples = 100;
    for (const InequalityVerdict& v : run_theorem_suite({S, metric, spec, curv}, config)) {
      ++verdicts;
      if (v.tolerance > 1e-9 || !v.pass) {
        if (failures++ == 0) first = label + ": " + v.name + " " + v.context + fmt(" slack=%.3g", v.slack);
      }
      if (!v.vacuous) min_slack = std::min(min_slack, v.slack);
    }
  }
  return {failures == 0, fmt("%zu verdicts on 8 chains, %zu failing, min slack %.3g (tol 1e-9)", verdicts, failures,
                             min_slack) + (failures ? "; first: " + first : "")};
}

Outcome hypercube_trend() {
  constexpr double kRatioTarget = 1.35;
  const report::CsvTable t = run_scan("hypercube:d=4..10", "hypercube");
  Tally tally;
  std::string ratios;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double r = cell(t, i, "ratio");
    ratios += fmt("%s%.3f", i ? "," : "", r);
    if (i > 0) tally.expect(r < cell(t, i - 1, "ratio"), fmt("ratio not decreasing at row %zu", i));
    tally.expect(cell(t, i, "window") <= cell(t, i, "window_bound"),
                 fmt("window %.4g above bound %.4g at row %zu", cell(t, i, "window"), cell(t, i, "window_bound"), i));
  }
  tally.expect(t.rows.size() == 7, "expected d=4..10");
  const double last = cell(t, t.rows.size() - 1, "ratio");
  tally.expect(last < kRatioTarget, fmt("ratio at d=10 is %.4f, not below %.2f", last, kRatioTarget));
  return {tally.pass, "ratios d=4..10: " + ratios + (tally.pass ? "" : "; " + tally.first_failure)};
}

Outcome perturbation_counterexample() {
  constexpr double kRatioGain = 1.2, kDeltaSlack = 0.9;
  const ChainInstance base = hypercube(8);
  const Semigroup S0(base.matrix, base.worst_case_starts());
  const double t0 = mixing_time(S0, 0.25);
  const double theta = 5.0 / t0;
  const ChainInstance pert = perturb_toward_uniform(base, theta);
  const Semigroup S1(pert.matrix, pert.worst_case_starts());
  const double r0 = t0 / mixing_time(S0, 0.75);
  const double r1 = mixing_time(S1, 0.25) / mixing_time(S1, 0.75);
  const double d0 = metric_data(base.matrix).delta, d1 = metric_data(pert.matrix).delta;
  const double need = std::pow(2.0, 8) * theta * kDeltaSlack;
  Tally tally;
  tally.expect(r1 >= kRatioGain * r0, fmt("ratio gain %.3f below %.2f", r1 / r0, kRatioGain));
  tally.expect(d1 / d0 >= need, fmt("Delta factor %.4g below %.4g", d1 / d0, need));
  return {tally.pass, fmt("theta=%.4f ratio %.4f -> %.4f (x%.3f, need x%.2f); Delta %.4g -> %.4g (x%.4g, need x%.4g)",
                          theta, r0, r1, r1 / r0, kRatioGain, d0, d1, d1 / d0, need) +
                          (tally.pass ? "" : "; " + tally.first_failure)};
}

Outcome cycle_negative_control() {
  constexpr double kStatFloor = 0.5, kRatioFloor = 1.5;
  const report::CsvTable t = run_scan("cycle:n=8..64", "cycle");
  Tally tally;
  double min_stat = std::numeric_limits<double>::infinity(), min_ratio = min_stat;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const double stat = cell(t, i, "entropic_stat"), ratio = cell(t, i, "ratio");
    min_stat = std::min(min_stat, stat);
    min_ratio = std::min(min_ratio, ratio);
    tally.expect(stat >= kStatFloor, fmt("entropic stat %.4g at row %zu", stat, i));
    tally.expect(ratio > kRatioFloor, fmt("ratio %.4g at row %zu", ratio, i));
  }
  tally.expect(t.rows.size() == 57, "expected n=8..64");
  return {tally.pass, fmt("%zu cycles, min entropic stat %.4g (floor %.1f), min ratio %.4g (floor %.1f)", t.rows.size(),
                          min_stat, kStatFloor, min_ratio, kRatioFloor) +
                          (tally.pass ? "" : "; " + tally.first_failure)};
}

Outcome reproducibility() {
  struct Run {
    std::string command, spec, file;
  };
  const std::vector<Run> runs{{"verify", "cayley-random:Z2^8:d=16:seed=1", "verdicts.csv"},
                              {"verify", "bd:n=12:p=0.3:q=0.4", "verdicts.csv"},
                              {"scan", "hypercube:d=3..6", "scan.csv"}};
  Tally tally;
  std::size_t bytes = 0;
  for (const Run& r : runs) {
    std::string outputs[2];
    for (int k = 0; k < 2; ++k) {
      report::RunConfig c;
      c.command = r.command;
      c.spec = r.spec;
      c.seed = 11;
      c.threads = 1;
      c.out = scratch(fmt("repro-%s-%d", r.command.c_str(), k)).string();
      std::ostringstream log;
      const int code = report::run_command(c, log);
      tally.expect(code == report::kOk, r.command + " " + r.spec + " exited " + std::to_string(code));
      outputs[k] = slurp(fs::path(c.out) / r.file);
    }
    bytes += outputs[0].size();
    tally.expect(!outputs[0].empty() && outputs[0] == outputs[1], r.command + " " + r.spec + " outputs differ");
  }
  return {tally.pass, fmt("%zu runs twice each, %zu bytes compared", runs.size(), bytes) +
                          (tally.pass ? "" : "; " + tally.first_failure)};
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    std::function<Outcome()> run;
    double limit_s;  // 0: no runtime limit
  };
  const std::vector<Criterion> criteria{
      {"heat kernel vs Taylor oracle", heat_kernel_oracle, 10},
      {"complete graph closed-form mixing", closed_form_mixing, 5},
      {"W1 duality and exhaustive oracle", transport_duality, 30},
      {"curvature ground truths", curvature_ground_truths, 60},
      {"theorem suite on the fixed chain set", theorem_suite, 600},
      {"hypercube cutoff trend", hypercube_trend, 900},
      {"perturbation counterexample", perturbation_counterexample, 300},
      {"cycle negative control", cycle_negative_control, 300},
      {"byte-identical reruns", reproducibility, 0}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && secs > c.limit_s) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s limit", c.limit_s);
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << i + 1 << ". " << c.name << " (" << fmt("%.1f", secs);
    if (c.limit_s > 0) std::cout << fmt(" / %.0f", c.limit_s);
    std::cout << " s): " << o.detail << std::endl;
  }
  std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
