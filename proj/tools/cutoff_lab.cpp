// Command-line front end: analyze, verify, scan, curvature, random-cayley.
#include <iostream>

#include <CLI11.hpp>

#include "cutoff/report/commands.hpp"

using cutoff::report::RunConfig;

int main(int argc, char** argv) {
  CLI::App app{"cutoff-lab: mixing, curvature and entropic cutoff diagnostics for finite Markov chains"};
  app.set_config("--config", "", "Flat key = value file; command-line flags take precedence");
  app.require_subcommand(1);

  RunConfig config;
  std::string positional;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"analyze", "Mixing times, relaxation time, curvature and entropy; analysis.csv + profile.svg"},
      {"verify", "Check every proved inequality; verdicts.csv, exit 3 on any failure"},
      {"scan", "Sweep a family range such as hypercube:d=4..10; scan.csv + plots"},
      {"curvature", "Per-edge Ollivier and per-vertex Bakry-Emery curvature; curvature.csv"},
      {"random-cayley", "Draw a random abelian Cayley graph; random_cayley.chain + random_cayley.csv"}};
  // Shared options live on the top-level app so a flat config file binds to them;
  // subcommands fall through, so they may also follow the command name.
  app.add_option("--spec", config.spec, "Family spec, e.g. hypercube:d=8 or cayley-random:Z2^8:d=16:seed=42");
  app.add_option("--chain-file", config.chain_file, "Text matrix: n, then n rows; '#' comments; optional labels: line");
  app.add_option("--eps", config.eps, "Comma-separated eps values in (0,1)")->delimiter(',');
  app.add_option("--tgrid", config.tgrid, "auto or a:b:steps")->capture_default_str();
  app.add_option("--tol", config.tol, "Heat-kernel Poisson tail tolerance, in (0, 1e-6]")->capture_default_str();
  app.add_option("--tmix-tol", config.tmix_tol, "Absolute bisection tolerance for t_mix (0 = 1e-4 relative)");
  app.add_option("--seed", config.seed, "Seed for the random certificates")->capture_default_str();
  app.add_option("--out", config.out, "Output directory")->capture_default_str();
  app.add_option("--threads", config.threads, "Worker threads")->capture_default_str();
  app.add_option("--state-cap", config.state_cap, "Largest allowed state space")->capture_default_str();
  app.add_flag("!--no-cache", config.cache, "Disable the on-disk heat-kernel cache");
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("spec_arg", positional, "Family spec (same as --spec)");
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cutoff::report::kSpecError;
  }
  config.command = app.get_subcommands().front()->get_name();
  if (!positional.empty()) {
    if (!config.spec.empty() && config.spec != positional) {
      std::cerr << "error: spec given both positionally and with --spec\n";
      return cutoff::report::kSpecError;
    }
    config.spec = positional;
  }
  return cutoff::report::run_command(config, std::cerr);
}
