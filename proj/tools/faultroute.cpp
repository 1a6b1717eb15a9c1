// faultroute: stability verdicts, throughput bounds, bound curves and
// simulation runs for two-link logit routing under sensor faults.
//
// Exit status: 0 stable, 2 unstable, 3 indeterminate, 1 error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "faultroute/closed_form.hpp"
#include "faultroute/config.hpp"
#include "faultroute/errors.hpp"
#include "faultroute/pdmp_sim.hpp"
#include "faultroute/random.hpp"
#include "faultroute/report.hpp"
#include "faultroute/stability.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace faultroute;

namespace {

constexpr int kExitError = 1;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> eta;
  bool quiet = false;
  bool dump_config = false;
};

struct Run {
  GlobalOptions opts;
  std::optional<ExperimentConfig> config;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  const ExperimentConfig& require_config(const char* command) const {
    if (!config) throw std::invalid_argument(std::string(command) + ": --config is required");
    return *config;
  }

  // Directory for data files, or nullopt when check/bounds only print.
  std::optional<fs::path> out_dir(bool always) const {
    if (!opts.out_dir.empty()) return fs::path(opts.out_dir);
    if (config && !config->output.empty()) return fs::path(config->output);
    if (always) return fs::path(".");
    return std::nullopt;
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  void print(const json& doc) const {
    if (!opts.quiet) std::cout << doc.dump(2) << '\n';
  }

  void write_metadata(const fs::path& dir, const std::string& command, const std::vector<std::uint64_t>& seeds) const {
    const json echo = config ? to_json(*config) : json(nullptr);
    write_text(dir, "metadata.json", metadata_json(command, echo, seeds, elapsed()).dump(2) + '\n');
  }
};

int cmd_check(const Run& run) {
  const ExperimentConfig& cfg = run.require_config("check");
  const ModeDistribution p = cfg.chain.distribution();
  const StabilityVerdict verdict = check_stability(cfg.params, p);
  std::optional<ThroughputBounds> bounds;
  try {
    bounds = throughput_bounds(cfg.params, p);
  } catch (const MonotonicityError& e) {
    std::cerr << "warning: " << e.what() << '\n';
  }
  const json doc = verdict_json(verdict, bounds);
  run.print(doc);
  if (auto dir = run.out_dir(false)) {
    write_text(*dir, "verdict.json", doc.dump(2) + '\n');
    run.write_metadata(*dir, "check", {});
  }
  return exit_code(verdict.classification);
}

std::optional<double> closed_form_lower(const NetworkParams& params, const ModeDistribution& p) {
  constexpr double kTol = 1e-12;
  const double p1 = p[FaultMode::kNone];
  const double p2 = p[FaultMode::kLink1Faulty];
  const double p3 = p[FaultMode::kLink2Faulty];
  if (std::abs(params.F1 - params.F2) <= kTol) return homogeneous_lower_bound(p2, p3);
  if (std::abs(p2 - p3) <= kTol) return hetero_lower_bound(std::abs(params.F1 - params.F2), p1, p2);
  return std::nullopt;
}

int cmd_bounds(const Run& run) {
  const ExperimentConfig& cfg = run.require_config("bounds");
  const ModeDistribution p = cfg.chain.distribution();
  const ThroughputBounds bounds = throughput_bounds(cfg.params, p);
  json doc = bounds_json(bounds);
  const auto cf = closed_form_lower(cfg.params, p);
  doc["closed_form_lower"] = cf ? json(*cf) : json(nullptr);
  run.print(doc);
  if (auto dir = run.out_dir(false)) {
    write_text(*dir, "bounds.json", doc.dump(2) + '\n');
    run.write_metadata(*dir, "bounds", {});
  }
  return 0;
}

int cmd_figure(const Run& run, const std::string& which, std::size_t points) {
  const fs::path dir = *run.out_dir(true);
  if (which == "homo-rate") {
    write_text(dir, "homo_rate.csv", curve_csv(failure_rate_curve(points), "p", false));
  } else if (which == "homo-corr") {
    write_text(dir, "homo_corr.csv", curve_csv(correlation_curve(points), "rho", false));
  } else {
    const std::vector<CurvePoint> curve = capacity_curve(points);
    write_text(dir, "hetero.csv", curve_csv(curve, "dF", true));
    const double beta = run.config ? run.config->params.beta : 1.0;
    std::vector<double> dF, upper;
    for (const CurvePoint& pt : curve) {
      const NetworkParams params = NetworkParams::make(0.5 * (1.0 + pt.x), 0.5 * (1.0 - pt.x), beta, 0.0);
      dF.push_back(pt.x);
      upper.push_back(necessary_upper_bound(params, ModeDistribution::uniform()));
    }
    write_text(dir, "fig4_numeric_upper.csv", numeric_upper_csv(dF, upper));
  }
  run.write_metadata(dir, "figure " + which, {});
  if (!run.opts.quiet) std::cout << "wrote " << which << " curves to " << dir.string() << '\n';
  return 0;
}

ProbeOptions probe_options(const SimSection& sim) {
  ProbeOptions o;
  o.replications = sim.replications;
  o.slope_threshold = sim.slope_threshold;
  return o;
}

int cmd_simulate(const Run& run) {
  const ExperimentConfig& cfg = run.require_config("simulate");
  if (!cfg.sim) throw std::invalid_argument("simulate: config has no \"sim\" section");
  const RateMatrix rates = cfg.chain.rate_matrix();
  const SimConfig& sc = cfg.sim->sim;
  const Trajectory traj = simulate(cfg.params, rates, sc);
  const ProbeResult probe = stability_probe(cfg.params, rates, sc, probe_options(*cfg.sim));

  json summary{{"diverged", traj.diverged},
               {"divergence_time", traj.divergence_time ? json(*traj.divergence_time) : json(nullptr)},
               {"end_time", traj.end_time},
               {"avg_abs_x", traj.avg_abs_x},
               {"mode_occupancy", traj.mode_occupancy},
               {"jumps", traj.jumps.size()},
               {"avg_slope", trailing_avg_slope(traj)},
               {"growth_slope", trailing_growth_slope(traj)}};
  json doc{{"config", to_json(cfg)},
           {"seed", sc.seed},
           {"generator", Rng::kGeneratorName},
           {"summary", summary},
           {"probe", probe_json(probe)}};

  const fs::path dir = *run.out_dir(true);
  write_text(dir, "trajectory.csv", trajectory_csv(traj));
  write_text(dir, "simulate.json", doc.dump(2) + '\n');
  std::vector<std::uint64_t> seeds;
  for (const auto& r : probe.replications) seeds.push_back(r.seed);
  run.write_metadata(dir, "simulate", seeds);
  run.print(json{{"summary", summary}, {"verdict", to_string(probe.verdict)}});

  switch (probe.verdict) {
    case EmpiricalVerdict::kStable: return 0;
    case EmpiricalVerdict::kUnstable: return 2;
    case EmpiricalVerdict::kInconclusive: return 3;
  }
  return 3;
}

int cmd_scan(const Run& run, std::vector<double> etas) {
  const ExperimentConfig& cfg = run.require_config("scan");
  const SimSection sim = cfg.sim.value_or(SimSection{});
  if (etas.empty()) etas = sim.eta_grid;
  if (etas.empty())
    for (int i = 0; i <= 10; ++i) etas.push_back(0.1 * i);
  const ScanResult scan = throughput_scan(cfg.params, cfg.chain.rate_matrix(), sim.sim, etas, probe_options(sim));

  const fs::path dir = *run.out_dir(true);
  json doc = scan_json(scan);
  doc["config"] = to_json(cfg);
  doc["seed"] = sim.sim.seed;
  doc["generator"] = Rng::kGeneratorName;
  write_text(dir, "scan.csv", scan_csv(scan));
  write_text(dir, "scan.json", doc.dump(2) + '\n');
  run.write_metadata(dir, "scan", {sim.sim.seed});
  if (!run.opts.quiet) std::cout << scan_csv(scan);
  return 0;
}

void apply_overrides(ExperimentConfig& cfg, const GlobalOptions& opts) {
  if (opts.eta) cfg.params = cfg.params.with_eta(*opts.eta);
  if (opts.seed) {
    if (!cfg.sim) cfg.sim = SimSection{};
    cfg.sim->sim.seed = *opts.seed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability analysis for two-link logit routing with faulty sensors"};
  Run run;
  GlobalOptions& opts = run.opts;
  app.add_option("--config", opts.config_path, "Experiment configuration (JSON)")->check(CLI::ExistingFile);
  app.add_option("--out", opts.out_dir, "Output directory for data files");
  app.add_option("--seed", opts.seed, "Simulation seed (overrides sim.seed)");
  app.add_option("--eta", opts.eta, "Demand (overrides eta)");
  app.add_flag("--quiet", opts.quiet, "Do not print results to stdout");
  app.add_flag("--dump-config", opts.dump_config, "Print the resolved configuration and exit");
  app.require_subcommand(0, 1);

  app.add_subcommand("check", "Necessary and sufficient condition verdict");
  app.add_subcommand("bounds", "Numeric throughput bounds");
  auto* figure = app.add_subcommand("figure", "Closed-form bound curves as CSV");
  std::string which;
  std::size_t points = 101;
  figure->add_option("which", which, "homo-rate | homo-corr | hetero")
      ->required()
      ->check(CLI::IsMember({"homo-rate", "homo-corr", "hetero"}));
  figure->add_option("--points", points, "Grid points")->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
  app.add_subcommand("simulate", "Simulate one trajectory and probe stability");
  auto* scan = app.add_subcommand("scan", "Empirical stability over a demand grid");
  std::vector<double> etas;
  scan->add_option("--etas", etas, "Demand grid (overrides sim.eta_grid)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (!opts.config_path.empty()) {
      run.config = load_config(opts.config_path);
      for (const auto& w : run.config->warnings) std::cerr << "warning: " << w << '\n';
      apply_overrides(*run.config, opts);
    }
    if (opts.dump_config) {
      std::cout << to_json(run.require_config("--dump-config")).dump(2) << '\n';
      return 0;
    }

    std::string command;
    if (!app.get_subcommands().empty())
      command = app.get_subcommands().front()->get_name();
    else if (run.config && !run.config->analysis.empty())
      command = run.config->analysis;
    else
      throw std::invalid_argument("no subcommand given (check, bounds, figure, simulate, scan)");

    if (command == "check") return cmd_check(run);
    if (command == "bounds") return cmd_bounds(run);
    if (command == "figure") {
      if (which.empty()) throw std::invalid_argument("figure: curve name required (homo-rate, homo-corr, hetero)");
      return cmd_figure(run, which, points);
    }
    if (command == "simulate") return cmd_simulate(run);
    if (command == "scan") return cmd_scan(run, etas);
    throw std::invalid_argument("unknown command " + command);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
