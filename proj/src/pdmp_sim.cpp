#include "faultroute/pdmp_sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>

#include "faultroute/errors.hpp"
#include "faultroute/random.hpp"
#include "faultroute/stability.hpp"

namespace faultroute {

void validate(const SimConfig& cfg, const DensityState& x0) {
  if (!(cfg.horizon > 0.0)) throw std::invalid_argument("simulation horizon must be > 0");
  if (!(cfg.step > 0.0) || !(cfg.step <= cfg.sample_interval))
    throw std::invalid_argument("integration step must satisfy 0 < step <= sample_interval");
  if (!(x0.x1 >= 0.0) || !(x0.x2 >= 0.0)) throw std::invalid_argument("initial densities must be >= 0");
  if (!(cfg.divergence_cap > x0.norm1())) throw std::invalid_argument("divergence cap must exceed |x0|");
}

DensityState default_initial_state(const NetworkParams& params) {
  const CongestionFloor floors = congestion_floors(params);
  if (!floors.finite()) return {0.0, 0.0};
  return {floors.x_lower[0], floors.x_lower[1]};
}

namespace {

struct State {
  double x1 = 0.0;
  double x2 = 0.0;
  double integral = 0.0;  // int |X| dt
};

State derivative(const NetworkParams& params, FaultMode s, const State& y) {
  // Stage values may dip below zero by rounding; the field is evaluated on
  // the clamped state.
  const DensityState x{std::max(y.x1, 0.0), std::max(y.x2, 0.0)};
  const LinkPair g = vector_field(params, s, x);
  return {g[0], g[1], x.norm1()};
}

State axpy(const State& y, double h, const State& k) {
  return {y.x1 + h * k.x1, y.x2 + h * k.x2, y.integral + h * k.integral};
}

State rk4_step(const NetworkParams& params, FaultMode s, const State& y, double h) {
  const State k1 = derivative(params, s, y);
  const State k2 = derivative(params, s, axpy(y, 0.5 * h, k1));
  const State k3 = derivative(params, s, axpy(y, 0.5 * h, k2));
  const State k4 = derivative(params, s, axpy(y, h, k3));
  State out;
  out.x1 = y.x1 + h / 6.0 * (k1.x1 + 2.0 * k2.x1 + 2.0 * k3.x1 + k4.x1);
  out.x2 = y.x2 + h / 6.0 * (k1.x2 + 2.0 * k2.x2 + 2.0 * k3.x2 + k4.x2);
  out.integral = y.integral + h / 6.0 * (k1.integral + 2.0 * k2.integral + 2.0 * k3.integral + k4.integral);
  return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

double holding_time(Rng& rng, double exit_rate) {
  if (exit_rate <= 0.0) return kInf;
  return -std::log1p(-rng.uniform()) / exit_rate;
}

FaultMode next_mode(Rng& rng, const RateMatrix& rates, FaultMode s) {
  const double total = rates.exit_rate(s);
  const double target = rng.uniform() * total;
  double acc = 0.0;
  FaultMode last = s;
  for (FaultMode t : kAllModes) {
    const double r = rates(s, t);
    if (r <= 0.0) continue;
    acc += r;
    last = t;
    if (target < acc) return t;
  }
  return last;
}

double ols_slope(const std::vector<TrajectorySample>& samples, bool use_average) {
  const std::size_t n = samples.size();
  if (n < 4) return 0.0;
  const std::size_t first = n / 2;
  const double m = static_cast<double>(n - first);
  double st = 0.0, sy = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    st += samples[i].t;
    sy += use_average ? samples[i].avg_abs_x : samples[i].x1 + samples[i].x2;
  }
  const double mt = st / m;
  const double my = sy / m;
  double num = 0.0, den = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    const double dt = samples[i].t - mt;
    const double y = use_average ? samples[i].avg_abs_x : samples[i].x1 + samples[i].x2;
    num += dt * (y - my);
    den += dt * dt;
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

Trajectory simulate(const NetworkParams& params, const RateMatrix& rates, const SimConfig& cfg) {
  validate(params);
  const DensityState x0 = cfg.x0.value_or(default_initial_state(params));
  validate(cfg, x0);

  Rng rng(cfg.seed);
  Trajectory traj;
  FaultMode s = cfg.s0;
  double t = 0.0;
  State y{x0.x1, x0.x2, 0.0};
  traj.samples.push_back({0.0, s, y.x1, y.x2, x0.norm1()});

  std::size_t sample_index = 1;
  auto sample_time = [&](std::size_t k) { return static_cast<double>(k) * cfg.sample_interval; };
  double next_jump = holding_time(rng, rates.exit_rate(s));

  while (t < cfg.horizon && !traj.diverged) {
    const double target = std::min({next_jump, cfg.horizon, sample_time(sample_index)});
    // Fixed steps up to the next event; the last one is shortened to land on it.
    while (t < target) {
      const double remaining = target - t;
      const bool last = remaining <= cfg.step * (1.0 + 1e-9);
      const double h = last ? remaining : cfg.step;
      y = rk4_step(params, s, y, h);
      y.x1 = std::max(y.x1, 0.0);
      y.x2 = std::max(y.x2, 0.0);
      traj.mode_occupancy[mode_index(s)] += h;
      t = last ? target : t + h;
      if (!std::isfinite(y.x1) || !std::isfinite(y.x2) || !std::isfinite(y.integral))
        throw NumericalError("simulate: non-finite state at t = " + std::to_string(t) + " in mode " +
                             std::to_string(mode_number(s)));
      if (y.x1 + y.x2 > cfg.divergence_cap) {
        traj.diverged = true;
        traj.divergence_time = t;
        break;
      }
    }
    if (traj.diverged) {
      traj.samples.push_back({t, s, y.x1, y.x2, y.integral / t});
      break;
    }
    if (t == sample_time(sample_index) || t >= cfg.horizon) {
      traj.samples.push_back({t, s, y.x1, y.x2, y.integral / t});
      while (sample_time(sample_index) <= t) ++sample_index;
    }
    if (t == next_jump && t < cfg.horizon) {
      const FaultMode to = next_mode(rng, rates, s);
      traj.jumps.push_back({t, s, to});
      s = to;
      next_jump = t + holding_time(rng, rates.exit_rate(s));
    }
  }

  traj.end_time = t;
  traj.avg_abs_x = t > 0.0 ? y.integral / t : x0.norm1();
  if (t > 0.0)
    for (double& v : traj.mode_occupancy) v /= t;
  return traj;
}

std::array<double, kNumModes> occupancy_in_window(const Trajectory& traj, FaultMode s0, double t0, double t1) {
  if (!(t1 > t0)) throw std::invalid_argument("occupancy window must have t1 > t0");
  std::array<double, kNumModes> occ{};
  double start = 0.0;
  FaultMode s = s0;
  auto add = [&](double a, double b, FaultMode m) {
    const double lo = std::max(a, t0);
    const double hi = std::min(b, t1);
    if (hi > lo) occ[mode_index(m)] += hi - lo;
  };
  for (const ModeJump& j : traj.jumps) {
    add(start, j.t, s);
    start = j.t;
    s = j.to;
  }
  add(start, traj.end_time, s);
  for (double& v : occ) v /= (t1 - t0);
  return occ;
}

double trailing_avg_slope(const Trajectory& traj) { return ols_slope(traj.samples, true); }
double trailing_growth_slope(const Trajectory& traj) { return ols_slope(traj.samples, false); }

const char* to_string(EmpiricalVerdict v) {
  switch (v) {
    case EmpiricalVerdict::kStable: return "empirically-stable";
    case EmpiricalVerdict::kUnstable: return "empirically-unstable";
    case EmpiricalVerdict::kInconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ReplicationStats run_replication(const NetworkParams& params, const RateMatrix& rates, SimConfig cfg,
                                 std::uint64_t seed) {
  cfg.seed = seed;
  const Trajectory traj = simulate(params, rates, cfg);
  return {seed, traj.diverged, traj.avg_abs_x, trailing_avg_slope(traj), trailing_growth_slope(traj)};
}

}  // namespace

ProbeResult stability_probe(const NetworkParams& params, const RateMatrix& rates, const SimConfig& cfg,
                            const ProbeOptions& options) {
  if (options.replications == 0) throw std::invalid_argument("stability_probe: replications must be >= 1");
  ProbeResult result;
  result.replications.resize(options.replications);
  std::vector<std::exception_ptr> errors(options.replications);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(options.replications);

  if (options.execution == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      try {
        result.replications[k] = run_replication(params, rates, cfg, replication_seed(cfg.seed, k));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  } else {
    for (std::size_t k = 0; k < options.replications; ++k)
      result.replications[k] = run_replication(params, rates, cfg, replication_seed(cfg.seed, k));
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<double> avg_slopes;
  std::vector<double> growth_slopes;
  for (const auto& r : result.replications) {
    avg_slopes.push_back(r.avg_slope);
    growth_slopes.push_back(r.growth_slope);
    if (r.diverged) ++result.diverged_count;
  }
  result.median_avg_slope = median(avg_slopes);
  result.median_growth_slope = median(growth_slopes);

  const bool majority_diverged = 2 * result.diverged_count > options.replications;
  if (majority_diverged || result.median_avg_slope > 10.0 * options.slope_threshold)
    result.verdict = EmpiricalVerdict::kUnstable;
  else if (result.diverged_count == 0 && result.median_avg_slope < options.slope_threshold)
    result.verdict = EmpiricalVerdict::kStable;
  else
    result.verdict = EmpiricalVerdict::kInconclusive;
  return result;
}

ScanResult throughput_scan(const NetworkParams& params, const RateMatrix& rates, const SimConfig& cfg,
                           const std::vector<double>& eta_grid, const ProbeOptions& options) {
  for (std::size_t i = 0; i < eta_grid.size(); ++i) {
    if (!(eta_grid[i] >= 0.0 && eta_grid[i] <= 1.2)) throw std::invalid_argument("scan: eta outside [0, 1.2]");
    if (i > 0 && !(eta_grid[i] > eta_grid[i - 1])) throw std::invalid_argument("scan: eta grid must be ascending");
  }
  ScanResult scan;
  for (double eta : eta_grid) {
    ScanRow row{eta, stability_probe(params.with_eta(eta), rates, cfg, options)};
    if (row.probe.verdict == EmpiricalVerdict::kStable) scan.largest_stable = eta;
    if (row.probe.verdict == EmpiricalVerdict::kUnstable && !scan.smallest_unstable) scan.smallest_unstable = eta;
    scan.rows.push_back(std::move(row));
  }
  return scan;
}

}  // namespace faultroute
