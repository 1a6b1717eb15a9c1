#pragma once

// Event-driven simulation of the hybrid process (S(t), X(t)): exponential
// holding times from the rate matrix, RK4 between jumps.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "faultroute/kernels.hpp"
#include "faultroute/model.hpp"

namespace faultroute {

struct SimConfig {
  double horizon = 1e4;
  double step = 1e-2;
  std::uint64_t seed = 1;
  std::optional<DensityState> x0;  // default: congestion floors when finite, else (0, 0)
  FaultMode s0 = FaultMode::kNone;
  double sample_interval = 1.0;
  double divergence_cap = 1e3;
};

/// Throws std::invalid_argument when horizon <= 0, step is outside
/// (0, sample_interval] or |x0| >= divergence_cap.
void validate(const SimConfig& cfg, const DensityState& x0);

/// Initial state used when cfg.x0 is unset.
DensityState default_initial_state(const NetworkParams& params);

struct TrajectorySample {
  double t = 0.0;
  FaultMode mode = FaultMode::kNone;
  double x1 = 0.0;
  double x2 = 0.0;
  double avg_abs_x = 0.0;  // (1/t) int_0^t |X|, equal to |X(0)| at t = 0
};

struct ModeJump {
  double t = 0.0;
  FaultMode from = FaultMode::kNone;
  FaultMode to = FaultMode::kNone;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<ModeJump> jumps;
  std::array<double, kNumModes> mode_occupancy{};  // fractions of [0, end_time]
  double end_time = 0.0;
  double avg_abs_x = 0.0;
  bool diverged = false;
  std::optional<double> divergence_time;
};

/// Fully deterministic for a given seed. Throws NumericalError on a
/// non-finite state.
Trajectory simulate(const NetworkParams& params, const RateMatrix& rates, const SimConfig& cfg);

/// Fraction of [t0, t1] spent in each mode, reconstructed from the jump log.
std::array<double, kNumModes> occupancy_in_window(const Trajectory& traj, FaultMode s0, double t0, double t1);

/// Ordinary least-squares slope of avg_abs_x over the trailing half of samples.
double trailing_avg_slope(const Trajectory& traj);
/// Ordinary least-squares slope of x1 + x2 over the trailing half of samples.
double trailing_growth_slope(const Trajectory& traj);

enum class EmpiricalVerdict { kStable, kUnstable, kInconclusive };

const char* to_string(EmpiricalVerdict v);

struct ReplicationStats {
  std::uint64_t seed = 0;
  bool diverged = false;
  double avg_abs_x = 0.0;
  double avg_slope = 0.0;
  double growth_slope = 0.0;
};

struct ProbeResult {
  EmpiricalVerdict verdict = EmpiricalVerdict::kInconclusive;
  std::vector<ReplicationStats> replications;
  double median_avg_slope = 0.0;
  double median_growth_slope = 0.0;
  std::size_t diverged_count = 0;
};

struct ProbeOptions {
  std::size_t replications = 4;
  double slope_threshold = 1e-4;
  Execution execution = Execution::kParallel;
};

/// Replication i uses seed cfg.seed ^ i.
ProbeResult stability_probe(const NetworkParams& params, const RateMatrix& rates, const SimConfig& cfg,
                            const ProbeOptions& options = {});

struct ScanRow {
  double eta = 0.0;
  ProbeResult probe;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::optional<double> largest_stable;
  std::optional<double> smallest_unstable;
};

/// One probe per demand level; eta_grid must be ascending within [0, 1.2].
ScanResult throughput_scan(const NetworkParams& params, const RateMatrix& rates, const SimConfig& cfg,
                           const std::vector<double>& eta_grid, const ProbeOptions& options = {});

}  // namespace faultroute
