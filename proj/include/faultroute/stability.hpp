#pragma once

// Stability tests for the faulty-sensing two-link network:
//  * necessary condition through the congestion floors x_lower,
//  * sufficient condition through a threshold vector theta,
//  * throughput (resilience) bounds by bisection on the demand,
//  * the piecewise-linear-quadratic Lyapunov certificate behind the
//    sufficient condition.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "faultroute/kernels.hpp"
#include "faultroute/model.hpp"

namespace faultroute {

/// Initial bisection bracket [0, kFloorCap] for the floor equation.
inline constexpr double kFloorCap = 50.0;
inline constexpr double kFloorTolerance = 1e-10;

/// Corner of the invariant set M = [x1_lower, inf) x [x2_lower, inf).
/// +infinity marks a link with zero capacity under positive demand.
struct CongestionFloor {
  LinkPair x_lower{};

  bool finite() const;
};

/// Root of eta e^{-b x} / (1 + e^{-b x}) = F_k (1 - e^{-x}).
double solve_congestion_floor(const NetworkParams& params, Link k);
CongestionFloor congestion_floors(const NetworkParams& params);
/// Signed imbalance of the floor equation at x (worst-case inflow minus outflow).
double floor_residual(const NetworkParams& params, Link k, double x);

struct NecessaryVerdict {
  // Index 0, 1: capacity inequalities for link 1 and link 2 (right minus
  // left side). Index 2: 1 - eta, which must be strictly positive.
  std::array<double, 3> slacks{};
  std::array<bool, 3> holds{};

  bool all() const { return holds[0] && holds[1] && holds[2]; }
  /// 1-based index of the first violated inequality, 0 if none.
  int first_violation() const;
};

NecessaryVerdict necessary_condition(const NetworkParams& params, const ModeDistribution& p);

struct ThetaWitness {
  LinkPair theta{};
  double drift_value = 0.0;

  bool certifies() const { return drift_value < 0.0; }
};

/// sum_s p_s max_k G_k(s, theta): the quantity that must be negative.
double sufficient_value(const NetworkParams& params, const ModeDistribution& p, const LinkPair& theta);

struct SearchOptions {
  std::size_t grid = 200;          // points per axis, log-uniform in z = e^{-theta}
  double z_floor = 1e-9;           // smallest z on the grid
  int golden_iterations = 50;      // per coordinate line search
  int sweeps = 3;
  double strict_margin = 1e-9;     // witness requires drift < -strict_margin
  Execution execution = Execution::kParallel;
};

/// Grid search plus coordinate-wise golden-section refinement in ln z.
/// Returns the lowest-drift theta found, whatever its sign.
ThetaWitness minimize_drift(const NetworkParams& params, const ModeDistribution& p,
                            const SearchOptions& options = {});

/// minimize_drift, kept only when the drift is below -strict_margin.
std::optional<ThetaWitness> sufficient_search(const NetworkParams& params, const ModeDistribution& p,
                                              const SearchOptions& options = {});

enum class Classification { kCertifiedStable, kCertifiedUnstable, kIndeterminate };

const char* to_string(Classification c);

struct StabilityVerdict {
  NecessaryVerdict necessary;
  ThetaWitness best;                    // lowest drift found by the search
  std::optional<ThetaWitness> witness;  // set when best certifies strictly
  Classification classification = Classification::kIndeterminate;

  bool sufficient_holds() const { return witness.has_value(); }
};

StabilityVerdict check_stability(const NetworkParams& params, const ModeDistribution& p,
                                 const SearchOptions& options = {});

struct BoundsOptions {
  double tolerance = 1e-4;
  std::size_t probe_points = 11;  // monotonicity probe on [0, 1]
  SearchOptions search{};
};

struct ThroughputBounds {
  double lower = 0.0;
  double upper = 1.0;
  std::optional<ThetaWitness> lower_witness;  // witness at eta = lower
  int upper_violation = 0;                    // first violated inequality at eta = upper
};

/// Bisection on eta in [0, 1]; params.eta is ignored. Throws MonotonicityError
/// if either predicate flips more than once on the probe grid.
ThroughputBounds throughput_bounds(const NetworkParams& params, const ModeDistribution& p,
                                   const BoundsOptions& options = {});

/// Upper half of throughput_bounds: smallest eta (within tolerance) at which
/// the necessary condition fails.
double necessary_upper_bound(const NetworkParams& params, const ModeDistribution& p,
                             const BoundsOptions& options = {});

struct LyapunovCertificate {
  LinkPair theta{};
  std::array<double, kNumModes> a{};  // mode offsets of V
  std::array<double, kNumModes> D{};  // worst-link drift at theta per mode
  double mean_drift = 0.0;            // sum_s p_s D_s
  double c = 0.0;
  double d = 0.0;
  double system_residual = 0.0;
};

/// Builds V(s, x) = w^2 / 2 + a_s w with w = sum_k (x_k - theta_k)_+.
/// Throws NumericalError (singular system), ErgodicityError (reducible
/// rates) or CertificateError (c <= 0).
LyapunovCertificate lyapunov_certificate(const NetworkParams& params, const ModeDistribution& p,
                                         const RateMatrix& rates, const ThetaWitness& witness);

double lyapunov_value(const LyapunovCertificate& cert, FaultMode s, const DensityState& x);

/// Generator applied to V at (s, x).
double lyapunov_generator(const NetworkParams& params, const RateMatrix& rates,
                          const LyapunovCertificate& cert, FaultMode s, const DensityState& x);

struct InvariantSetSample {
  FaultMode mode = FaultMode::kNone;
  DensityState x;
  LinkPair field{};
};

struct InvariantSetReport {
  std::size_t checked = 0;  // samples drawn outside M
  std::vector<InvariantSetSample> counterexamples;

  bool passed() const { return counterexamples.empty(); }
};

/// Draws `samples` random (s, x) with x outside M and checks that every
/// coordinate below its floor has a strictly positive field component.
InvariantSetReport invariant_set_check(const NetworkParams& params, const CongestionFloor& floors,
                                       std::size_t samples, std::uint64_t seed = 1,
                                       Execution execution = Execution::kParallel);

/// Field check at one point; empty when x lies inside M or every violated
/// coordinate points inward.
std::optional<InvariantSetSample> invariant_set_violation(const NetworkParams& params,
                                                          const CongestionFloor& floors,
                                                          FaultMode s, const DensityState& x);

}  // namespace faultroute
