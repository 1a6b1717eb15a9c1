#pragma once

// Closed-form resilience bounds for two links with symmetric fault
// statistics, the auxiliary polynomial g(z) behind the homogeneous bound, and
// the analytic witness construction for asymmetric capacities.

#include <cstddef>
#include <vector>

#include "faultroute/model.hpp"
#include "faultroute/stability.hpp"

namespace faultroute {

/// Identical per-link failure probability p with correlation rho.
class FailureModel {
 public:
  /// Requires 0 <= p <= 1, -p <= rho <= 1 - p and every induced mode
  /// probability in [0, 1]; otherwise throws std::domain_error.
  static FailureModel make(double p_fail, double rho = 0.0);

  double p_fail() const { return p_fail_; }
  double rho() const { return rho_; }

  /// p4 = p (p + rho), p2 = p3 = p (1 - p - rho), p1 = 1 - p2 - p3 - p4.
  ModeDistribution distribution() const;

 private:
  FailureModel(double p, double rho) : p_fail_(p), rho_(rho) {}
  double p_fail_;
  double rho_;
};

/// 1 / (1 + p2 + p3), valid for F1 = F2.
double homogeneous_lower_bound(double p2, double p3);
/// 1 / (1 + 2p(1 - p)): independent links with failure probability p.
double failure_rate_bound(double p);
/// 1 / (1 + 2p(1 - p - rho)).
double correlation_bound(double p, double rho);

/// Threshold 1 / (2 - p1) separating the two regimes of the asymmetric bound.
double hetero_threshold(double p1);
/// min{(1 - dF)/(1 - p1), (1 - p4 dF)/(1 + 2 p2)} with p3 = p2, p4 = 1 - p1 - 2 p2.
double hetero_lower_bound(double dF, double p1, double p2);
/// Same bound in its two-branch form split at hetero_threshold(p1).
double hetero_lower_bound_piecewise(double dF, double p1, double p2);
/// Reference upper curve for p = (1/4, 1/4, 1/4, 1/4):
/// min(1, -(2/3) sqrt(3 dF^2 - 6 dF + 7) - 2 dF + 10/3).
double hetero_upper_reference(double dF);

struct GPolynomial {
  double beta = 1.0;
  double eta = 0.0;
  double q = 0.0;  // p2 + p3
};

struct GValues {
  double g = 0.0;
  double dg = 0.0;
  double d2g = 0.0;
};

/// g(z) = z^{b+1} - c z^b + z - (1 - (1+q) eta) with c = 1 - (1-q) eta, and
/// its first two derivatives. Requires 0 < z <= 1.
GValues g_eval(const GPolynomial& gp, double z);
/// Limit of g as z -> 0+: (1 + q) eta - 1.
double g_at_zero(const GPolynomial& gp);
/// c (b - 1)/(b + 1): the only critical point of g' when b > 1.
double g_prime_critical_point(const GPolynomial& gp);

struct MonotonicityReport {
  bool passed = false;
  double min_dg = 0.0;      // smallest sampled g'
  double argmin_z = 0.0;
  bool case_ok = false;     // b <= 1: g'' > 0 on the grid; b > 1: min g' matches g'(z0)
  double z0 = 0.0;          // b > 1 only
  double dg_at_z0 = 0.0;    // b > 1 only; equals 1 - c z0^{b-1}
};

/// Samples g' (and g'') on z = i / grid, i = 1..grid. Failures are reported.
MonotonicityReport g_monotonicity_check(const GPolynomial& gp, std::size_t grid = 10000);

enum class WitnessRoute { kZeroDemand, kCapacityGap, kBalancedRatio, kSearchFallback };

const char* to_string(WitnessRoute r);

struct HeteroWitness {
  ThetaWitness witness;
  WitnessRoute route = WitnessRoute::kZeroDemand;
};

/// Builds theta with sufficient drift <= 0 from the asymmetric-capacity
/// argument. Requires p2 = p3, F1 >= F2 and 0 <= eta < hetero_lower_bound.
/// Falls back to sufficient_search when the construction does not verify and
/// throws InconsistencyError if that fails too.
HeteroWitness hetero_witness(const NetworkParams& params, const ModeDistribution& p, double eta);

struct CurvePoint {
  double x = 0.0;
  double lower = 0.0;
  double upper = 0.0;  // only set for the capacity-difference curve
};

/// p in [0, 1] -> failure_rate_bound.
std::vector<CurvePoint> failure_rate_curve(std::size_t points = 101);
/// rho in [-0.5, 0.5] at p = 0.5 -> correlation_bound.
std::vector<CurvePoint> correlation_curve(std::size_t points = 101);
/// dF in [0, 1], uniform p -> hetero_lower_bound and hetero_upper_reference.
std::vector<CurvePoint> capacity_curve(std::size_t points = 101);

}  // namespace faultroute
