#include "faultroute/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "faultroute/errors.hpp"

namespace faultroute {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSymmetryTolerance = 1e-12;

void require_probability(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error(std::string(what) + " must lie in [0, 1]");
}

void require_hetero_args(double dF, double p1, double p2) {
  require_probability(dF, "capacity difference");
  require_probability(p1, "p1");
  require_probability(p2, "p2");
  if (p1 + 2.0 * p2 > 1.0 + kSymmetryTolerance) throw std::domain_error("p1 + 2 p2 must be <= 1");
}

double abscissa(std::size_t i, std::size_t points, double lo, double hi) {
  if (points < 2) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

}  // namespace

FailureModel FailureModel::make(double p_fail, double rho) {
  require_probability(p_fail, "failure probability");
  if (!(rho >= -p_fail - 1e-15 && rho <= 1.0 - p_fail + 1e-15))
    throw std::domain_error("correlation must satisfy -p <= rho <= 1 - p");
  const double p4 = p_fail * (p_fail + rho);
  const double p2 = p_fail * (1.0 - p_fail - rho);
  for (double v : {1.0 - 2.0 * p2 - p4, p2, p4})
    if (v < -1e-15 || v > 1.0 + 1e-15) throw std::domain_error("failure model induces a probability outside [0, 1]");
  return FailureModel(p_fail, rho);
}

ModeDistribution FailureModel::distribution() const {
  const double p4 = p_fail_ * (p_fail_ + rho_);
  const double p2 = p_fail_ * (1.0 - p_fail_ - rho_);
  const double p1 = 1.0 - 2.0 * p2 - p4;
  auto clamp = [](double v) { return std::clamp(v, 0.0, 1.0); };
  return ModeDistribution{{clamp(p1), clamp(p2), clamp(p2), clamp(p4)}};
}

double homogeneous_lower_bound(double p2, double p3) {
  require_probability(p2, "p2");
  require_probability(p3, "p3");
  if (p2 + p3 > 1.0 + kSymmetryTolerance) throw std::domain_error("p2 + p3 must be <= 1");
  return 1.0 / (1.0 + p2 + p3);
}

double failure_rate_bound(double p) {
  require_probability(p, "failure probability");
  return 1.0 / (1.0 + 2.0 * p * (1.0 - p));
}

double correlation_bound(double p, double rho) {
  const FailureModel model = FailureModel::make(p, rho);
  return 1.0 / (1.0 + 2.0 * model.p_fail() * (1.0 - model.p_fail() - model.rho()));
}

double hetero_threshold(double p1) {
  require_probability(p1, "p1");
  return 1.0 / (2.0 - p1);
}

namespace {

double gap_branch(double dF, double p1) {
  if (p1 < 1.0) return (1.0 - dF) / (1.0 - p1);
  return dF < 1.0 ? kInf : 0.0;
}

double balanced_branch(double dF, double p1, double p2) {
  const double p4 = 1.0 - p1 - 2.0 * p2;
  return (1.0 - p4 * dF) / (1.0 + 2.0 * p2);
}

}  // namespace

double hetero_lower_bound(double dF, double p1, double p2) {
  require_hetero_args(dF, p1, p2);
  return std::min(gap_branch(dF, p1), balanced_branch(dF, p1, p2));
}

double hetero_lower_bound_piecewise(double dF, double p1, double p2) {
  require_hetero_args(dF, p1, p2);
  if (dF > hetero_threshold(p1)) return gap_branch(dF, p1);
  return balanced_branch(dF, p1, p2);
}

double hetero_upper_reference(double dF) {
  require_probability(dF, "capacity difference");
  return std::min(1.0, -2.0 / 3.0 * std::sqrt(3.0 * dF * dF - 6.0 * dF + 7.0) - 2.0 * dF + 10.0 / 3.0);
}

// ---------------------------------------------------------------------------
// g(z)

namespace {
double g_coefficient(const GPolynomial& gp) { return 1.0 - (1.0 - gp.q) * gp.eta; }
}  // namespace

GValues g_eval(const GPolynomial& gp, double z) {
  if (!(z > 0.0 && z <= 1.0)) throw std::domain_error("g_eval: z must lie in (0, 1]");
  const double b = gp.beta;
  const double c = g_coefficient(gp);
  const double zb = std::pow(z, b);
  const double zb1 = std::pow(z, b - 1.0);
  const double h = (b + 1.0) * z - c * (b - 1.0);
  GValues v;
  v.g = z * zb - c * zb + z - (1.0 - (1.0 + gp.q) * gp.eta);
  v.dg = (b + 1.0) * zb - c * b * zb1 + 1.0;
  v.d2g = b * std::pow(z, b - 2.0) * h;
  return v;
}

double g_at_zero(const GPolynomial& gp) { return (1.0 + gp.q) * gp.eta - 1.0; }

double g_prime_critical_point(const GPolynomial& gp) {
  return g_coefficient(gp) * (gp.beta - 1.0) / (gp.beta + 1.0);
}

MonotonicityReport g_monotonicity_check(const GPolynomial& gp, std::size_t grid) {
  if (grid == 0) throw std::invalid_argument("g_monotonicity_check: empty grid");
  MonotonicityReport r;
  r.min_dg = kInf;
  bool convex = true;
  for (std::size_t i = 1; i <= grid; ++i) {
    const double z = static_cast<double>(i) / static_cast<double>(grid);
    const GValues v = g_eval(gp, z);
    if (v.dg < r.min_dg) {
      r.min_dg = v.dg;
      r.argmin_z = z;
    }
    if (!(v.d2g > 0.0)) convex = false;
  }
  if (gp.beta <= 1.0) {
    r.case_ok = convex;
  } else {
    constexpr double kEps = 1e-6;
    r.z0 = g_prime_critical_point(gp);
    r.dg_at_z0 = r.z0 > 0.0 ? g_eval(gp, r.z0).dg : 1.0;
    r.case_ok = r.dg_at_z0 > 0.0 && r.min_dg >= r.dg_at_z0 - kEps;
  }
  r.passed = r.min_dg > 0.0 && r.case_ok;
  return r;
}

// ---------------------------------------------------------------------------
// Asymmetric-capacity witness

const char* to_string(WitnessRoute r) {
  switch (r) {
    case WitnessRoute::kZeroDemand: return "zero-demand";
    case WitnessRoute::kCapacityGap: return "capacity-gap";
    case WitnessRoute::kBalancedRatio: return "balanced-ratio";
    case WitnessRoute::kSearchFallback: return "search-fallback";
  }
  return "search-fallback";
}

namespace {

constexpr double kZFloor = 1e-9;
constexpr double kBisectTolerance = 1e-10;

struct Curve {
  // Maps z to (y, z) in z-space; y <= 1 on the admissible part.
  double ratio = 1.0;      // y = ratio * z, or fixed y when fixed_y > 0
  double fixed_y = -1.0;
  double z_max = 1.0;

  LinkPair theta(double z) const {
    const double y = fixed_y > 0.0 ? fixed_y : std::min(1.0, ratio * z);
    return {y >= 1.0 ? 0.0 : -std::log(y), z >= 1.0 ? 0.0 : -std::log(z)};
  }
};

// Looks for a point on the curve with drift <= 0: a negative point near the
// small-z end (scanning outward if necessary), then bisection toward the sign
// change, keeping the point on the negative side.
std::optional<ThetaWitness> walk_curve(const NetworkParams& params, const ModeDistribution& p, const Curve& curve) {
  auto drift = [&](double z) { return sufficient_value(params, p, curve.theta(z)); };
  const double z_hi_limit = std::min(1.0, curve.z_max);
  if (!(z_hi_limit > kZFloor)) return std::nullopt;

  double neg = kZFloor;
  double neg_value = drift(neg);
  if (neg_value > 0.0) {
    constexpr int kScan = 200;
    const double lo = std::log(kZFloor);
    const double hi = std::log(z_hi_limit);
    bool found = false;
    for (int i = 1; i <= kScan && !found; ++i) {
      const double z = std::exp(lo + (hi - lo) * i / kScan);
      const double v = drift(z);
      if (v <= 0.0) {
        neg = z;
        neg_value = v;
        found = true;
      }
    }
    if (!found) return std::nullopt;
  }

  // Intermediate value search for the crossing above `neg`.
  double pos = z_hi_limit;
  if (drift(pos) <= 0.0) {
    // Whole tail is non-positive; keep the more negative end.
    const double v = drift(pos);
    if (v < neg_value) return ThetaWitness{curve.theta(pos), v};
    return ThetaWitness{curve.theta(neg), neg_value};
  }
  double lo = neg;
  double hi = pos;
  while (hi - lo > kBisectTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (drift(mid) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  // Step back inside the negative region for margin when that helps.
  ThetaWitness best{curve.theta(lo), drift(lo)};
  const double inner = std::max(neg, 0.5 * lo);
  const double inner_value = drift(inner);
  if (inner_value < best.drift_value) best = {curve.theta(inner), inner_value};
  if (neg_value < best.drift_value) best = {curve.theta(neg), neg_value};
  return best;
}

}  // namespace

HeteroWitness hetero_witness(const NetworkParams& base, const ModeDistribution& p, double eta) {
  const NetworkParams params = base.with_eta(eta);
  const double p1 = p[FaultMode::kNone];
  const double p2 = p[FaultMode::kLink1Faulty];
  if (std::abs(p2 - p[FaultMode::kLink2Faulty]) > kSymmetryTolerance)
    throw std::invalid_argument("hetero_witness: requires p2 = p3");
  if (params.F1 < params.F2) throw std::invalid_argument("hetero_witness: requires F1 >= F2");
  const double dF = params.F1 - params.F2;
  const double bound = hetero_lower_bound(std::clamp(dF, 0.0, 1.0), p1, std::min(p2, 0.5 * (1.0 - p1)));
  if (!(eta < bound)) throw std::invalid_argument("hetero_witness: eta must lie strictly below the bound");

  if (eta == 0.0) {
    const LinkPair theta{1.0, 1.0};
    return {{theta, sufficient_value(params, p, theta)}, WitnessRoute::kZeroDemand};
  }

  std::optional<ThetaWitness> built;
  WitnessRoute route;
  if (dF > hetero_threshold(p1) || eta < dF) {
    // Link 1 kept below (F1 - F2 - eta)/F1 of its capacity; search along z.
    route = WitnessRoute::kCapacityGap;
    Curve curve;
    curve.fixed_y = 1.0 - (eta + params.F2) / params.F1;
    if (curve.fixed_y > 0.0) built = walk_curve(params, p, curve);
  } else {
    // Fixed logit imbalance rho between the thresholds: y^b = z^b (1+rho)/(1-rho).
    route = WitnessRoute::kBalancedRatio;
    const double rho = 0.99 * std::min(1.0, dF / eta);
    Curve curve;
    curve.ratio = std::pow((1.0 + rho) / (1.0 - rho), 1.0 / params.beta);
    curve.z_max = 1.0 / curve.ratio;
    built = walk_curve(params, p, curve);
  }
  if (built && built->drift_value <= 0.0) return {*built, route};

  if (auto found = sufficient_search(params, p)) return {*found, WitnessRoute::kSearchFallback};
  throw InconsistencyError("hetero_witness: no witness below the closed-form bound");
}

// ---------------------------------------------------------------------------
// Reference curves

std::vector<CurvePoint> failure_rate_curve(std::size_t points) {
  std::vector<CurvePoint> out;
  for (std::size_t i = 0; i < points; ++i) {
    const double p = abscissa(i, points, 0.0, 1.0);
    out.push_back({p, failure_rate_bound(p), 0.0});
  }
  return out;
}

std::vector<CurvePoint> correlation_curve(std::size_t points) {
  std::vector<CurvePoint> out;
  for (std::size_t i = 0; i < points; ++i) {
    const double rho = abscissa(i, points, -0.5, 0.5);
    out.push_back({rho, correlation_bound(0.5, rho), 0.0});
  }
  return out;
}

std::vector<CurvePoint> capacity_curve(std::size_t points) {
  std::vector<CurvePoint> out;
  for (std::size_t i = 0; i < points; ++i) {
    const double dF = abscissa(i, points, 0.0, 1.0);
    out.push_back({dF, hetero_lower_bound(dF, 0.25, 0.25), hetero_upper_reference(dF)});
  }
  return out;
}

}  // namespace faultroute
