#include "faultroute/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "faultroute/errors.hpp"
#include "faultroute/linalg.hpp"
#include "faultroute/random.hpp"

namespace faultroute {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// e^{-b x} / (1 + e^{-b x}) written so large b x underflows to 0 cleanly.
double worst_case_share(double beta, double x) { return 1.0 / (1.0 + std::exp(beta * x)); }

DensityState as_state(const LinkPair& v) { return {v[0], v[1]}; }

}  // namespace

// ---------------------------------------------------------------------------
// Congestion floor and necessary condition

bool CongestionFloor::finite() const { return std::isfinite(x_lower[0]) && std::isfinite(x_lower[1]); }

double floor_residual(const NetworkParams& params, Link k, double x) {
  return params.eta * worst_case_share(params.beta, x) - flow(params, k, x);
}

double solve_congestion_floor(const NetworkParams& params, Link k) {
  if (params.eta == 0.0) return 0.0;
  if (params.capacity(k) == 0.0) return kInf;

  // The residual is eta/2 > 0 at zero and strictly decreasing, so there is
  // exactly one sign change.
  double lo = 0.0;
  double hi = kFloorCap;
  while (floor_residual(params, k, hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("congestion floor: root bracket exceeded 1e12");
  }
  for (int iter = 0; iter < 4000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (floor_residual(params, k, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return std::abs(floor_residual(params, k, lo)) <= std::abs(floor_residual(params, k, hi)) ? lo : hi;
}

CongestionFloor congestion_floors(const NetworkParams& params) {
  return {{solve_congestion_floor(params, Link::kFirst), solve_congestion_floor(params, Link::kSecond)}};
}

int NecessaryVerdict::first_violation() const {
  for (int i = 0; i < 3; ++i)
    if (!holds[static_cast<std::size_t>(i)]) return i + 1;
  return 0;
}

NecessaryVerdict necessary_condition(const NetworkParams& params, const ModeDistribution& p) {
  const CongestionFloor floors = congestion_floors(params);
  // An infinite floor enters through e^{-beta * inf} = 0.
  const double e1 = std::exp(-params.beta * floors.x_lower[0]);
  const double e2 = std::exp(-params.beta * floors.x_lower[1]);
  const double p2 = p[FaultMode::kLink1Faulty];
  const double p3 = p[FaultMode::kLink2Faulty];
  const double p4 = p[FaultMode::kBothFaulty];

  const double lhs1 = params.eta * (p2 / (e2 + 1.0) + 0.5 * p4);
  const double lhs2 = params.eta * (p3 / (e1 + 1.0) + 0.5 * p4);

  NecessaryVerdict v;
  v.slacks = {params.F1 - lhs1, params.F2 - lhs2, 1.0 - params.eta};
  v.holds = {lhs1 <= params.F1, lhs2 <= params.F2, params.eta < 1.0};
  return v;
}

// ---------------------------------------------------------------------------
// Sufficient condition

double sufficient_value(const NetworkParams& params, const ModeDistribution& p, const LinkPair& theta) {
  const DensityState at = as_state(theta);
  double total = 0.0;
  for (FaultMode s : kAllModes) {
    const LinkPair g = vector_field(params, s, at);
    total += p[s] * std::max(g[0], g[1]);
  }
  return total;
}

namespace {

struct Point {
  LinkPair u{};  // ln z per link
  double value = kInf;
};

double drift_at_log_z(const NetworkParams& params, const ModeDistribution& p, const LinkPair& u) {
  return sufficient_value(params, p, {u[0] >= 0.0 ? 0.0 : -u[0], u[1] >= 0.0 ? 0.0 : -u[1]});
}

// Golden-section line search along one coordinate of u on [lo, hi].
Point golden_line(const NetworkParams& params, const ModeDistribution& p, Point start, std::size_t coord,
                  double lo, double hi, int iterations) {
  constexpr double kInvPhi = 0.6180339887498949;
  Point best = start;
  auto eval = [&](double v) {
    Point q = start;
    q.u[coord] = v;
    q.value = drift_at_log_z(params, p, q.u);
    if (q.value < best.value) best = q;
    return q.value;
  };
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = eval(d);
    }
  }
  return best;
}

}  // namespace

ThetaWitness minimize_drift(const NetworkParams& params, const ModeDistribution& p,
                            const SearchOptions& options) {
  const std::vector<double> axis = kernels::log_uniform_axis(options.grid, options.z_floor);
  const std::size_t n = axis.size();
  std::vector<double> values(n * n);
  kernels::drift_grid(options.execution, params, p, axis, values);
  const std::size_t flat = kernels::argmin_first(values);

  Point best;
  best.u = {std::log(axis[flat / n]), std::log(axis[flat % n])};
  best.value = values[flat];

  const double u_min = std::log(options.z_floor);
  const double spacing = -u_min / static_cast<double>(n - 1);
  double half_width = 2.0 * spacing;
  for (int sweep = 0; sweep < options.sweeps; ++sweep, half_width *= 0.5) {
    for (std::size_t coord = 0; coord < 2; ++coord) {
      const double lo = std::max(u_min, best.u[coord] - half_width);
      const double hi = std::min(0.0, best.u[coord] + half_width);
      if (hi <= lo) continue;
      best = golden_line(params, p, best, coord, lo, hi, options.golden_iterations);
    }
  }

  return ThetaWitness{{best.u[0] >= 0.0 ? 0.0 : -best.u[0], best.u[1] >= 0.0 ? 0.0 : -best.u[1]}, best.value};
}

std::optional<ThetaWitness> sufficient_search(const NetworkParams& params, const ModeDistribution& p,
                                              const SearchOptions& options) {
  ThetaWitness best = minimize_drift(params, p, options);
  if (!(best.drift_value < -options.strict_margin)) return std::nullopt;
  return best;
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::kCertifiedStable: return "certified-stable";
    case Classification::kCertifiedUnstable: return "certified-unstable";
    case Classification::kIndeterminate: return "indeterminate";
  }
  return "indeterminate";
}

StabilityVerdict check_stability(const NetworkParams& params, const ModeDistribution& p,
                                 const SearchOptions& options) {
  validate(params);
  StabilityVerdict verdict;
  verdict.necessary = necessary_condition(params, p);
  verdict.best = minimize_drift(params, p, options);
  if (verdict.best.drift_value < -options.strict_margin) verdict.witness = verdict.best;
  const bool stable = verdict.witness.has_value();
  const bool unstable = !verdict.necessary.all();
  if (stable && !unstable)
    verdict.classification = Classification::kCertifiedStable;
  else if (unstable && !stable)
    verdict.classification = Classification::kCertifiedUnstable;
  else
    verdict.classification = Classification::kIndeterminate;
  return verdict;
}

// ---------------------------------------------------------------------------
// Throughput bounds

namespace {

// Probes `holds` on an even grid over [0, 1] and returns the bracket
// [last eta where it holds, first eta where it fails]. The predicate must hold
// at 0, fail at 1 and flip exactly once.
template <typename Pred>
std::pair<double, double> probe_bracket(Pred&& holds, std::size_t points, const char* name) {
  points = std::max<std::size_t>(points, 2);
  std::vector<bool> results(points);
  std::vector<double> etas(points);
  for (std::size_t i = 0; i < points; ++i) {
    etas[i] = static_cast<double>(i) / static_cast<double>(points - 1);
    results[i] = holds(etas[i]);
  }
  if (!results.front())
    throw MonotonicityError(std::string(name) + ": predicate fails at eta = 0", 0.0, 0.0);
  std::size_t first_false = points;
  for (std::size_t i = 0; i < points; ++i) {
    if (!results[i] && first_false == points) first_false = i;
    if (results[i] && first_false != points)
      throw MonotonicityError(std::string(name) + ": predicate is not monotone in eta", etas[i],
                              etas[first_false]);
  }
  if (first_false == points)
    throw MonotonicityError(std::string(name) + ": predicate still holds at eta = 1", 1.0, 1.0);
  return {etas[first_false - 1], etas[first_false]};
}

}  // namespace

double necessary_upper_bound(const NetworkParams& params, const ModeDistribution& p, const BoundsOptions& options) {
  const NetworkParams base = params.with_eta(0.0);
  auto holds = [&](double eta) { return necessary_condition(base.with_eta(eta), p).all(); };
  auto [lo, hi] = probe_bracket(holds, options.probe_points, "necessary condition");
  while (hi - lo > options.tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid))
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

ThroughputBounds throughput_bounds(const NetworkParams& params, const ModeDistribution& p,
                                   const BoundsOptions& options) {
  const NetworkParams base = params.with_eta(0.0);
  ThroughputBounds bounds;

  std::optional<ThetaWitness> witness_at_lo;
  auto stable = [&](double eta) {
    return sufficient_search(base.with_eta(eta), p, options.search).has_value();
  };
  auto [lo, hi] = probe_bracket(stable, options.probe_points, "sufficient condition");
  witness_at_lo = sufficient_search(base.with_eta(lo), p, options.search);
  while (hi - lo > options.tolerance) {
    const double mid = 0.5 * (lo + hi);
    auto w = sufficient_search(base.with_eta(mid), p, options.search);
    if (w) {
      lo = mid;
      witness_at_lo = w;
    } else {
      hi = mid;
    }
  }
  bounds.lower = lo;
  bounds.lower_witness = witness_at_lo;

  bounds.upper = necessary_upper_bound(params, p, options);
  bounds.upper_violation = necessary_condition(base.with_eta(bounds.upper), p).first_violation();
  return bounds;
}

// ---------------------------------------------------------------------------
// Lyapunov certificate

namespace {

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

// D_k(s, x): drift of (x_k - theta_k)_+.
LinkPair derived_drift(const NetworkParams& params, const LinkPair& theta, FaultMode s, const DensityState& x) {
  const LinkPair g = vector_field(params, s, x);
  const LinkPair xs{x.x1, x.x2};
  LinkPair out{};
  for (std::size_t k = 0; k < 2; ++k) {
    if (xs[k] > theta[k])
      out[k] = g[k];
    else if (xs[k] == theta[k])
      out[k] = positive_part(g[k]);
    else
      out[k] = 0.0;
  }
  return out;
}

double excess(const LinkPair& theta, const DensityState& x) {
  return positive_part(x.x1 - theta[0]) + positive_part(x.x2 - theta[1]);
}

std::vector<double> certificate_axis(double theta, double range) {
  std::vector<double> axis;
  constexpr int kCoarse = 400;
  for (int i = 0; i <= kCoarse; ++i) axis.push_back(range * i / kCoarse);
  constexpr int kFine = 200;
  const double lo = std::max(0.0, theta - 3.0);
  const double hi = theta + 3.0;
  for (int i = 0; i <= kFine; ++i) axis.push_back(lo + (hi - lo) * i / kFine);
  axis.push_back(theta);
  axis.push_back(theta + 1e-9);
  if (theta > 1e-9) axis.push_back(theta - 1e-9);
  std::sort(axis.begin(), axis.end());
  axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
  return axis;
}

}  // namespace

double lyapunov_value(const LyapunovCertificate& cert, FaultMode s, const DensityState& x) {
  const double w = excess(cert.theta, x);
  return 0.5 * w * w + cert.a[mode_index(s)] * w;
}

double lyapunov_generator(const NetworkParams& params, const RateMatrix& rates, const LyapunovCertificate& cert,
                          FaultMode s, const DensityState& x) {
  const double w = excess(cert.theta, x);
  const LinkPair D = derived_drift(params, cert.theta, s, x);
  const double a_s = cert.a[mode_index(s)];
  double jump = 0.0;
  for (FaultMode t : kAllModes) jump += rates(s, t) * (cert.a[mode_index(t)] - a_s);
  return (w + a_s) * (D[0] + D[1]) + w * jump;
}

LyapunovCertificate lyapunov_certificate(const NetworkParams& params, const ModeDistribution& p,
                                         const RateMatrix& rates, const ThetaWitness& witness) {
  if (witness.theta[0] < 0.0 || witness.theta[1] < 0.0)
    throw std::invalid_argument("lyapunov_certificate: theta must be >= 0");
  if (!rates.is_irreducible()) throw ErgodicityError("lyapunov_certificate: mode chain is not irreducible");

  LyapunovCertificate cert;
  cert.theta = witness.theta;
  const DensityState at = as_state(witness.theta);
  for (FaultMode s : kAllModes) {
    const LinkPair g = vector_field(params, s, at);
    cert.D[mode_index(s)] = std::max(g[0], g[1]);
  }
  for (FaultMode s : kAllModes) cert.mean_drift += p[s] * cert.D[mode_index(s)];

  // Rows 1..3: generator rows; row 4 pins a_1 = 1.
  linalg::Matrix<4> m{};
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t t = 0; t < kNumModes; ++t) m[s][t] = rates.rows()[s][t];
    m[s][s] = -rates.exit_rate(kAllModes[s]);
  }
  m[3] = {1.0, 0.0, 0.0, 0.0};
  const linalg::Vector<4> rhs{cert.mean_drift - cert.D[0], cert.mean_drift - cert.D[1],
                              cert.mean_drift - cert.D[2], 1.0};
  cert.a = linalg::solve(m, rhs);
  cert.system_residual = linalg::residual(m, cert.a, rhs);

  cert.c = -0.25 * cert.mean_drift;
  if (!(cert.c > 0.0)) throw CertificateError("lyapunov_certificate: drift at theta is not negative (c <= 0)");

  // Offset d: the larger of the structural bound d1 + 4c|theta| and the
  // sampled maximum of LV + c|x|, plus a 10% margin and the largest jump
  // between neighbouring samples.
  const double theta_max = std::max(witness.theta[0], witness.theta[1]);
  const double range = std::max(10.0, 2.0 * theta_max + 20.0);
  const std::vector<double> ax1 = certificate_axis(witness.theta[0], range);
  const std::vector<double> ax2 = certificate_axis(witness.theta[1], range);
  const std::ptrdiff_t n1 = static_cast<std::ptrdiff_t>(ax1.size());
  const std::size_t n2 = ax2.size();

  double d1 = -kInf;
  double sampled = -kInf;
  double jump = 0.0;
#pragma omp parallel for schedule(static) reduction(max : d1, sampled, jump)
  for (std::ptrdiff_t i = 0; i < n1; ++i) {
    for (FaultMode s : kAllModes) {
      double previous = 0.0;
      for (std::size_t j = 0; j < n2; ++j) {
        const DensityState x{ax1[static_cast<std::size_t>(i)], ax2[j]};
        const LinkPair D = derived_drift(params, cert.theta, s, x);
        d1 = std::max(d1, cert.a[mode_index(s)] * (D[0] + D[1]));
        const double v = lyapunov_generator(params, rates, cert, s, x) + cert.c * x.norm1();
        sampled = std::max(sampled, v);
        if (j > 0) jump = std::max(jump, std::abs(v - previous));
        if (i > 0) {
          const DensityState left{ax1[static_cast<std::size_t>(i - 1)], ax2[j]};
          const double u = lyapunov_generator(params, rates, cert, s, left) + cert.c * left.norm1();
          jump = std::max(jump, std::abs(v - u));
        }
        previous = v;
      }
    }
  }
  const double structural = d1 + 4.0 * cert.c * (witness.theta[0] + witness.theta[1]);
  const double top = std::max(structural, sampled);
  cert.d = top + 0.1 * std::abs(top) + jump;
  return cert;
}

// ---------------------------------------------------------------------------
// Invariant set

std::optional<InvariantSetSample> invariant_set_violation(const NetworkParams& params,
                                                          const CongestionFloor& floors, FaultMode s,
                                                          const DensityState& x) {
  const LinkPair g = vector_field(params, s, x);
  const LinkPair xs{x.x1, x.x2};
  for (std::size_t k = 0; k < 2; ++k) {
    if (xs[k] < floors.x_lower[k] && !(g[k] > 0.0)) return InvariantSetSample{s, x, g};
  }
  return std::nullopt;
}

InvariantSetReport invariant_set_check(const NetworkParams& params, const CongestionFloor& floors,
                                       std::size_t samples, std::uint64_t seed, Execution execution) {
  if (!floors.finite()) throw std::invalid_argument("invariant_set_check: floors must be finite");
  InvariantSetReport report;
  if (floors.x_lower[0] <= 0.0 && floors.x_lower[1] <= 0.0) return report;  // M is the whole quadrant

  // Box around the corner of M; rejection keeps only points outside M.
  const double span = 2.0 * std::max(floors.x_lower[0], floors.x_lower[1]) + 1.0;
  Rng rng(seed);
  std::vector<InvariantSetSample> draws;
  draws.reserve(samples);
  while (draws.size() < samples) {
    const DensityState x{span * rng.uniform(), span * rng.uniform()};
    const auto s = kAllModes[static_cast<std::size_t>(rng.uniform() * kNumModes) % kNumModes];
    if (x.x1 >= floors.x_lower[0] && x.x2 >= floors.x_lower[1]) continue;
    draws.push_back({s, x, {}});
  }

  std::vector<char> bad(draws.size(), 0);
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(draws.size());
  if (execution == Execution::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      auto& d = draws[static_cast<std::size_t>(i)];
      if (auto v = invariant_set_violation(params, floors, d.mode, d.x)) {
        d.field = v->field;
        bad[static_cast<std::size_t>(i)] = 1;
      }
    }
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      auto& d = draws[static_cast<std::size_t>(i)];
      if (auto v = invariant_set_violation(params, floors, d.mode, d.x)) {
        d.field = v->field;
        bad[static_cast<std::size_t>(i)] = 1;
      }
    }
  }
  report.checked = draws.size();
  for (std::size_t i = 0; i < draws.size(); ++i)
    if (bad[i]) report.counterexamples.push_back(draws[i]);
  return report;
}

}  // namespace faultroute
