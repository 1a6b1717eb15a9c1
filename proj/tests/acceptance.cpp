// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run all criteria
//   acceptance --only N   run criterion N

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "faultroute/closed_form.hpp"
#include "faultroute/errors.hpp"
#include "faultroute/pdmp_sim.hpp"
#include "faultroute/stability.hpp"

using namespace faultroute;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) detail << "; ";
      ok = false;
      detail << what;
    }
  }
};

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<void(Outcome&)> body;
};

NetworkParams capacities(double dF, double eta = 0.0) {
  return NetworkParams::make(0.5 * (1.0 + dF), 0.5 * (1.0 - dF), 1.0, eta);
}

void closed_form_homogeneous(Outcome& out) {
  out.require(homogeneous_lower_bound(0.25, 0.25) == 2.0 / 3.0, "homogeneous_lower_bound(1/4, 1/4) != 2/3");
  double worst_rate = 0.0, worst_corr = 0.0;
  const auto rate = failure_rate_curve(101);
  for (std::size_t i = 0; i < rate.size(); ++i) {
    const double p = i / 100.0;
    worst_rate = std::max(worst_rate, std::abs(rate[i].x - p));
    worst_rate = std::max(worst_rate, std::abs(rate[i].lower - 1.0 / (1.0 + 2.0 * p * (1.0 - p))));
  }
  const auto corr = correlation_curve(101);
  for (std::size_t i = 0; i < corr.size(); ++i) {
    const double rho = -0.5 + i / 100.0;
    worst_corr = std::max(worst_corr, std::abs(corr[i].x - rho));
    worst_corr = std::max(worst_corr, std::abs(corr[i].lower - 1.0 / (1.5 - rho)));
  }
  out.require(rate.size() == 101 && corr.size() == 101, "curves must have 101 points");
  out.require(worst_rate <= 1e-12, "failure-rate curve error " + std::to_string(worst_rate));
  out.require(worst_corr <= 1e-12, "correlation curve error " + std::to_string(worst_corr));
  out.detail << (out.ok ? "" : "; ") << "max errors " << worst_rate << ", " << worst_corr;
}

void closed_form_hetero(Outcome& out) {
  double worst_fig = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double dF = i / 100.0;
    const double expected = std::min(4.0 / 3.0 * (1.0 - dF), 2.0 / 3.0 * (1.0 - 0.25 * dF));
    worst_fig = std::max(worst_fig, std::abs(hetero_lower_bound(dF, 0.25, 0.25) - expected));
  }
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_forms = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double dF = u(rng), p1 = u(rng), p2 = 0.5 * (1.0 - p1) * u(rng);
    worst_forms = std::max(worst_forms, std::abs(hetero_lower_bound(dF, p1, p2) - hetero_lower_bound_piecewise(dF, p1, p2)));
  }
  out.require(worst_fig <= 1e-12, "figure expression error " + std::to_string(worst_fig));
  out.require(worst_forms <= 1e-14, "min vs piecewise error " + std::to_string(worst_forms));
  out.detail << (out.ok ? "" : "; ") << "max errors " << worst_fig << ", " << worst_forms;
}

void congestion_floor(Outcome& out) {
  const NetworkParams q = NetworkParams::make(0.5, 0.5, 1.0, 0.8);
  const auto t0 = std::chrono::steady_clock::now();
  const double x = solve_congestion_floor(q, Link::kFirst);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double res = std::abs(floor_residual(q, Link::kFirst, x));
  out.require(std::abs(x - 0.732668) <= 1e-5, "floor " + std::to_string(x));
  out.require(res < 1e-10, "residual " + std::to_string(res));
  out.require(elapsed < 1e-3, "solve took " + std::to_string(elapsed) + " s");
  char buf[128];
  std::snprintf(buf, sizeof buf, "%sfloor %.8f, residual %.1e, solve %.1f us", out.ok ? "" : "; ", x, res, elapsed * 1e6);
  out.detail << buf;
}

void oracle_agreement(Outcome& out) {
  char buf[160];
  auto check = [&](const char* label, double arg, const NetworkParams& q, const ModeDistribution& p, double closed) {
    const ThroughputBounds b = throughput_bounds(q, p);
    std::snprintf(buf, sizeof buf, "%s=%g lower %.5f (closed form %.5f) upper %.5f", label, arg, b.lower, closed,
                  b.upper);
    if (b.lower < closed - 5e-3 || b.upper > 1.0 || b.upper < b.lower) out.require(false, buf);
  };
  for (double p : {0.1, 0.25, 0.5})
    check("p", p, capacities(0.0), FailureModel::make(p, 0.0).distribution(), failure_rate_bound(p));
  for (double dF : {0.0, 0.25, 0.5, 0.75})
    check("dF", dF, capacities(dF), ModeDistribution::uniform(), hetero_lower_bound(dF, 0.25, 0.25));
  if (out.ok) out.detail << "7 settings within 5e-3 of the closed form, 0 <= lower <= upper <= 1";
}

void g_monotonicity(Outcome& out) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int failures = 0;
  double worst = 1e300;
  GPolynomial worst_gp;
  for (int i = 0; i < 1000; ++i) {
    const GPolynomial gp{5.0 * (1.0 - u(rng)), u(rng), u(rng)};  // beta in (0, 5]
    const MonotonicityReport r = g_monotonicity_check(gp);
    if (!r.passed) ++failures;
    if (r.min_dg < worst) {
      worst = r.min_dg;
      worst_gp = gp;
    }
  }
  out.require(failures == 0, std::to_string(failures) + "/1000 triples with min g' <= 0");
  char buf[160];
  std::snprintf(buf, sizeof buf, "; worst min g' %.3g at beta %.3f, q %.3f, eta %.3f", worst, worst_gp.beta,
                worst_gp.q, worst_gp.eta);
  out.detail << (out.ok ? "all 1000 triples have min g' > 0" : buf);
}

void hetero_witness_sweep(Outcome& out) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int verified = 0, inconsistent = 0, fallbacks = 0;
  for (int i = 0; i < 100; ++i) {
    const double dF = u(rng), p1 = u(rng), p2 = 0.5 * (1.0 - p1) * u(rng);
    const ModeDistribution p = ModeDistribution::make({p1, p2, p2, 1.0 - p1 - 2.0 * p2}, 1e-12);
    const NetworkParams q = NetworkParams::make(0.5 * (1.0 + dF), 0.5 * (1.0 - dF), 0.2 + 4.8 * u(rng), 0.0);
    const double eta = std::min(hetero_lower_bound(dF, p1, p2), 1.0) * u(rng) * 0.999;
    try {
      const HeteroWitness w = hetero_witness(q, p, eta);
      if (w.route == WitnessRoute::kSearchFallback) ++fallbacks;
      if (sufficient_value(q.with_eta(eta), p, w.witness.theta) <= 0.0) ++verified;
    } catch (const InconsistencyError&) {
      ++inconsistent;
    }
  }
  out.require(verified == 100, std::to_string(100 - verified) + " settings without a verified witness");
  out.require(inconsistent == 0, std::to_string(inconsistent) + " inconsistency reports");
  out.detail << (out.ok ? "" : "; ") << verified << "/100 verified, " << fallbacks << " via numeric fallback";
}

void simulator_statistics(Outcome& out) {
  SimConfig cfg;
  cfg.horizon = 1e4;
  cfg.seed = 1;
  const Trajectory traj = simulate(NetworkParams::make(0.5, 0.5, 1.0, 0.5), RateMatrix::uniform(1.0), cfg);
  constexpr std::size_t kBatches = 100;
  const double width = traj.end_time / kBatches;
  std::vector<std::array<double, 4>> occ;
  for (std::size_t b = 0; b < kBatches; ++b)
    occ.push_back(occupancy_in_window(traj, cfg.s0, b * width, (b + 1) * width));
  double worst_z = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    double m = 0.0, v = 0.0;
    for (const auto& o : occ) m += o[k];
    m /= kBatches;
    for (const auto& o : occ) v += (o[k] - m) * (o[k] - m);
    const double se = std::sqrt(v / (kBatches - 1) / kBatches);
    worst_z = std::max(worst_z, std::abs(traj.mode_occupancy[k] - 0.25) / se);
  }
  out.require(worst_z <= 3.0, "occupancy deviates by " + std::to_string(worst_z) + " standard errors");

  const NetworkParams q = NetworkParams::make(0.6, 0.4, 1.5, 0.9);
  auto end_state = [&](double h) {
    SimConfig c;
    c.horizon = 4.0;
    c.step = h;
    c.sample_interval = 4.0;
    c.x0 = DensityState{0.05, 3.0};
    c.s0 = FaultMode::kLink2Faulty;
    return simulate(q, RateMatrix(RateMatrix::Rows{}), c).samples.back();
  };
  const double h = 0.4;
  const auto ref = end_state(h / 16.0), a = end_state(h), b = end_state(h / 2.0);
  const double ratio = std::hypot(a.x1 - ref.x1, a.x2 - ref.x2) / std::hypot(b.x1 - ref.x1, b.x2 - ref.x2);
  out.require(ratio >= 12.0 && ratio <= 20.0, "RK4 error ratio " + std::to_string(ratio));
  char buf[128];
  std::snprintf(buf, sizeof buf, "%smax occupancy z-score %.2f, RK4 error ratio %.2f", out.ok ? "" : "; ", worst_z,
                ratio);
  out.detail << buf;
}

void empirical_consistency(Outcome& out) {
  const RateMatrix rates = RateMatrix::uniform(1.0);
  const ModeDistribution uni = ModeDistribution::uniform();
  SimConfig cfg;
  cfg.seed = 7;
  const ProbeResult low = stability_probe(capacities(0.0, 0.5), rates, cfg);
  out.require(low.verdict == EmpiricalVerdict::kStable, std::string("eta 0.5: ") + to_string(low.verdict));
  const ProbeResult high = stability_probe(capacities(0.0, 1.05), rates, cfg);
  out.require(high.verdict == EmpiricalVerdict::kUnstable, std::string("eta 1.05: ") + to_string(high.verdict));
  out.require(std::abs(high.median_growth_slope - 0.05) <= 0.02,
              "growth slope " + std::to_string(high.median_growth_slope));

  int certified = 0;
  for (int i = 1; i <= 6; ++i) {
    const double eta = 0.1 * i;
    if (check_stability(capacities(0.0, eta), uni).classification != Classification::kCertifiedStable) continue;
    ++certified;
    const ProbeResult r = stability_probe(capacities(0.0, eta), rates, cfg);
    if (r.verdict == EmpiricalVerdict::kUnstable) out.require(false, "unstable at certified eta " + std::to_string(eta));
  }
  out.require(certified == 6, "only " + std::to_string(certified) + "/6 test demands certified");
  char buf[160];
  std::snprintf(buf, sizeof buf, "%sgrowth slope at 1.05: %.4f; %d certified demands, none empirically unstable",
                out.ok ? "" : "; ", high.median_growth_slope, certified);
  out.detail << buf;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "homogeneous closed-form bound", 1.0, closed_form_homogeneous},
      {2, "heterogeneous closed-form bound", 1.0, closed_form_hetero},
      {3, "congestion floor", 1e-3, congestion_floor},
      {4, "certificate vs closed-form oracle", 60.0, oracle_agreement},
      {5, "monotonicity of g", 10.0, g_monotonicity},
      {6, "heterogeneous witness", 30.0, hetero_witness_sweep},
      {7, "simulator statistics", 30.0, simulator_statistics},
      {8, "empirical vs certified stability", 120.0, empirical_consistency},
  };

  int failed = 0, ran = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // criterion 3 times the solve itself; the others time the whole check
    if (c.id != 3 && elapsed > c.limit_seconds) out.require(false, "runtime limit exceeded");
    std::printf("criterion %d [%s]: %s (%.3f s, limit %g s) %s\n", c.id, c.name, out.ok ? "PASS" : "FAIL", elapsed,
                c.limit_seconds, out.detail.str().c_str());
    if (!out.ok) ++failed;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
