#include "faultroute/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "faultroute/random.hpp"

namespace faultroute {

using nlohmann::json;

int exit_code(Classification c) {
  switch (c) {
    case Classification::kCertifiedStable: return 0;
    case Classification::kCertifiedUnstable: return 2;
    case Classification::kIndeterminate: return 3;
  }
  return 3;
}

namespace {

// JSON has no infinity; unbounded values become null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json theta_json(const LinkPair& theta) { return json::array({number_or_null(theta[0]), number_or_null(theta[1])}); }

}  // namespace

json verdict_json(const StabilityVerdict& v, const std::optional<ThroughputBounds>& bounds) {
  json out;
  out["necessary"] = {{"holds", v.necessary.all()},
                      {"slacks", v.necessary.slacks},
                      {"violated", v.necessary.first_violation() == 0
                                       ? json(nullptr)
                                       : json("necessary" + std::to_string(v.necessary.first_violation()))}};
  out["sufficient"] = {{"holds", v.sufficient_holds()},
                       {"theta", theta_json(v.best.theta)},
                       {"drift", v.best.drift_value}};
  out["classification"] = to_string(v.classification);
  if (bounds)
    out["bounds"] = {{"lower", bounds->lower}, {"upper", bounds->upper}};
  else
    out["bounds"] = nullptr;
  return out;
}

json bounds_json(const ThroughputBounds& b) {
  json out{{"lower", b.lower}, {"upper", b.upper}};
  if (b.lower_witness)
    out["lower_witness"] = {{"theta", theta_json(b.lower_witness->theta)}, {"drift", b.lower_witness->drift_value}};
  else
    out["lower_witness"] = nullptr;
  out["upper_violation"] = b.upper_violation == 0 ? json(nullptr) : json("necessary" + std::to_string(b.upper_violation));
  return out;
}

json probe_json(const ProbeResult& probe) {
  json reps = json::array();
  for (const auto& r : probe.replications)
    reps.push_back({{"seed", r.seed},
                    {"diverged", r.diverged},
                    {"avg_abs_x", r.avg_abs_x},
                    {"avg_slope", r.avg_slope},
                    {"growth_slope", r.growth_slope}});
  return {{"verdict", to_string(probe.verdict)},
          {"diverged_count", probe.diverged_count},
          {"median_avg_slope", probe.median_avg_slope},
          {"median_growth_slope", probe.median_growth_slope},
          {"replications", reps}};
}

json scan_json(const ScanResult& scan) {
  json rows = json::array();
  for (const auto& row : scan.rows) {
    json r = probe_json(row.probe);
    r["eta"] = row.eta;
    rows.push_back(r);
  }
  return {{"rows", rows},
          {"largest_stable", scan.largest_stable ? json(*scan.largest_stable) : json(nullptr)},
          {"smallest_unstable", scan.smallest_unstable ? json(*scan.smallest_unstable) : json(nullptr)}};
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,mode,x1,x2,avg_abs_x\n";
  for (const auto& s : traj.samples) {
    out += fmt6(s.t) + ',' + std::to_string(mode_number(s.mode)) + ',' + fmt6(s.x1) + ',' + fmt6(s.x2) + ',' +
           fmt6(s.avg_abs_x) + '\n';
  }
  return out;
}

std::string curve_csv(const std::vector<CurvePoint>& curve, const std::string& x_name, bool with_upper) {
  std::string out = x_name + ",lower_bound" + (with_upper ? ",upper_bound\n" : "\n");
  for (const auto& pt : curve) {
    out += fmt6(pt.x) + ',' + fmt6(pt.lower);
    if (with_upper) out += ',' + fmt6(pt.upper);
    out += '\n';
  }
  return out;
}

std::string numeric_upper_csv(const std::vector<double>& dF, const std::vector<double>& upper) {
  if (dF.size() != upper.size()) throw std::invalid_argument("numeric_upper_csv: size mismatch");
  std::string out = "dF,upper_bound\n";
  for (std::size_t i = 0; i < dF.size(); ++i) out += fmt6(dF[i]) + ',' + fmt6(upper[i]) + '\n';
  return out;
}

std::string scan_csv(const ScanResult& scan) {
  std::string out = "eta,verdict,diverged,median_avg_slope,median_growth_slope\n";
  for (const auto& row : scan.rows) {
    out += fmt6(row.eta) + ',' + to_string(row.probe.verdict) + ',' + std::to_string(row.probe.diverged_count) + ',' +
           fmt6(row.probe.median_avg_slope) + ',' + fmt6(row.probe.median_growth_slope) + '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

json metadata_json(const std::string& command, const json& config_echo, const std::vector<std::uint64_t>& seeds,
                   double wall_seconds) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return {{"tool", "faultroute"},
          {"version", kToolVersion},
          {"command", command},
          {"config", config_echo},
          {"seeds", seeds},
          {"generator", Rng::kGeneratorName},
          {"timestamp", stamp},
          {"wall_seconds", wall_seconds}};
}

}  // namespace faultroute
