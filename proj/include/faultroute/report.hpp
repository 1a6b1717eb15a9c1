#pragma once

// Serialization of verdicts, bounds and trajectories. Data files (CSV and
// result JSON) are deterministic; timestamps only go into metadata.json.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "faultroute/closed_form.hpp"
#include "faultroute/config.hpp"
#include "faultroute/pdmp_sim.hpp"
#include "faultroute/stability.hpp"

namespace faultroute {

inline constexpr const char* kToolVersion = "1.0.0";

/// Exit status for a classification: 0 stable, 2 unstable, 3 indeterminate.
int exit_code(Classification c);

nlohmann::json verdict_json(const StabilityVerdict& verdict, const std::optional<ThroughputBounds>& bounds = {});
nlohmann::json bounds_json(const ThroughputBounds& bounds);
nlohmann::json probe_json(const ProbeResult& probe);
nlohmann::json scan_json(const ScanResult& scan);

/// Formats with 6 significant digits.
std::string fmt6(double v);

/// Header "t,mode,x1,x2,avg_abs_x".
std::string trajectory_csv(const Trajectory& traj);
/// Header "<x_name>,lower_bound" or "<x_name>,lower_bound,upper_bound".
std::string curve_csv(const std::vector<CurvePoint>& curve, const std::string& x_name, bool with_upper);
/// Header "dF,upper_bound": necessary-condition upper bound by bisection.
std::string numeric_upper_csv(const std::vector<double>& dF, const std::vector<double>& upper);
/// One row per demand level: eta,verdict,diverged,median_avg_slope,median_growth_slope.
std::string scan_csv(const ScanResult& scan);

/// Writes text to dir / name, creating dir when needed. Throws
/// std::runtime_error when the file cannot be written.
void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text);

/// Run metadata; the only output carrying wall-clock information.
nlohmann::json metadata_json(const std::string& command, const nlohmann::json& config_echo,
                             const std::vector<std::uint64_t>& seeds, double wall_seconds);

}  // namespace faultroute
