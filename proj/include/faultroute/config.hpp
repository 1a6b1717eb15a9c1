#pragma once

// Experiment configuration as read by the command-line tool.
//
// {
//   "F1": 0.5, "F2": 0.5, "beta": 1.0, "eta": 0.5,
//   "rates":   [[0,1,1,1],[1,0,1,1],[1,1,0,1],[1,1,1,0]],      one of these
//   "failure": {"p": 0.5, "rho": 0.0, "construction": "proportional"},
//   "probs":   [0.25, 0.25, 0.25, 0.25],
//   "analysis": "check", "output": "out",
//   "sim": {"horizon": 1e4, "step": 0.01, "seed": 7, "x0": [0.7, 0.7], "s0": 1,
//           "sample_interval": 1.0, "divergence_cap": 1e3, "replications": 4,
//           "slope_threshold": 1e-4, "eta_grid": [0.1, 0.2]}
// }

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "faultroute/model.hpp"
#include "faultroute/pdmp_sim.hpp"

namespace faultroute {

struct ChainSpec {
  enum class Kind { kRates, kFailure, kProbs };
  enum class Construction { kProportional, kIndependent };

  Kind kind = Kind::kProbs;
  RateMatrix rates;
  double p_fail = 0.0;
  double rho = 0.0;
  Construction construction = Construction::kProportional;
  ModeDistribution probs = ModeDistribution::uniform();

  /// Stationary law used by the analytic commands.
  ModeDistribution distribution() const;
  /// Rates used by the simulator; probabilities become lambda(s, s') = p[s'].
  RateMatrix rate_matrix() const;
};

struct SimSection {
  SimConfig sim;
  std::size_t replications = 4;
  double slope_threshold = 1e-4;
  std::vector<double> eta_grid;
};

struct ExperimentConfig {
  NetworkParams params;
  ChainSpec chain;
  std::string analysis;
  std::optional<SimSection> sim;
  std::string output;  // empty: not set
  std::vector<std::string> warnings;  // not serialized
};

/// Throws std::invalid_argument with a readable message on malformed input.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
/// Canonical form; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace faultroute
