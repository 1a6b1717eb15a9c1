#include "faultroute/config.hpp"

#include <fstream>
#include <stdexcept>

#include "faultroute/closed_form.hpp"

namespace faultroute {

using nlohmann::json;

ModeDistribution ChainSpec::distribution() const {
  switch (kind) {
    case Kind::kRates: return stationary_distribution(rates);
    case Kind::kFailure: return FailureModel::make(p_fail, rho).distribution();
    case Kind::kProbs: return probs;
  }
  return probs;
}

RateMatrix ChainSpec::rate_matrix() const {
  switch (kind) {
    case Kind::kRates: return rates;
    case Kind::kFailure:
      if (construction == Construction::kIndependent) {
        if (rho != 0.0) throw std::invalid_argument("independent-links construction requires rho = 0");
        // Per-link fail + repair rate fixed at 2.
        return RateMatrix::independent_links(2.0 * p_fail, 2.0 * (1.0 - p_fail));
      }
      return RateMatrix::proportional(distribution());
    case Kind::kProbs: return RateMatrix::proportional(probs);
  }
  return RateMatrix::proportional(probs);
}

namespace {

double number(const json& doc, const char* key) {
  if (!doc.contains(key)) throw std::invalid_argument(std::string("config: missing key \"") + key + "\"");
  if (!doc.at(key).is_number()) throw std::invalid_argument(std::string("config: \"") + key + "\" must be a number");
  return doc.at(key).get<double>();
}

double number_or(const json& doc, const char* key, double fallback) {
  return doc.contains(key) ? number(doc, key) : fallback;
}

const char* construction_name(ChainSpec::Construction c) {
  return c == ChainSpec::Construction::kIndependent ? "independent" : "proportional";
}

ChainSpec parse_chain(const json& doc, std::vector<std::string>& warnings) {
  const bool has_rates = doc.contains("rates");
  const bool has_failure = doc.contains("failure");
  const bool has_probs = doc.contains("probs");
  const int count = int(has_rates) + int(has_failure) + int(has_probs);
  if (count == 0) throw std::invalid_argument("config: one of \"rates\", \"failure\" or \"probs\" is required");
  if (count > 1) warnings.emplace_back("config: several chain specifications given; using rates > failure > probs");

  ChainSpec chain;
  if (has_rates) {
    const json& r = doc.at("rates");
    if (!r.is_array() || r.size() != kNumModes) throw std::invalid_argument("config: \"rates\" must be a 4x4 array");
    RateMatrix::Rows rows{};
    for (std::size_t i = 0; i < kNumModes; ++i) {
      if (!r[i].is_array() || r[i].size() != kNumModes)
        throw std::invalid_argument("config: \"rates\" must be a 4x4 array");
      for (std::size_t j = 0; j < kNumModes; ++j) {
        if (!r[i][j].is_number()) throw std::invalid_argument("config: rates must be numbers");
        rows[i][j] = r[i][j].get<double>();
      }
    }
    chain.kind = ChainSpec::Kind::kRates;
    chain.rates = RateMatrix(rows);
    if (!chain.rates.is_irreducible()) throw std::invalid_argument("config: rate matrix is not irreducible");
  } else if (has_failure) {
    const json& f = doc.at("failure");
    if (!f.is_object()) throw std::invalid_argument("config: \"failure\" must be an object");
    chain.kind = ChainSpec::Kind::kFailure;
    chain.p_fail = number(f, "p");
    chain.rho = number_or(f, "rho", 0.0);
    const std::string construction = f.value("construction", std::string("proportional"));
    if (construction == "independent")
      chain.construction = ChainSpec::Construction::kIndependent;
    else if (construction == "proportional")
      chain.construction = ChainSpec::Construction::kProportional;
    else
      throw std::invalid_argument("config: unknown chain construction \"" + construction + "\"");
    try {
      FailureModel::make(chain.p_fail, chain.rho);
    } catch (const std::domain_error& e) {
      throw std::invalid_argument(std::string("config: ") + e.what());
    }
  } else {
    const json& pr = doc.at("probs");
    if (!pr.is_array() || pr.size() != kNumModes) throw std::invalid_argument("config: \"probs\" must have 4 entries");
    std::array<double, kNumModes> p{};
    for (std::size_t i = 0; i < kNumModes; ++i) {
      if (!pr[i].is_number()) throw std::invalid_argument("config: probs must be numbers");
      p[i] = pr[i].get<double>();
    }
    chain.kind = ChainSpec::Kind::kProbs;
    chain.probs = ModeDistribution::make(p, 1e-9);
  }
  return chain;
}

SimSection parse_sim(const json& s) {
  if (!s.is_object()) throw std::invalid_argument("config: \"sim\" must be an object");
  SimSection out;
  SimConfig& c = out.sim;
  c.horizon = number_or(s, "horizon", c.horizon);
  c.step = number_or(s, "step", c.step);
  if (s.contains("seed")) {
    if (!s.at("seed").is_number_integer() || s.at("seed").get<std::int64_t>() < 0) throw std::invalid_argument("config: \"seed\" must be a nonnegative integer");
    c.seed = s.at("seed").get<std::uint64_t>();
  }
  if (s.contains("x0")) {
    const json& x = s.at("x0");
    if (!x.is_array() || x.size() != 2 || !x[0].is_number() || !x[1].is_number())
      throw std::invalid_argument("config: \"x0\" must be [x1, x2]");
    c.x0 = DensityState{x[0].get<double>(), x[1].get<double>()};
  }
  if (s.contains("s0")) {
    if (!s.at("s0").is_number_integer()) throw std::invalid_argument("config: \"s0\" must be an integer");
    c.s0 = mode_from_number(s.at("s0").get<int>());
  }
  c.sample_interval = number_or(s, "sample_interval", c.sample_interval);
  c.divergence_cap = number_or(s, "divergence_cap", c.divergence_cap);
  if (s.contains("replications")) {
    if (!s.at("replications").is_number_integer() || s.at("replications").get<std::int64_t>() <= 0)
      throw std::invalid_argument("config: \"replications\" must be a positive integer");
    out.replications = s.at("replications").get<std::size_t>();
  }
  out.slope_threshold = number_or(s, "slope_threshold", out.slope_threshold);
  if (s.contains("eta_grid")) {
    const json& g = s.at("eta_grid");
    if (!g.is_array()) throw std::invalid_argument("config: \"eta_grid\" must be an array");
    for (const json& v : g) {
      if (!v.is_number()) throw std::invalid_argument("config: eta_grid entries must be numbers");
      out.eta_grid.push_back(v.get<double>());
    }
  }
  if (!(c.horizon > 0.0)) throw std::invalid_argument("config: horizon must be > 0");
  if (!(c.step > 0.0) || !(c.step <= c.sample_interval))
    throw std::invalid_argument("config: need 0 < step <= sample_interval");
  return out;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config: top level must be an object");
  ExperimentConfig cfg;
  try {
    cfg.params = NetworkParams::make(number(doc, "F1"), number(doc, "F2"), number(doc, "beta"),
                                     number_or(doc, "eta", 0.0));
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    throw std::invalid_argument(what.rfind("config:", 0) == 0 ? what : "config: " + what);
  }
  cfg.chain = parse_chain(doc, cfg.warnings);
  if (doc.contains("analysis")) {
    if (!doc.at("analysis").is_string()) throw std::invalid_argument("config: \"analysis\" must be a string");
    cfg.analysis = doc.at("analysis").get<std::string>();
    if (cfg.analysis != "check" && cfg.analysis != "bounds" && cfg.analysis != "figure" &&
        cfg.analysis != "simulate" && cfg.analysis != "scan")
      throw std::invalid_argument("config: unknown analysis \"" + cfg.analysis + "\"");
  }
  if (doc.contains("output") && !doc.at("output").is_string())
    throw std::invalid_argument("config: \"output\" must be a string");
  if (doc.contains("output")) cfg.output = doc.at("output").get<std::string>();
  if (doc.contains("sim")) cfg.sim = parse_sim(doc.at("sim"));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json doc;
  doc["F1"] = c.params.F1;
  doc["F2"] = c.params.F2;
  doc["beta"] = c.params.beta;
  doc["eta"] = c.params.eta;
  switch (c.chain.kind) {
    case ChainSpec::Kind::kRates: {
      json rows = json::array();
      for (const auto& r : c.chain.rates.rows()) rows.push_back(r);
      doc["rates"] = rows;
      break;
    }
    case ChainSpec::Kind::kFailure:
      doc["failure"] = {{"p", c.chain.p_fail},
                        {"rho", c.chain.rho},
                        {"construction", construction_name(c.chain.construction)}};
      break;
    case ChainSpec::Kind::kProbs: doc["probs"] = c.chain.probs.p; break;
  }
  if (!c.analysis.empty()) doc["analysis"] = c.analysis;
  if (!c.output.empty()) doc["output"] = c.output;
  if (c.sim) {
    const SimConfig& s = c.sim->sim;
    json sim{{"horizon", s.horizon},
             {"step", s.step},
             {"seed", s.seed},
             {"s0", mode_number(s.s0)},
             {"sample_interval", s.sample_interval},
             {"divergence_cap", s.divergence_cap},
             {"replications", c.sim->replications},
             {"slope_threshold", c.sim->slope_threshold},
             {"eta_grid", c.sim->eta_grid}};
    if (s.x0) sim["x0"] = {s.x0->x1, s.x0->x2};
    doc["sim"] = sim;
  }
  return doc;
}

}  // namespace faultroute
