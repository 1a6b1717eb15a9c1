#include "faultroute/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "faultroute/errors.hpp"
#include "faultroute/linalg.hpp"

namespace faultroute {

FaultMode mode_from_number(int s) {
  if (s < 1 || s > 4) throw std::invalid_argument("fault mode must be in 1..4, got " + std::to_string(s));
  return static_cast<FaultMode>(s);
}

void validate(const NetworkParams& params) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(params.F1) || !finite(params.F2) || !finite(params.beta) || !finite(params.eta))
    throw std::invalid_argument("network parameters must be finite");
  if (params.F1 < 0.0 || params.F2 < 0.0) throw std::invalid_argument("link capacities must be >= 0");
  if (std::abs(params.F1 + params.F2 - 1.0) > kCapacitySumTolerance)
    throw std::invalid_argument("link capacities must satisfy F1 + F2 = 1");
  if (!(params.beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  if (params.eta < 0.0) throw std::invalid_argument("demand eta must be >= 0");
}

NetworkParams NetworkParams::make(double F1, double F2, double beta, double eta) {
  NetworkParams params{F1, F2, beta, eta};
  validate(params);
  return params;
}

NetworkParams NetworkParams::with_eta(double demand) const {
  NetworkParams copy = *this;
  copy.eta = demand;
  validate(copy);
  return copy;
}

ModeDistribution ModeDistribution::make(const std::array<double, kNumModes>& probs, double tolerance) {
  double sum = 0.0;
  for (double v : probs) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("mode probabilities must be finite and >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tolerance) throw std::invalid_argument("mode probabilities must sum to 1");
  return ModeDistribution{probs};
}

ModeDistribution ModeDistribution::uniform() { return ModeDistribution{{0.25, 0.25, 0.25, 0.25}}; }

RateMatrix::RateMatrix(const Rows& rows) : rows_(rows) {
  for (std::size_t i = 0; i < kNumModes; ++i) {
    for (std::size_t j = 0; j < kNumModes; ++j) {
      const double v = rows_[i][j];
      if (i == j) {
        if (v != 0.0) throw std::invalid_argument("rate matrix diagonal must be zero");
      } else if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("transition rates must be finite and >= 0");
      }
    }
  }
}

double RateMatrix::exit_rate(FaultMode s) const {
  double total = 0.0;
  for (double v : rows_[mode_index(s)]) total += v;
  return total;
}

bool RateMatrix::is_irreducible() const {
  for (std::size_t start = 0; start < kNumModes; ++start) {
    std::array<bool, kNumModes> seen{};
    std::array<std::size_t, kNumModes> stack{};
    std::size_t top = 0;
    stack[top++] = start;
    seen[start] = true;
    while (top > 0) {
      const std::size_t s = stack[--top];
      for (std::size_t t = 0; t < kNumModes; ++t) {
        if (!seen[t] && rows_[s][t] > 0.0) {
          seen[t] = true;
          stack[top++] = t;
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) return false;
  }
  return true;
}

RateMatrix RateMatrix::uniform(double rate) {
  Rows rows{};
  for (std::size_t i = 0; i < kNumModes; ++i)
    for (std::size_t j = 0; j < kNumModes; ++j) rows[i][j] = i == j ? 0.0 : rate;
  return RateMatrix(rows);
}

RateMatrix RateMatrix::proportional(const ModeDistribution& target, double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be > 0");
  Rows rows{};
  for (std::size_t i = 0; i < kNumModes; ++i)
    for (std::size_t j = 0; j < kNumModes; ++j) rows[i][j] = i == j ? 0.0 : kappa * target.p[j];
  return RateMatrix(rows);
}

RateMatrix RateMatrix::independent_links(double fail_rate, double repair_rate) {
  if (fail_rate < 0.0 || repair_rate < 0.0) throw std::invalid_argument("link rates must be >= 0");
  const double a = fail_rate;
  const double g = repair_rate;
  // Mode bits: link 1 faulty in {2, 4}, link 2 faulty in {3, 4}.
  return RateMatrix(Rows{{
      {0.0, a, a, 0.0},
      {g, 0.0, 0.0, a},
      {g, 0.0, 0.0, a},
      {0.0, g, g, 0.0},
  }});
}

double flow(const NetworkParams& params, Link k, double density) {
  if (!(density >= 0.0)) throw std::domain_error("flow: density must be >= 0");
  return params.capacity(k) * -std::expm1(-density);
}

DensityState fault_map(FaultMode s, const DensityState& x) {
  switch (s) {
    case FaultMode::kNone: return x;
    case FaultMode::kLink1Faulty: return {0.0, x.x2};
    case FaultMode::kLink2Faulty: return {x.x1, 0.0};
    case FaultMode::kBothFaulty: return {0.0, 0.0};
  }
  return x;
}

LinkPair routing_fraction(const NetworkParams& params, FaultMode s, const DensityState& x) {
  const DensityState observed = fault_map(s, x);
  const double a = -params.beta * observed.x1;
  const double b = -params.beta * observed.x2;
  const double top = std::max(a, b);
  const double e1 = std::exp(a - top);
  const double e2 = std::exp(b - top);
  const double mu1 = e1 / (e1 + e2);
  return {mu1, 1.0 - mu1};
}

LinkPair vector_field(const NetworkParams& params, FaultMode s, const DensityState& x) {
  const LinkPair mu = routing_fraction(params, s, x);
  return {params.eta * mu[0] - flow(params, Link::kFirst, x.x1),
          params.eta * mu[1] - flow(params, Link::kSecond, x.x2)};
}

ModeDistribution stationary_distribution(const RateMatrix& rates) {
  if (!rates.is_irreducible()) throw ErgodicityError("mode chain is not irreducible");
  // Rows 1..3: balance equations (generator transpose). Row 4: normalization.
  linalg::Matrix<4> a{};
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t t = 0; t < kNumModes; ++t) a[s][t] = rates.rows()[t][s];
    a[s][s] = -rates.exit_rate(kAllModes[s]);
  }
  a[3] = {1.0, 1.0, 1.0, 1.0};
  const linalg::Vector<4> rhs{0.0, 0.0, 0.0, 1.0};
  const linalg::Vector<4> p = linalg::solve(a, rhs);
  for (double v : p) {
    if (!std::isfinite(v) || v < -1e-14) throw NumericalError("stationary solve produced an invalid probability");
  }
  ModeDistribution out;
  for (std::size_t s = 0; s < kNumModes; ++s) out.p[s] = std::max(p[s], 0.0);
  return out;
}

double balance_residual(const RateMatrix& rates, const ModeDistribution& p) {
  double worst = 0.0;
  for (FaultMode s : kAllModes) {
    double inflow = 0.0;
    for (FaultMode t : kAllModes) inflow += p[t] * rates(t, s);
    worst = std::max(worst, std::abs(p[s] * rates.exit_rate(s) - inflow));
  }
  return worst;
}

}  // namespace faultroute
