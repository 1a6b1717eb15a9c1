#pragma once

// Two parallel links with logit routing and Markov-modulated sensing faults.
//
// Mode numbering is fixed throughout the library and every file format:
//   1 = both sensors good, 2 = link-1 sensor faulty,
//   3 = link-2 sensor faulty, 4 = both faulty.
// A faulty sensor reports zero density for its link.

#include <array>
#include <cstddef>

namespace faultroute {

inline constexpr std::size_t kNumModes = 4;
inline constexpr double kCapacitySumTolerance = 1e-12;
inline constexpr double kProbabilitySumTolerance = 1e-12;

enum class FaultMode : int { kNone = 1, kLink1Faulty = 2, kLink2Faulty = 3, kBothFaulty = 4 };

inline constexpr std::array<FaultMode, kNumModes> kAllModes{
    FaultMode::kNone, FaultMode::kLink1Faulty, FaultMode::kLink2Faulty, FaultMode::kBothFaulty};

constexpr std::size_t mode_index(FaultMode s) { return static_cast<std::size_t>(s) - 1; }
constexpr int mode_number(FaultMode s) { return static_cast<int>(s); }
/// Maps 1..4 to a mode; anything else throws std::invalid_argument.
FaultMode mode_from_number(int s);

enum class Link : int { kFirst = 1, kSecond = 2 };
constexpr std::size_t link_index(Link k) { return static_cast<std::size_t>(k) - 1; }

/// Per-link quantity, index 0 = link 1.
using LinkPair = std::array<double, 2>;

struct NetworkParams {
  double F1 = 0.5;    // capacity of link 1
  double F2 = 0.5;    // capacity of link 2
  double beta = 1.0;  // routing sensitivity
  double eta = 0.0;   // demand

  /// Validated construction: F_k >= 0, F1 + F2 = 1 (1e-12), beta > 0, eta >= 0.
  /// Inputs that violate the normalization are rejected, never rescaled.
  static NetworkParams make(double F1, double F2, double beta, double eta);

  double capacity(Link k) const { return k == Link::kFirst ? F1 : F2; }
  NetworkParams with_eta(double demand) const;
};

/// Throws std::invalid_argument when the invariants of NetworkParams fail.
void validate(const NetworkParams& params);

struct DensityState {
  double x1 = 0.0;
  double x2 = 0.0;

  double at(Link k) const { return k == Link::kFirst ? x1 : x2; }
  /// One-norm |x| = x1 + x2 (densities are nonnegative).
  double norm1() const { return x1 + x2; }
  friend bool operator==(const DensityState&, const DensityState&) = default;
};

struct ModeDistribution {
  std::array<double, kNumModes> p{};

  /// Rejects negative entries and sums off 1 by more than `tolerance`.
  static ModeDistribution make(const std::array<double, kNumModes>& probs,
                               double tolerance = kProbabilitySumTolerance);
  static ModeDistribution uniform();

  double operator[](FaultMode s) const { return p[mode_index(s)]; }
};

/// Transition rates lambda(s, s') of the mode chain. Diagonal entries are zero.
class RateMatrix {
 public:
  using Rows = std::array<std::array<double, kNumModes>, kNumModes>;

  RateMatrix() = default;
  /// Off-diagonal entries must be finite and >= 0, diagonal entries exactly 0.
  explicit RateMatrix(const Rows& rows);

  double operator()(FaultMode from, FaultMode to) const {
    return rows_[mode_index(from)][mode_index(to)];
  }
  const Rows& rows() const { return rows_; }

  /// Total rate of leaving mode s.
  double exit_rate(FaultMode s) const;
  /// True when every mode reaches every other through positive rates.
  bool is_irreducible() const;

  /// Every off-diagonal rate equal to `rate`.
  static RateMatrix uniform(double rate);
  /// lambda(s, s') = kappa * p[s']; stationary law p whenever all p > 0.
  static RateMatrix proportional(const ModeDistribution& target, double kappa = 1.0);
  /// Product of two independent good/bad sensors with the given per-link
  /// failure and repair rates.
  static RateMatrix independent_links(double fail_rate, double repair_rate);

 private:
  Rows rows_{};
};

/// f_k(x) = F_k (1 - e^{-x}). Negative density throws std::domain_error.
double flow(const NetworkParams& params, Link k, double density);

/// Observed state T_s(x): faulty links read zero.
DensityState fault_map(FaultMode s, const DensityState& x);

/// Logit split of demand on the observed state. mu2 is computed as 1 - mu1.
LinkPair routing_fraction(const NetworkParams& params, FaultMode s, const DensityState& x);

/// G(s, x) = eta * mu(s, x) - f(x).
LinkPair vector_field(const NetworkParams& params, FaultMode s, const DensityState& x);

/// Unique stationary law of an irreducible chain. Throws ErgodicityError for a
/// reducible chain and NumericalError if the balance system is singular.
ModeDistribution stationary_distribution(const RateMatrix& rates);

/// max_s |p_s * exit(s) - sum_{s'} p_{s'} lambda(s', s)|
double balance_residual(const RateMatrix& rates, const ModeDistribution& p);

}  // namespace faultroute
