#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "faultroute/errors.hpp"
#include "faultroute/model.hpp"

using namespace faultroute;

namespace {

NetworkParams homogeneous(double eta, double beta = 1.0) { return NetworkParams::make(0.5, 0.5, beta, eta); }

DensityState random_state(std::mt19937_64& rng, double hi = 10.0) {
  std::uniform_real_distribution<double> u(0.0, hi);
  return {u(rng), u(rng)};
}

// Null vector of the generator transpose, normalized; independent of the
// row-replacement solve used by the library.
std::array<double, 4> eigen_stationary(const RateMatrix& rates) {
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) q(i, j) = rates.rows()[i][j];
    q(i, i) = -rates.exit_rate(kAllModes[i]);
  }
  Eigen::FullPivLU<Eigen::Matrix4d> lu(q.transpose());
  Eigen::MatrixXd kernel = lu.kernel();
  Eigen::Vector4d v = kernel.col(0);
  v /= v.sum();
  return {v(0), v(1), v(2), v(3)};
}

RateMatrix random_rates(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 3.0);
  RateMatrix::Rows rows{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) rows[i][j] = u(rng);
  return RateMatrix(rows);
}

}  // namespace

TEST_CASE("network parameters are validated") {
  CHECK_NOTHROW(NetworkParams::make(0.3, 0.7, 2.0, 0.4));
  CHECK_THROWS_AS(NetworkParams::make(0.5, 0.6, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(NetworkParams::make(-0.1, 1.1, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(NetworkParams::make(0.5, 0.5, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(NetworkParams::make(0.5, 0.5, 1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(homogeneous(0.5).with_eta(-1.0), std::invalid_argument);
  CHECK_NOTHROW(NetworkParams::make(1.0 - 1e-13, 1e-13 + 1e-14, 1.0, 0.0));
}

TEST_CASE("mode numbering") {
  CHECK(mode_number(FaultMode::kNone) == 1);
  CHECK(mode_number(FaultMode::kBothFaulty) == 4);
  CHECK(mode_from_number(3) == FaultMode::kLink2Faulty);
  CHECK_THROWS_AS(mode_from_number(0), std::invalid_argument);
  CHECK_THROWS_AS(mode_from_number(5), std::invalid_argument);
}

TEST_CASE("flow values") {
  const NetworkParams p = homogeneous(0.8);
  CHECK(flow(p, Link::kFirst, 0.0) == 0.0);
  CHECK(std::abs(flow(p, Link::kFirst, 50.0) - 0.5) < 1e-20);
  CHECK(flow(p, Link::kFirst, 50.0) <= 0.5);
  CHECK(std::abs(flow(p, Link::kFirst, 0.732668) - 0.26) < 1e-3);
  CHECK_THROWS_AS(flow(p, Link::kFirst, -1e-3), std::domain_error);
}

TEST_CASE("flow is bounded and strictly increasing") {
  const NetworkParams p = NetworkParams::make(0.3, 0.7, 1.0, 0.5);
  for (Link k : {Link::kFirst, Link::kSecond}) {
    double previous = flow(p, k, 0.0);
    for (int i = 1; i <= 3000; ++i) {
      const double x = 0.01 * i;
      const double f = flow(p, k, x);
      CHECK(f >= 0.0);
      CHECK(f < p.capacity(k) + 1e-300);
      if (x < 30.0) CHECK(f > previous);
      previous = f;
    }
  }
}

TEST_CASE("fault map definitions") {
  const DensityState x{3.2, 1.1};
  CHECK(fault_map(FaultMode::kNone, x) == DensityState{3.2, 1.1});
  CHECK(fault_map(FaultMode::kLink1Faulty, x) == DensityState{0.0, 1.1});
  CHECK(fault_map(FaultMode::kLink2Faulty, x) == DensityState{3.2, 0.0});
  CHECK(fault_map(FaultMode::kBothFaulty, x) == DensityState{0.0, 0.0});
}

TEST_CASE("fault map is idempotent") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const DensityState x = random_state(rng);
    for (FaultMode s : kAllModes) CHECK(fault_map(s, fault_map(s, x)) == fault_map(s, x));
  }
}

TEST_CASE("routing fraction examples") {
  const NetworkParams p = homogeneous(0.5);
  const LinkPair both = routing_fraction(p, FaultMode::kBothFaulty, {4.0, 0.3});
  CHECK(both[0] == 0.5);
  CHECK(both[1] == 0.5);

  const LinkPair mu = routing_fraction(p, FaultMode::kNone, {0.0, std::log(2.0)});
  CHECK(mu[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  // independent softmax
  const double e1 = std::exp(-0.0), e2 = std::exp(-std::log(2.0));
  CHECK(std::abs(mu[0] - e1 / (e1 + e2)) < 1e-15);

  for (double z : {0.05, 0.3, 0.9}) {
    const LinkPair m2 = routing_fraction(p, FaultMode::kLink1Faulty, {5.0, -std::log(z)});
    CHECK(std::abs(m2[0] - 1.0 / (1.0 + z)) < 1e-14);
    CHECK(std::abs(m2[1] - z / (1.0 + z)) < 1e-14);
  }
}

TEST_CASE("routing stays on the simplex") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> beta(0.05, 5.0);
  for (int i = 0; i < 5000; ++i) {
    const NetworkParams p = NetworkParams::make(0.5, 0.5, beta(rng), 0.3);
    const DensityState x = random_state(rng, 5.0);
    for (FaultMode s : kAllModes) {
      const LinkPair mu = routing_fraction(p, s, x);
      CHECK(mu[0] + mu[1] == 1.0);
      CHECK(mu[0] > 0.0);
      CHECK(mu[0] < 1.0);
    }
  }
}

TEST_CASE("routing does not overflow for large beta * x") {
  const NetworkParams p = homogeneous(0.5, 1e3);
  const LinkPair mu = routing_fraction(p, FaultMode::kNone, {1e3, 0.0});
  CHECK(std::isfinite(mu[0]));
  CHECK(mu[0] >= 0.0);
  CHECK(mu[1] == doctest::Approx(1.0));
  const LinkPair eq = routing_fraction(p, FaultMode::kNone, {1e3, 1e3});
  CHECK(eq[0] == 0.5);
}

TEST_CASE("routing under faults equals fault-free routing of the observed state") {
  std::mt19937_64 rng(6);
  const NetworkParams p = NetworkParams::make(0.4, 0.6, 1.7, 0.3);
  for (int i = 0; i < 2000; ++i) {
    const DensityState x = random_state(rng);
    for (FaultMode s : kAllModes) {
      const LinkPair a = routing_fraction(p, s, x);
      const LinkPair b = routing_fraction(p, FaultMode::kNone, fault_map(s, x));
      CHECK(a[0] == b[0]);
      CHECK(a[1] == b[1]);
    }
  }
}

TEST_CASE("vector field examples") {
  const NetworkParams p = homogeneous(0.7);
  const DensityState x{0.4, 2.5};
  const LinkPair g = vector_field(p, FaultMode::kBothFaulty, x);
  CHECK(std::abs(g[0] - (0.35 - flow(p, Link::kFirst, 0.4))) < 1e-15);
  CHECK(std::abs(g[1] - (0.35 - flow(p, Link::kSecond, 2.5))) < 1e-15);

  const LinkPair drain = vector_field(homogeneous(0.0), FaultMode::kLink2Faulty, {1.0, 1.0});
  const double expected = -0.5 * (1.0 - std::exp(-1.0));
  CHECK(std::abs(drain[0] - expected) < 1e-15);
  CHECK(std::abs(drain[1] - expected) < 1e-15);

  // worst-case routing at the floor balances exactly
  const double floor = 0.732668;
  const double inflow = 0.8 * std::exp(-floor) / (1.0 + std::exp(-floor));
  CHECK(std::abs(inflow - flow(homogeneous(0.8), Link::kFirst, floor)) < 1e-6);
}

TEST_CASE("empty links never drain") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double f1 = u(rng);
    const NetworkParams p = NetworkParams::make(f1, 1.0 - f1, 0.1 + 4.0 * u(rng), 1.2 * u(rng));
    const double other = 10.0 * u(rng);
    for (FaultMode s : kAllModes) {
      CHECK(vector_field(p, s, {0.0, other})[0] >= 0.0);
      CHECK(vector_field(p, s, {other, 0.0})[1] >= 0.0);
    }
  }
}

TEST_CASE("rate matrix validation") {
  RateMatrix::Rows rows{};
  rows[0][1] = -1.0;
  CHECK_THROWS_AS(RateMatrix{rows}, std::invalid_argument);
  rows[0][1] = 1.0;
  rows[2][2] = 0.5;
  CHECK_THROWS_AS(RateMatrix{rows}, std::invalid_argument);
  rows[2][2] = 0.0;
  const RateMatrix partial(rows);
  CHECK_FALSE(partial.is_irreducible());
  CHECK_THROWS_AS(stationary_distribution(partial), ErgodicityError);
  CHECK(RateMatrix::uniform(1.0).is_irreducible());
  CHECK(RateMatrix::uniform(1.0).exit_rate(FaultMode::kLink1Faulty) == 3.0);
}

TEST_CASE("mode distribution validation") {
  CHECK_THROWS_AS(ModeDistribution::make({0.5, 0.5, 0.1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ModeDistribution::make({1.1, -0.1, 0.0, 0.0}), std::invalid_argument);
  CHECK_NOTHROW(ModeDistribution::make({0.25, 0.25, 0.25, 0.25}));
}

TEST_CASE("stationary distribution of the symmetric chain") {
  const ModeDistribution p = stationary_distribution(RateMatrix::uniform(1.0));
  for (double v : p.p) CHECK(std::abs(v - 0.25) < 1e-14);
}

TEST_CASE("stationary distribution of the star chain matches the eigen oracle") {
  RateMatrix::Rows rows{};
  for (std::size_t k = 1; k < 4; ++k) rows[0][k] = rows[k][0] = 1.0;
  const RateMatrix star(rows);
  const ModeDistribution p = stationary_distribution(star);
  const auto oracle = eigen_stationary(star);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(p.p[i] - oracle[i]) < 1e-12);
  CHECK(balance_residual(star, p) < 1e-10);
}

TEST_CASE("stationary distribution of two independent links") {
  // fail rate 1, repair rate 3: each link faulty with probability 1/4
  const RateMatrix rates = RateMatrix::independent_links(1.0, 3.0);
  const ModeDistribution p = stationary_distribution(rates);
  CHECK(std::abs(p[FaultMode::kNone] - 9.0 / 16.0) < 1e-14);
  CHECK(std::abs(p[FaultMode::kLink1Faulty] - 3.0 / 16.0) < 1e-14);
  CHECK(std::abs(p[FaultMode::kLink2Faulty] - 3.0 / 16.0) < 1e-14);
  CHECK(std::abs(p[FaultMode::kBothFaulty] - 1.0 / 16.0) < 1e-14);
  CHECK(balance_residual(rates, p) < 1e-10);
}

TEST_CASE("random chains: simplex, balance and oracle agreement") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 500; ++i) {
    const RateMatrix rates = random_rates(rng);
    const ModeDistribution p = stationary_distribution(rates);
    double sum = 0.0;
    for (double v : p.p) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
    CHECK(balance_residual(rates, p) < 1e-10);
    const auto oracle = eigen_stationary(rates);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(p.p[k] - oracle[k]) < 1e-12);
  }
}

TEST_CASE("proportional construction has the requested stationary law") {
  const ModeDistribution target = ModeDistribution::make({0.1, 0.2, 0.3, 0.4});
  for (double kappa : {0.5, 1.0, 7.0}) {
    const ModeDistribution p = stationary_distribution(RateMatrix::proportional(target, kappa));
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(p.p[k] - target.p[k]) < 1e-12);
  }
}
