#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "ikham/hamiltonian.hpp"
#include "ikham/random_fields.hpp"

using namespace ikham;

namespace {

constexpr double pi = std::numbers::pi;

// Flat-state multiplier of the Dirichlet-to-Neumann map of the IK system
// (H1, depth one): dense per-mode solve of the constrained system.
double flat_multiplier(int n, double k, double delta) {
  auto symbol = [&](int i, int j) {
    const double pi_ = 2.0 * i, pj = 2.0 * j;
    double s = k * k / (pi_ + pj + 1.0);
    if (i > 0 && j > 0) s += pi_ * pj / (pi_ + pj - 1.0) / (delta * delta);
    return s;
  };
  Eigen::MatrixXd a(n + 1, n + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  a.row(0).setOnes();
  rhs[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) a(i, j) = symbol(i, j) - symbol(0, j);
  }
  const Eigen::VectorXd c = a.fullPivLu().solve(rhs);
  double g = 0.0;
  for (int j = 0; j <= n; ++j) g += symbol(0, j) * c[j];
  return g;
}

Geometry random_geometry(const Grid& g, std::mt19937_64& rng, const ExpansionSpec& spec, double delta) {
  const Field bottom = spec.expansion_case == ExpansionCase::H1 ? Field(g) : random_smooth(g, rng, 4, 0.1);
  return Geometry(random_smooth(g, rng, 4, 0.1), bottom, delta, 1.0, 1e-3, spec);
}

const SolverOptions tight{1e-13, 500, 60};

}  // namespace

TEST(Energy, PotentialEnergyClosedForm) {
  const Grid g(2 * pi, 32);
  const ExpansionSpec spec(ExpansionCase::H1, 0);
  const Field eta = Field::sample(g, [](double x) { return 0.2 * std::cos(x); });
  const Geometry geom(eta, Field(g), 0.5, 9.81, 1e-3, spec);
  EXPECT_NEAR(potential_energy(geom), 0.5 * 9.81 * 0.04 * pi, 1e-12);
}

TEST(Energy, ZeroOrderClosedForm) {
  const Grid g(2 * pi, 32);
  const ExpansionSpec spec(ExpansionCase::H1, 0);
  const Field eta = Field::sample(g, [](double x) { return 0.1 * std::cos(x); });
  const Geometry geom(eta, Field(g), 0.5, 1.0, 1e-3, spec);
  const Field phi = Field::sample(g, [](double x) { return std::sin(x); });
  // 1/2 int (1 + eta) cos^2 x + 1/2 int eta^2
  const double expected = 0.5 * pi + 0.5 * 0.01 * pi;
  EXPECT_NEAR(energy_ik(geom, spec, {phi}), expected, 1e-12);
  EXPECT_NEAR(hamiltonian_ik(geom, spec, phi), expected, 1e-12);
}

TEST(Energy, MatchesOperatorQuadraticForm) {
  const Grid g(2 * pi, 64);
  std::mt19937_64 rng(21);
  for (int n = 0; n <= 3; ++n) {
    for (auto c : {ExpansionCase::H1, ExpansionCase::H2}) {
      const ExpansionSpec spec(c, n);
      const Geometry geom = random_geometry(g, rng, spec, 0.4);
      PotentialVec phi;
      for (int j = 0; j <= n; ++j) phi.push_back(random_smooth(g, rng, 5, 1.0));
      double form = 0.0;
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) form += inner(phi[i], apply_Lij(geom, spec, i, j, phi[j]));
      }
      const double kinetic = energy_ik(geom, spec, phi) - potential_energy(geom);
      EXPECT_NEAR(kinetic, 0.5 * form, 1e-9 * std::max(1.0, std::abs(form))) << "N=" << n << " " << to_string(c);
      EXPECT_GE(kinetic, 0.0);
    }
  }
}

TEST(Hamiltonian, FlatModeMatchesDenseMultiplier) {
  const Grid g(2 * pi, 32);
  const double delta = 0.4, eps = 0.3;
  for (int n = 0; n <= 3; ++n) {
    const ExpansionSpec spec(ExpansionCase::H1, n);
    const Geometry geom{Field(g), Field(g), delta, 1.0, 1e-3, spec};
    for (int k : {1, 3}) {
      const Field phi = Field::sample(g, [&](double x) { return eps * std::cos(k * x); });
      const double mult = flat_multiplier(n, k, delta);
      EXPECT_NEAR(hamiltonian_ik(geom, spec, phi, tight), 0.5 * mult * eps * eps * pi, 1e-11);
      EXPECT_LT((var_phi(geom, spec, phi, tight) - mult * phi).max_abs(), 1e-10);
    }
  }
  // N = 0 reduces to 1/2 k^2 pi for unit amplitude
  const ExpansionSpec zero(ExpansionCase::H1, 0);
  const Geometry flat{Field(g), Field(g), delta, 1.0, 1e-3, zero};
  EXPECT_NEAR(hamiltonian_ik(flat, zero, Field::sample(g, [](double x) { return std::cos(2 * x); })), 2.0 * pi, 1e-12);
}

TEST(Hamiltonian, KineticEnergyIsHalfPairingWithVarPhi) {
  const Grid g(2 * pi, 64);
  std::mt19937_64 rng(22);
  for (int n = 1; n <= 3; ++n) {
    const ExpansionSpec spec(ExpansionCase::H2, n);
    const Geometry geom = random_geometry(g, rng, spec, 0.3);
    const Field phi = random_smooth(g, rng, 5, 1.0);
    const double kinetic = hamiltonian_ik(geom, spec, phi, tight) - potential_energy(geom);
    EXPECT_NEAR(kinetic, 0.5 * inner(phi, var_phi(geom, spec, phi, tight)), 1e-9 * std::max(1.0, kinetic));
  }
}

TEST(Hamiltonian, GaugeAndHomogeneity) {
  const Grid g(2 * pi, 64);
  std::mt19937_64 rng(23);
  const ExpansionSpec spec(ExpansionCase::H2, 2);
  const Geometry geom = random_geometry(g, rng, spec, 0.3);
  const Field phi = random_smooth(g, rng, 5, 1.0);
  const double h = hamiltonian_ik(geom, spec, phi, tight);
  EXPECT_NEAR(hamiltonian_ik(geom, spec, phi + 2.5, tight), h, 1e-9 * std::max(1.0, h));
  const double kin = h - potential_energy(geom);
  const double kin3 = hamiltonian_ik(geom, spec, 3.0 * phi, tight) - potential_energy(geom);
  EXPECT_NEAR(kin3, 9.0 * kin, 1e-9 * std::max(1.0, kin3));
  // variations annihilate constants in phi
  EXPECT_LT((var_phi(geom, spec, phi + 1.0, tight) - var_phi(geom, spec, phi, tight)).max_abs(), 1e-9);
  EXPECT_LT((var_eta(geom, spec, phi + 1.0, tight) - var_eta(geom, spec, phi, tight)).max_abs(), 1e-9);
}

TEST(Hamiltonian, RestStateVariations) {
  const Grid g(2 * pi, 32);
  const ExpansionSpec spec(ExpansionCase::H1, 2);
  const Geometry geom{Field(g), Field(g), 0.5, 1.0, 1e-3, spec};
  EXPECT_EQ(hamiltonian_ik(geom, spec, Field(g)), 0.0);
  EXPECT_LT(var_phi(geom, spec, Field(g)).max_abs(), 1e-15);
  EXPECT_LT(var_eta(geom, spec, Field(g)).max_abs(), 1e-15);
  // zero velocity: var_eta reduces to g eta
  const Field eta = Field::sample(g, [](double x) { return 0.05 * std::sin(x); });
  const Geometry tilted(eta, Field(g), 0.5, 2.0, 1e-3, spec);
  EXPECT_LT((var_eta(tilted, spec, Field::constant(g, 3.0)) - 2.0 * eta).max_abs(), 1e-12);
}

TEST(Gradcheck, ZeroDirectionsGiveZeroDiscrepancy) {
  const Grid g(2 * pi, 32);
  std::mt19937_64 rng(24);
  const ExpansionSpec spec(ExpansionCase::H2, 1);
  const Geometry geom = random_geometry(g, rng, spec, 0.5);
  const auto rep = gradcheck(geom, spec, random_smooth(g, rng, 4, 1.0), Field(g), Field(g), {1e-2, 1e-3});
  ASSERT_EQ(rep.rows.size(), 2u);
  for (const auto& r : rep.rows) {
    EXPECT_EQ(r.discrepancy_eta, 0.0);
    EXPECT_EQ(r.discrepancy_phi, 0.0);
  }
  EXPECT_EQ(rep.pairing_eta, 0.0);
}

TEST(Gradcheck, SecondOrderAgreement) {
  const Grid g(2 * pi, 64);
  std::mt19937_64 rng(25);
  const std::vector<double> eps{1e-2, 5e-3, 2.5e-3, 1.25e-3};
  for (int n = 1; n <= 2; ++n) {
    for (auto c : {ExpansionCase::H1, ExpansionCase::H2}) {
      const ExpansionSpec spec(c, n);
      const Geometry geom = random_geometry(g, rng, spec, 0.4);
      const Field phi = random_smooth(g, rng, 4, 1.0);
      const auto rep = gradcheck(geom, spec, phi, random_smooth(g, rng, 4, 1.0), random_smooth(g, rng, 4, 1.0), eps,
                                 tight);
      EXPECT_NEAR(rep.observed_order_eta, 2.0, 0.2) << "N=" << n << " " << to_string(c);
      // H is quadratic in phi, so the central difference is exact up to roundoff
      for (const auto& r : rep.rows) EXPECT_LT(r.discrepancy_phi, 1e-8 * std::max(1.0, std::abs(rep.pairing_phi)));
      EXPECT_LT(rep.rows.front().discrepancy_eta, 1e-3 * std::max(1.0, std::abs(rep.pairing_eta)));
    }
  }
}

TEST(Gradcheck, LogLogSlope) {
  EXPECT_NEAR(loglog_slope({1, 2, 4}, {3, 12, 48}), 2.0, 1e-12);
  EXPECT_TRUE(std::isnan(loglog_slope({1}, {1})));
}
