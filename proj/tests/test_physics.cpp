#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "blindqe/physics.hpp"

using namespace blindqe;

namespace {

constexpr double kPi = std::numbers::pi;

// Lindblad evolution of the full 2x2 density matrix (basis g, e) with
// H = Omega/2 (|e><g| + |g><e|) and jump operator sqrt(gamma) |g><e|.
double lindblad_oracle(double gamma, double omega, double tau) {
  using C = std::complex<double>;
  using M = std::array<C, 4>;  // row-major gg, ge, eg, ee
  const C I(0, 1);
  auto rhs = [&](const M& r) {
    const C gg = r[0], ge = r[1], eg = r[2], ee = r[3];
    // -i [H, rho]
    M d{-I * omega / 2.0 * (eg - ge), -I * omega / 2.0 * (ee - gg), -I * omega / 2.0 * (gg - ee),
        -I * omega / 2.0 * (ge - eg)};
    d[0] += gamma * ee;
    d[1] -= gamma / 2.0 * ge;
    d[2] -= gamma / 2.0 * eg;
    d[3] -= gamma * ee;
    return d;
  };
  const int steps = std::max(2000, static_cast<int>(std::ceil(tau * std::max(gamma, omega) * 5000)));
  const double h = tau / steps;
  M r{1.0, 0.0, 0.0, 0.0};
  auto add = [](const M& a, C c, const M& b) {
    M o;
    for (int i = 0; i < 4; ++i) o[i] = a[i] + c * b[i];
    return o;
  };
  for (int i = 0; i < steps; ++i) {
    const M k1 = rhs(r), k2 = rhs(add(r, h / 2, k1)), k3 = rhs(add(r, h / 2, k2)), k4 = rhs(add(r, h, k3));
    for (int j = 0; j < 4; ++j) r[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  return r[3].real();
}

}  // namespace

TEST(DriveParams, TauAndOmega) {
  const DriveParams p{1.0, 1.0, 0.78 * kPi};
  EXPECT_NEAR(p.tau(), 1.5011, 1e-4);
  EXPECT_NEAR(p.omega(), 1.6324, 1e-4);
  EXPECT_NEAR(p.tau() * p.omega(), p.theta, 1e-14);
  EXPECT_THROW(DriveParams({1.0, -1.0, 1.0}).validate(), std::invalid_argument);
  EXPECT_THROW(DriveParams({1.0, 1.0, 0.0}).validate(), std::invalid_argument);
  EXPECT_THROW(eta1_analytic({0.0, 1.0, 1.0}), std::invalid_argument);
}

TEST(Eta1, Examples) {
  EXPECT_NEAR(eta1_analytic({1.0, 1.0, 0.78 * kPi}), 0.48, 0.01);
  EXPECT_NEAR(eta1_analytic({1.0, 100.0, kPi}), 1.0, 0.03);
  EXPECT_LT(eta1_analytic({1.0, 1.0, 1e-6}), 1e-10);
}

TEST(Eta1, NumericTrivialCases) {
  EXPECT_EQ(excited_population_rk4(1.0, 0.0, 3.0), 0.0);
  // closed system, pi pulse
  EXPECT_NEAR(excited_population_rk4(0.0, 2.0, kPi / 2.0), 1.0, 1e-12);
  EXPECT_NEAR(excited_population(0.0, 2.0, kPi / 2.0), 1.0, 1e-12);
  EXPECT_THROW(eta1_numeric({1.0, 1.0, 0.78 * kPi}, 1e-2), std::invalid_argument);
  EXPECT_NO_THROW(eta1_numeric({1.0, 1.0, 0.78 * kPi}, 1e-4));
}

TEST(Eta1, LibraryIntegratorMatchesLindbladOracle) {
  for (auto [g, w, t] : {std::tuple{1.0, 1.6324, 1.5011}, std::tuple{1.0, 0.1, 4.0}, std::tuple{1.0, 10.0, 0.3},
                         std::tuple{0.0, 3.0, 1.0}}) {
    EXPECT_NEAR(excited_population_rk4(g, w, t), lindblad_oracle(g, w, t), 1e-9) << g << " " << w << " " << t;
  }
}

TEST(Eta1, AnalyticMatchesOdeOnGrid) {
  const auto alphas = linspace(0.1, 10.0, 20);
  const auto thetas = linspace(0.1 * kPi, 2.0 * kPi, 20);
  double worst = 0;
  for (double a : alphas)
    for (double th : thetas) {
      const DriveParams p{1.0, a, th};
      worst = std::max(worst, std::abs(eta1_analytic(p) - eta1_numeric(p)));
    }
  EXPECT_LT(worst, 1e-6);
}

TEST(Eta1, BranchesAreContinuous) {
  // critical damping at Omega = gamma / 4
  const double tau = 2.0;
  const double at = excited_population(1.0, 0.25, tau);
  EXPECT_NEAR(excited_population(1.0, 0.25 * (1 + 1e-7), tau), at, 1e-7);
  EXPECT_NEAR(excited_population(1.0, 0.25 * (1 - 1e-7), tau), at, 1e-7);
  EXPECT_NEAR(at, excited_population_rk4(1.0, 0.25, tau), 1e-9);
  EXPECT_NEAR(excited_population(1.0, 0.1, tau), excited_population_rk4(1.0, 0.1, tau), 1e-9);
}

TEST(Eta1, PlusSignClosedFormDisagreesWithOde) {
  const DriveParams p{1.0, 1.0, 0.78 * kPi};
  EXPECT_GT(std::abs(eta1_plus_form(p) - eta1_numeric(p)), 0.05);
  EXPECT_NEAR(eta1_plus_form(p), 0.376, 1e-3);
  EXPECT_NEAR(eta1_numeric(p), 0.4818, 1e-3);
}

TEST(Maximize, Endpoints) {
  const auto one = maximize_eta1(1.0);
  EXPECT_NEAR(one.eta1, 0.48, 0.01);
  EXPECT_NEAR(one.theta / kPi, 0.78, 0.02);
  const auto big = maximize_eta1(100.0);
  EXPECT_NEAR(big.theta / kPi, 1.0, 0.02);
  EXPECT_GE(big.eta1, 0.97);
  const auto mid = maximize_eta1(2.5);
  EXPECT_NEAR(mid.eta1, 0.71, 0.01);
  EXPECT_NEAR(mid.theta / kPi, 0.91, 0.02);
  EXPECT_NEAR(mid.tau, 0.82, 0.02);
  EXPECT_THROW(maximize_eta1(0.0), std::invalid_argument);
}

TEST(Maximize, IsLocalMaximumBeatingTheGrid) {
  for (double a : {0.3, 1.0, 4.0}) {
    const auto o = maximize_eta1(a);
    for (int i = 1; i <= 2000; ++i) EXPECT_LE(eta1_analytic({1.0, a, 2.0 * kPi * i / 2000}), o.eta1 + 1e-12);
    EXPECT_GE(o.eta1, eta1_analytic({1.0, a, o.theta - 1e-4}));
    EXPECT_GE(o.eta1, eta1_analytic({1.0, a, o.theta + 1e-4}));
  }
}

TEST(Sweep, CrossingNearFigureValue) {
  const auto c = gap_crossing();
  EXPECT_NEAR(c.alpha_sq, 2.5, 0.1);
  EXPECT_NEAR(c.eta1_max, 0.71, 0.01);
  EXPECT_NEAR(c.theta_star / kPi, 0.91, 0.02);
  EXPECT_NEAR(c.tau_star, 0.82, 0.02);
  EXPECT_NEAR(c.gap_emitter, 0.0, 1e-8);
  EXPECT_THROW(gap_crossing(EmitterPhysics::ideal_lambda(1.0)), std::domain_error);
}

TEST(Sweep, InvariantsOverRange) {
  const auto alphas = linspace(0.1, 10.0, 100);
  const auto rows = security_gap_sweep(alphas);
  const auto ideal = security_gap_sweep(alphas, EmitterPhysics::ideal_lambda(1.0));
  int sign_changes = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_GE(rows[i].eta1_max, 0.0);
    EXPECT_LE(rows[i].eta1_max, rows[i].p1);
    EXPECT_LE(rows[i].p1, 1.0);
    EXPECT_GE(ideal[i].eta1_max, rows[i].eta1_max);
    EXPECT_GT(ideal[i].gap_emitter, 0.0);
    EXPECT_DOUBLE_EQ(ideal[i].gap_emitter, rows[i].gap_ideal);
    EXPECT_TRUE(std::isnan(ideal[i].theta_star));
    if (i > 0 && (rows[i].gap_emitter > 0) != (rows[i - 1].gap_emitter > 0)) ++sign_changes;
  }
  EXPECT_EQ(sign_changes, 1);
  EXPECT_THROW(security_gap_sweep({}), std::invalid_argument);
}

TEST(Sweep, LambdaCouplingScales) {
  const auto r = sweep_row(1.0, EmitterPhysics::ideal_lambda(0.5));
  EXPECT_NEAR(r.eta1_max, 0.5 * (1 - std::exp(-1.0)), 1e-15);
  EXPECT_THROW(EmitterPhysics::ideal_lambda(0.0), std::invalid_argument);
  EXPECT_THROW(EmitterPhysics::ideal_lambda(1.5), std::invalid_argument);
}

TEST(Sweep, ExperimentalPointsAreAnnotationsOnly) {
  EXPECT_EQ(kExperimentalPoints.size(), 2U);
  EXPECT_DOUBLE_EQ(kExperimentalPoints[0].alpha_sq, 3.8);
  EXPECT_DOUBLE_EQ(kExperimentalPoints[1].eta1, 0.81);
}
