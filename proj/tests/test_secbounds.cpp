#include <gtest/gtest.h>

#include <cmath>

#include "blindqe/gadget.hpp"
#include "blindqe/secbounds.hpp"
#include "blindqe/simulators.hpp"

using namespace blindqe;

namespace {

// Pr[Bin(n, p) <= k] by direct summation in log space.
double binomial_cdf(int n, double p, int k) {
  double s = 0;
  for (int i = 0; i <= k; ++i) {
    const double lg = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + i * std::log(p) +
                      (n - i) * std::log1p(-p);
    s += std::exp(lg);
  }
  return s;
}

}  // namespace

TEST(Hoeffding, Examples) {
  EXPECT_DOUBLE_EQ(hoeffding_tail(100, 0.5, 50, TailSide::Lower), 1.0);
  EXPECT_DOUBLE_EQ(hoeffding_tail(100, 0.5, 50, TailSide::Upper), 1.0);
  EXPECT_NEAR(hoeffding_tail(100, 0.5, 40, TailSide::Lower), 0.135335, 1e-6);
  EXPECT_NEAR(hoeffding_tail(100, 0.5, 60, TailSide::Upper), 0.135335, 1e-6);
  EXPECT_THROW(hoeffding_tail(100, 0.5, 60, TailSide::Lower), std::invalid_argument);
  EXPECT_THROW(hoeffding_tail(100, 0.5, 40, TailSide::Upper), std::invalid_argument);
  EXPECT_THROW(hoeffding_tail(0, 0.5, 0, TailSide::Upper), std::invalid_argument);
}

TEST(Hoeffding, DominatesBinomialCdf) {
  EXPECT_NEAR(binomial_cdf(100, 0.5, 40), 0.0284, 5e-4);
  for (int n : {10, 50, 100, 300})
    for (double p : {0.1, 0.5, 0.9})
      for (int k = 0; k <= static_cast<int>(n * p); ++k)
        EXPECT_LE(binomial_cdf(n, p, k), hoeffding_tail(static_cast<std::size_t>(n), p, k, TailSide::Lower) + 1e-12);
}

TEST(GadgetBounds, ReferencePoint) {
  const auto r = gadget_bounds(0.9, 0.5, 100);
  EXPECT_NEAR(r.p2, 0.090204, 1e-6);
  EXPECT_NEAR(r.t, 49.51, 1e-2);
  EXPECT_NEAR(r.nu, 0.327885, 1e-6);
  EXPECT_NEAR(r.log_eps, -32.7885, 1e-4);
  EXPECT_NEAR(r.eps / 5.7e-15, 1.0, 0.02);
  EXPECT_LT(std::abs(r.eps_cor - r.eps_sec), 1e-12);
  EXPECT_DOUBLE_EQ(r.eps, std::exp(-r.nu * 100));
}

TEST(GadgetBounds, DegenerateAndInvalid) {
  const double p2 = multiphoton_prob(0.5);
  const auto r = gadget_bounds(p2, 0.5, 50);
  EXPECT_EQ(r.nu, 0.0);
  EXPECT_EQ(r.eps, 1.0);
  EXPECT_THROW(gadget_bounds(0.05, 0.5, 50), std::invalid_argument);
  EXPECT_THROW(gadget_bounds(1.5, 0.5, 50), std::invalid_argument);
  EXPECT_THROW(gadget_bounds(0.9, 0.5, 0), std::invalid_argument);
  EXPECT_THROW(gadget_bounds(0.9, 0.5, 10, 11.0), std::invalid_argument);
  EXPECT_THROW(gadget_bounds(0.9, -0.5, 10), std::invalid_argument);
}

TEST(GadgetBounds, CrossingPointHasNoAmplification) {
  const auto r = gadget_bounds(0.71, 2.5, 100, 71.0);
  EXPECT_NEAR(r.p2, 0.712703, 1e-6);
  EXPECT_NEAR(r.nu, 3.65e-6, 0.01e-6);
  EXPECT_EQ(r.eps, 1.0);
  EXPECT_THROW(gadget_bounds(0.71, 2.5, 100), std::invalid_argument);
}

TEST(GadgetBounds, ExplicitThreshold) {
  const auto r = gadget_bounds(0.9, 0.5, 100, 60.0);
  EXPECT_NEAR(r.eps_cor, std::exp(-2 * 0.09 * 100), 1e-15);
  EXPECT_NEAR(r.eps_sec, std::exp(-2 * std::pow(0.6 - r.p2, 2) * 100), 1e-30);
  EXPECT_DOUBLE_EQ(r.eps, std::max(r.eps_cor, r.eps_sec));
  // outside their validity ranges the bounds are vacuous
  EXPECT_EQ(gadget_bounds(0.9, 0.5, 100, 95.0).eps_cor, 1.0);
  EXPECT_EQ(gadget_bounds(0.9, 0.5, 100, 5.0).eps_sec, 1.0);
}

TEST(GadgetBounds, EquilibriumAcrossGrid) {
  for (double eta : {0.3, 0.6, 0.9, 1.0})
    for (double a2 : {0.05, 0.2, 0.5})
      for (std::size_t n : {1U, 10U, 100U, 1000U}) {
        const auto r = gadget_bounds(eta, a2, n);
        EXPECT_LT(std::abs(r.eps_cor - r.eps_sec), 1e-12);
        EXPECT_NEAR(r.log_eps, -r.nu * static_cast<double>(n), 1e-9);
        for (double e : {r.eps_cor, r.eps_sec, r.eps}) {
          EXPECT_GE(e, 0.0);
          EXPECT_LE(e, 1.0);
        }
      }
}

TEST(GadgetBounds, LogDomainSurvivesUnderflow) {
  const auto r = gadget_bounds(0.95, 0.01, 100000);
  EXPECT_EQ(r.eps, 0.0);
  EXPECT_TRUE(std::isfinite(r.log_eps));
  EXPECT_LT(r.log_eps, -700.0);
}

TEST(GadgetBounds, MonotoneInNAndGap) {
  double prev = 1.0;
  for (std::size_t n = 1; n <= 400; ++n) {
    const double e = gadget_bounds(0.8, 0.3, n).eps;
    EXPECT_LE(e, prev);
    prev = e;
  }
  prev = 1.0;
  for (int i = 0; i <= 50; ++i) {
    const double eta = multiphoton_prob(0.3) + i * 0.01;
    if (eta > 1.0) break;
    const double e = gadget_bounds(eta, 0.3, 50).eps;
    EXPECT_LE(e, prev);
    prev = e;
  }
}

TEST(ComposedBounds, Examples) {
  const auto r = gadget_bounds(0.9, 0.5, 100);
  EXPECT_DOUBLE_EQ(composed_bounds(r, 1).bdqc, r.eps);
  const auto c = composed_bounds(r, 50, 100, 1e-6);
  EXPECT_NEAR(c.bdqc / (50 * std::exp(-32.7885)), 1.0, 1e-4);
  EXPECT_NEAR(c.bdqc, 2.8e-13, 0.1e-13);
  ASSERT_TRUE(c.sdqc.has_value());
  EXPECT_NEAR(*c.sdqc, 1e-6 + 100 * 50 * r.eps, 1e-18);
  EXPECT_FALSE(composed_bounds(r, 50).sdqc.has_value());
  EXPECT_EQ(composed_bounds(gadget_bounds(0.3, 0.2, 2), 1000).bdqc, 1.0);
  EXPECT_THROW(composed_bounds(r, 0), std::invalid_argument);
}

TEST(PostselectBounds, Examples) {
  EXPECT_NEAR(postselect_bounds(0.9, 0.5, 10), 0.65132, 1e-5);
  EXPECT_NEAR(postselect_bounds(0.9, 0.5, 2), 0.19, 1e-12);
  EXPECT_LT(postselect_bounds(1.0, 1e-9, 5), 1e-40);
  EXPECT_NEAR(postselect_bounds(1.0, 3.0, 2), std::pow(multiphoton_prob(3.0), 2), 1e-15);
}

TEST(RequiredPulses, Examples) {
  EXPECT_EQ(required_pulses_for_nu(1e-9, 0.3279), 64U);
  EXPECT_EQ(required_pulses_for_nu(0.5, std::log(2.0)), 1U);
  EXPECT_THROW(required_pulses_for_nu(0.0, 0.3), std::invalid_argument);
  EXPECT_THROW(required_pulses_for_nu(1e-3, 0.0), std::invalid_argument);
  EXPECT_THROW(required_pulses(1e-3, 0.05, 0.5), std::invalid_argument);
}

TEST(RequiredPulses, RoundTripIsMinimal) {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const double a2 = 0.01 + 0.99 * rng.uniform01();
    const double p2 = multiphoton_prob(a2);
    const double eta = p2 + 0.05 + (1.0 - p2 - 0.05) * rng.uniform01();
    const double target = std::pow(10.0, -1.0 - 11.0 * rng.uniform01());
    const auto n = required_pulses(target, eta, a2);
    EXPECT_LE(gadget_bounds(eta, a2, n).eps, target);
    if (n > 1) {
      EXPECT_GT(gadget_bounds(eta, a2, n - 1).eps, target);
    }
  }
}

TEST(Dominance, AbortAndErrorRatesStayBelowBounds) {
  HonestServer server;
  for (auto [eta, a2, n] : {std::tuple{0.7, 0.2, 20U}, std::tuple{0.9, 0.5, 20U}, std::tuple{0.8, 0.3, 40U}}) {
    const auto r = gadget_bounds(eta, a2, n);
    const std::size_t runs = 20000;
    std::size_t aborts = 0;
    for (std::size_t i = 0; i < runs; ++i) {
      auto rng = Rng::stream(1234, i);
      PureState s;
      s.add_plus("s");
      aborts += protocol3_gadget(s, "s", Angle8{1}, "p", {a2, n, r.t, eta}, server, rng).aborted;
    }
    const double slack_cor = 4 * std::sqrt(r.eps_cor * (1 - r.eps_cor) / runs);
    EXPECT_LE(static_cast<double>(aborts) / runs, r.eps_cor + slack_cor) << eta << " " << a2 << " " << n;
    const auto err = simulator2_error_rate(a2, n, r.t, runs, 4321);
    const double slack_sec = 4 * std::sqrt(r.eps_sec * (1 - r.eps_sec) / runs);
    EXPECT_LE(err.rate(), r.eps_sec + slack_sec) << eta << " " << a2 << " " << n;
  }
}
