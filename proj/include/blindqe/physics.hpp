#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blindqe/pulses.hpp"

namespace blindqe {

/// Square pulse of area Theta driving a two-level emitter with decay rate
/// gamma, at mean photon number alpha_sq.
struct DriveParams {
  double gamma = 1.0;
  double alpha_sq = 1.0;
  double theta = std::numbers::pi;

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be > 0");
    if (!(alpha_sq > 0.0) || !std::isfinite(alpha_sq)) throw std::invalid_argument("alpha_sq must be > 0");
    if (!(theta > 0.0) || !std::isfinite(theta)) throw std::invalid_argument("pulse area Theta must be > 0");
  }

  double tau() const { return theta * theta / (4.0 * gamma * alpha_sq); }
  double omega() const { return 4.0 * gamma * alpha_sq / theta; }
};

/// Excited population at time tau for constant Rabi frequency omega, starting
/// in the ground state. Underdamped, critical and overdamped branches.
inline double excited_population(double gamma, double omega, double tau) {
  if (gamma < 0.0 || omega < 0.0 || tau < 0.0) throw std::invalid_argument("rates and times must be >= 0");
  if (omega == 0.0) return 0.0;
  const double q = gamma / 4.0;
  const double d = omega * omega - q * q;
  double osc;  // cos(l tau) + 3 gamma sin(l tau) / (4 l), continued analytically
  if (d > 1e-12 * omega * omega) {
    const double l = std::sqrt(d);
    osc = std::cos(l * tau) + 3.0 * gamma / (4.0 * l) * std::sin(l * tau);
  } else if (d < -1e-12 * omega * omega) {
    const double k = std::sqrt(-d);
    osc = std::cosh(k * tau) + 3.0 * gamma / (4.0 * k) * std::sinh(k * tau);
  } else {
    osc = 1.0 + 3.0 * gamma / 4.0 * tau;
  }
  const double w2 = omega * omega;
  return w2 / (gamma * gamma + 2.0 * w2) * (1.0 - osc * std::exp(-3.0 * gamma * tau / 4.0));
}

/// Single-photon efficiency: excited population at the end of the pulse.
inline double eta1_analytic(const DriveParams& p) {
  p.validate();
  return excited_population(p.gamma, p.omega(), p.tau());
}

/// The closed form with Omega' = sqrt((gamma/4)^2 + Omega^2) and a
/// 3 gamma / Omega' sine coefficient, kept for comparison only: it disagrees
/// with the master equation.
inline double eta1_plus_form(const DriveParams& p) {
  p.validate();
  const double g = p.gamma, w = p.omega(), tau = p.tau();
  const double wp = std::sqrt(g * g / 16.0 + w * w);
  const double bracket =
      g * g + w * w + w * w * (std::cos(tau * wp) + 3.0 * g / wp * std::sin(tau * wp)) * std::exp(-3.0 * g * tau / 4.0);
  return 1.0 - bracket / (g * g + 2.0 * w * w);
}

/// RK4 integration of the optical Bloch equations
///   ee' = -omega y - gamma ee,  gg' = omega y + gamma ee,
///   x'  = -gamma x / 2,         y'  = -omega (gg - ee) / 2 - gamma y / 2,
/// with rho_eg = x + i y. Returns ee at time tau.
inline double excited_population_rk4(double gamma, double omega, double tau, std::optional<double> dt = {}) {
  if (gamma < 0.0 || omega < 0.0 || tau < 0.0) throw std::invalid_argument("rates and times must be >= 0");
  const double scale = std::max({gamma, omega, 1e-300});
  const double h_req = dt.value_or(1e-4 / scale);
  if (!(h_req > 0.0)) throw std::invalid_argument("step must be > 0");
  if (h_req > 1e-3 / scale) throw std::invalid_argument("step too large for a stable integration (dt > 1e-3 / max(gamma, Omega))");
  if (tau == 0.0) return 0.0;
  const auto steps = static_cast<std::size_t>(std::ceil(tau / h_req));
  const double h = tau / static_cast<double>(steps);
  using S = std::array<double, 4>;  // ee, gg, x, y
  auto f = [&](const S& s) -> S {
    return {-omega * s[3] - gamma * s[0], omega * s[3] + gamma * s[0], -0.5 * gamma * s[2],
            -0.5 * omega * (s[1] - s[0]) - 0.5 * gamma * s[3]};
  };
  auto axpy = [](const S& a, double c, const S& b) {
    S r;
    for (int i = 0; i < 4; ++i) r[i] = a[i] + c * b[i];
    return r;
  };
  S s{0.0, 1.0, 0.0, 0.0};
  for (std::size_t i = 0; i < steps; ++i) {
    const S k1 = f(s);
    const S k2 = f(axpy(s, h / 2, k1));
    const S k3 = f(axpy(s, h / 2, k2));
    const S k4 = f(axpy(s, h, k3));
    for (int j = 0; j < 4; ++j) s[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }
  return s[0];
}

inline double eta1_numeric(const DriveParams& p, std::optional<double> dt = {}) {
  p.validate();
  return excited_population_rk4(p.gamma, p.omega(), p.tau(), dt);
}

struct Eta1Optimum {
  double eta1 = 0.0;
  double theta = 0.0;
  double tau = 0.0;
};

inline constexpr std::size_t kThetaGridPoints = 400;

/// Grid scan over Theta in (0, 2 pi] followed by golden-section refinement.
inline Eta1Optimum maximize_eta1(double alpha_sq, double gamma = 1.0) {
  DriveParams probe{gamma, alpha_sq, 1.0};
  probe.validate();
  auto eta = [&](double th) { return eta1_analytic(DriveParams{gamma, alpha_sq, th}); };
  const double step = 2.0 * std::numbers::pi / static_cast<double>(kThetaGridPoints);
  std::size_t best = 1;
  double best_val = -1.0;
  for (std::size_t i = 1; i <= kThetaGridPoints; ++i) {
    const double v = eta(step * static_cast<double>(i));
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = step * static_cast<double>(best - 1);
  double b = std::min(step * static_cast<double>(best + 1), 2.0 * std::numbers::pi);
  if (a <= 0.0) a = 1e-9;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = eta(c), fd = eta(d);
  while (b - a > 1e-6) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = eta(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = eta(d);
    }
  }
  Eta1Optimum o;
  o.theta = 0.5 * (a + b);
  o.eta1 = eta(o.theta);
  if (best_val > o.eta1) {  // grid point at the 2 pi edge
    o.theta = step * static_cast<double>(best);
    o.eta1 = best_val;
  }
  o.tau = DriveParams{gamma, alpha_sq, o.theta}.tau();
  return o;
}

/// Two-level emitter, or an ideal Lambda emitter with eta1 = coupling * p1.
struct EmitterPhysics {
  enum class Kind { TwoLevel, IdealLambda } kind = Kind::TwoLevel;
  double coupling = 1.0;

  static EmitterPhysics two_level() { return {}; }
  static EmitterPhysics ideal_lambda(double coupling) {
    if (!(coupling > 0.0 && coupling <= 1.0)) throw std::invalid_argument("coupling must lie in (0, 1]");
    return {Kind::IdealLambda, coupling};
  }
};

struct SweepRow {
  double alpha_sq = 0.0;
  double eta1_max = 0.0;
  double theta_star = std::numeric_limits<double>::quiet_NaN();  // two-level only
  double tau_star = std::numeric_limits<double>::quiet_NaN();
  double p1 = 0.0;
  double p2 = 0.0;
  double gap_emitter = 0.0;
  double gap_ideal = 0.0;
};

inline SweepRow sweep_row(double alpha_sq, const EmitterPhysics& model = {}) {
  SweepRow r;
  r.alpha_sq = alpha_sq;
  r.p1 = single_or_more_prob(alpha_sq);
  r.p2 = multiphoton_prob(alpha_sq);
  if (model.kind == EmitterPhysics::Kind::TwoLevel) {
    const auto o = maximize_eta1(alpha_sq);
    r.eta1_max = o.eta1;
    r.theta_star = o.theta;
    r.tau_star = o.tau;
  } else {
    r.eta1_max = model.coupling * r.p1;
  }
  r.gap_emitter = r.eta1_max - r.p2;
  r.gap_ideal = r.p1 - r.p2;
  return r;
}

inline std::vector<SweepRow> security_gap_sweep(const std::vector<double>& alpha_range,
                                                const EmitterPhysics& model = {}) {
  if (alpha_range.empty()) throw std::invalid_argument("empty alpha_sq range");
  std::vector<SweepRow> rows;
  rows.reserve(alpha_range.size());
  for (double a : alpha_range) rows.push_back(sweep_row(a, model));
  return rows;
}

/// Evenly spaced alpha_sq values on [lo, hi].
inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 0) throw std::invalid_argument("need at least one point");
  if (count == 1) return {lo};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

/// Where eta1_max(alpha_sq) - p2(alpha_sq) changes sign, found by bisection.
inline SweepRow gap_crossing(const EmitterPhysics& model = {}, double lo = 0.1, double hi = 10.0, double tol = 1e-9) {
  auto gap = [&](double a) { return sweep_row(a, model).gap_emitter; };
  double glo = gap(lo);
  const double ghi = gap(hi);
  if (!(glo > 0.0) == !(ghi > 0.0))
    throw std::domain_error("security gap does not change sign on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double gm = gap(mid);
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return sweep_row(0.5 * (lo + hi), model);
}

/// Measured (alpha_sq, eta1) pairs from experiments, drawn on the sweep as
/// annotations and never produced by the model.
struct ReferencePoint {
  double alpha_sq;
  double eta1;
};
inline constexpr std::array<ReferencePoint, 2> kExperimentalPoints{{{3.8, 0.62}, {8.6, 0.81}}};

}  // namespace blindqe
