#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "blindqe/pulses.hpp"

namespace blindqe {

enum class TailSide { Lower, Upper };

namespace detail {
inline double exp_clamped(double log_value) { return log_value >= 0.0 ? 1.0 : std::exp(log_value); }
inline void check_eta1(double eta1) {
  if (!(eta1 >= 0.0 && eta1 <= 1.0)) throw std::invalid_argument("eta1 must lie in [0, 1]");
}
}  // namespace detail

/// exp(-2 (p - k/n)^2 n): bound on Pr[X <= k] (lower) or Pr[X >= k] (upper)
/// for X ~ Bin(n, p).
inline double hoeffding_tail(std::size_t n, double p, double k, TailSide side) {
  if (n == 0) throw std::invalid_argument("hoeffding_tail: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("hoeffding_tail: p must lie in [0, 1]");
  const double dn = static_cast<double>(n);
  const double mean = p * dn;
  const double slack = 1e-12 * std::max(1.0, dn);
  if (side == TailSide::Lower && k > mean + slack)
    throw std::invalid_argument("hoeffding_tail: lower tail needs k <= n p");
  if (side == TailSide::Upper && k < mean - slack)
    throw std::invalid_argument("hoeffding_tail: upper tail needs k >= n p");
  const double d = p - k / dn;
  return std::exp(-2.0 * d * d * dn);
}

struct BoundReport {
  double alpha_sq = 0.0;
  double eta1 = 0.0;
  double p2 = 0.0;
  std::size_t n = 0;
  double t = 0.0;
  double nu = 0.0;
  double eps_cor = 1.0;
  double eps_sec = 1.0;
  double eps = 1.0;
  // natural logs of the above; finite where the plain values underflow
  double log_eps_cor = 0.0;
  double log_eps_sec = 0.0;
  double log_eps = 0.0;
};

/// Correctness/security of the threshold gadget. With `t` omitted the
/// threshold sits at the equilibrium t = n (eta1 + p2) / 2 where both bounds
/// equal exp(-nu n), nu = (eta1 - p2)^2 / 2.
inline BoundReport gadget_bounds(double eta1, double alpha_sq, std::size_t n, std::optional<double> t = {}) {
  detail::check_eta1(eta1);
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  BoundReport r;
  r.alpha_sq = alpha_sq;
  r.eta1 = eta1;
  r.p2 = multiphoton_prob(alpha_sq);
  r.n = n;
  const double dn = static_cast<double>(n);
  const double gap = eta1 - r.p2;
  r.nu = 0.5 * gap * gap;
  if (!t) {
    if (gap < 0.0)
      throw std::invalid_argument("eta1 = " + std::to_string(eta1) + " is below p2 = " + std::to_string(r.p2) +
                                  ": no threshold gives amplification");
    r.t = 0.5 * (eta1 + r.p2) * dn;
    r.log_eps_cor = r.log_eps_sec = -r.nu * dn;
  } else {
    if (!(*t >= 0.0 && *t <= dn)) throw std::invalid_argument("threshold t must lie in [0, n]");
    r.t = *t;
    const double f = *t / dn;
    r.log_eps_cor = f <= eta1 ? -2.0 * (eta1 - f) * (eta1 - f) * dn : 0.0;
    r.log_eps_sec = f >= r.p2 ? -2.0 * (f - r.p2) * (f - r.p2) * dn : 0.0;
  }
  r.log_eps = std::max(r.log_eps_cor, r.log_eps_sec);
  r.eps_cor = detail::exp_clamped(r.log_eps_cor);
  r.eps_sec = detail::exp_clamped(r.log_eps_sec);
  r.eps = detail::exp_clamped(r.log_eps);
  return r;
}

struct ComposedBounds {
  double bdqc = 1.0;
  double log_bdqc = 0.0;
  std::optional<double> sdqc;  // needs N and an externally sourced eps_S
};

/// Blind computation on |V| vertices costs |V| gadgets; verified computation
/// repeats that N times on top of the verification error eps_S.
inline ComposedBounds composed_bounds(const BoundReport& report, std::size_t V, std::optional<std::size_t> N = {},
                                      std::optional<double> eps_S = {}) {
  if (V == 0) throw std::invalid_argument("V must be >= 1");
  ComposedBounds c;
  c.log_bdqc = std::min(0.0, std::log(static_cast<double>(V)) + report.log_eps);
  c.bdqc = detail::exp_clamped(c.log_bdqc);
  if (N && eps_S) {
    if (*N == 0) throw std::invalid_argument("N must be >= 1");
    if (!(*eps_S >= 0.0 && *eps_S <= 1.0)) throw std::invalid_argument("eps_S must lie in [0, 1]");
    const double log_rep = std::log(static_cast<double>(*N) * static_cast<double>(V)) + report.log_eps;
    c.sdqc = std::min(1.0, detail::exp_clamped(log_rep) + *eps_S);
  }
  return c;
}

/// max(1 - eta1^n, p2^n).
inline double postselect_bounds(double eta1, double alpha_sq, std::size_t n) {
  detail::check_eta1(eta1);
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  const double dn = static_cast<double>(n);
  const double loss = -std::expm1(dn * std::log1p(eta1 - 1.0));
  const double leak = std::pow(multiphoton_prob(alpha_sq), dn);
  return std::max(loss, leak);
}

/// Smallest n with exp(-nu n) <= target_eps.
inline std::size_t required_pulses_for_nu(double target_eps, double nu) {
  if (!(target_eps > 0.0 && target_eps < 1.0)) throw std::invalid_argument("target eps must lie in (0, 1)");
  if (!(nu > 0.0)) throw std::invalid_argument("no positive gap between eta1 and p2");
  const double x = std::log(1.0 / target_eps) / nu;
  if (x > 1e15) throw std::overflow_error("required pulse count out of range");
  auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(x)));
  // guard the ceiling against rounding in either direction
  while (n > 1 && -nu * static_cast<double>(n - 1) <= std::log(target_eps)) --n;
  while (-nu * static_cast<double>(n) > std::log(target_eps)) ++n;
  return n;
}

inline std::size_t required_pulses(double target_eps, double eta1, double alpha_sq) {
  detail::check_eta1(eta1);
  const double gap = eta1 - multiphoton_prob(alpha_sq);
  if (!(gap > 0.0)) throw std::invalid_argument("no positive gap between eta1 and p2");
  return required_pulses_for_nu(target_eps, 0.5 * gap * gap);
}

}  // namespace blindqe
