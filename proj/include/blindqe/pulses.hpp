#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "blindqe/angle.hpp"
#include "blindqe/rng.hpp"

namespace blindqe {

struct PulseRecord {
  std::uint64_t k = 0;
  Angle8 theta{};
  std::size_t index = 0;
};

/// What a server with a photon-number-resolving QND measurement learns from
/// one pulse. A single photon hands over |+_theta>; two or more photons are
/// treated as a full classical leak of theta.
struct LeakView {
  enum class Kind { Nothing, SingleQubit, FullLeak };
  Kind kind = Kind::Nothing;
  Angle8 theta{};  // meaningful to the server only for FullLeak

  static LeakView nothing() { return {Kind::Nothing, {}}; }
  static LeakView single_qubit(Angle8 t) { return {Kind::SingleQubit, t}; }
  static LeakView full_leak(Angle8 t) { return {Kind::FullLeak, t}; }

  bool operator==(const LeakView&) const = default;
};

inline const char* to_string(LeakView::Kind k) {
  switch (k) {
    case LeakView::Kind::Nothing: return "nothing";
    case LeakView::Kind::SingleQubit: return "single_qubit";
    case LeakView::Kind::FullLeak: return "full_leak";
  }
  return "?";
}

inline void check_intensity(double alpha_sq) {
  if (!(alpha_sq >= 0.0) || !std::isfinite(alpha_sq)) throw std::invalid_argument("alpha_sq must be >= 0");
}

inline PulseRecord sample_pulse(double alpha_sq, Angle8 theta, RandomSource& rng, std::size_t index = 0) {
  check_intensity(alpha_sq);
  return {sample_poisson(rng, alpha_sq), theta, index};
}

/// Pr[k = j] for k ~ Poisson(alpha_sq).
inline double poisson_pmf(double alpha_sq, std::uint64_t j) {
  check_intensity(alpha_sq);
  if (alpha_sq == 0.0) return j == 0 ? 1.0 : 0.0;
  const double x = static_cast<double>(j);
  return std::exp(x * std::log(alpha_sq) - alpha_sq - std::lgamma(x + 1.0));
}

/// p_{alpha,1} = Pr[k >= 1].
inline double single_or_more_prob(double alpha_sq) {
  check_intensity(alpha_sq);
  return -std::expm1(-alpha_sq);
}

/// p_{alpha,2} = Pr[k >= 2] = 1 - e^{-x} - x e^{-x}.
inline double multiphoton_prob(double alpha_sq) {
  check_intensity(alpha_sq);
  // Series form for small x avoids cancellation; both agree to ~1e-16 at the switch.
  if (alpha_sq < 1e-3) {
    const double x = alpha_sq;
    return x * x * (0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0);
  }
  return -std::expm1(-alpha_sq) - alpha_sq * std::exp(-alpha_sq);
}

inline LeakView server_view(const PulseRecord& record) {
  if (record.k == 0) return LeakView::nothing();
  if (record.k == 1) return LeakView::single_qubit(record.theta);
  return LeakView::full_leak(record.theta);
}

}  // namespace blindqe
