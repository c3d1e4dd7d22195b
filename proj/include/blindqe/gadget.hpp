#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blindqe/angle.hpp"
#include "blindqe/emitter.hpp"
#include "blindqe/pulses.hpp"
#include "blindqe/qstate.hpp"
#include "blindqe/rng.hpp"
#include "blindqe/server.hpp"
#include "blindqe/transcript.hpp"

namespace blindqe {

struct GadgetParams {
  double alpha_sq = 0.5;
  std::size_t n = 100;
  double t = 0.0;  // abort iff |S| <= t
  double eta1 = 0.9;

  void validate() const {
    if (!(alpha_sq > 0.0) || !std::isfinite(alpha_sq)) throw std::invalid_argument("alpha_sq must be > 0");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(t >= 0.0 && t <= static_cast<double>(n))) throw std::invalid_argument("threshold t must lie in [0, n]");
    if (!(eta1 >= 0.0 && eta1 <= 1.0)) throw std::invalid_argument("eta1 must lie in [0, 1]");
  }

  /// Threshold at the correctness/security equilibrium, t = n (eta1 + p2) / 2.
  static GadgetParams with_default_threshold(double alpha_sq, std::size_t n, double eta1) {
    GadgetParams p{alpha_sq, n, 0.0, eta1};
    p.t = 0.5 * (eta1 + multiphoton_prob(alpha_sq)) * static_cast<double>(n);
    return p;
  }
};

struct GadgetResult {
  bool aborted = false;
  bool m_x = false;
  Angle8 theta_bar{};
  bool parity = false;  // server-side parity b of the measured photons in S
  std::size_t set_size = 0;
  std::vector<PulseRecord> pulses;
};

/// Threshold GHZ gadget run on `spin` inside `state`. On success photon
/// `photon0` holds RZ((-1)^{m_x} theta) CNOT(rho_spin (x) |0><0|) together with
/// the spin. Emitted pulse photons are X-measured as soon as they exist.
/// With `apply_correction` false the final RZ(theta_bar + b pi) is left to the
/// caller (merged into a later measurement angle).
inline GadgetResult protocol3_gadget(PureState& state, const Label& spin, Angle8 theta, const Label& photon0,
                                     const GadgetParams& params, ServerPolicy& server, RandomSource& rng,
                                     Transcript* transcript = nullptr, std::size_t round = 0,
                                     bool apply_correction = true) {
  params.validate();
  const EmitterModel emitter{params.eta1, spin};
  GadgetResult r;
  std::vector<Angle8> thetas(params.n);
  for (auto& th : thetas) th = rng.uniform_angle();

  std::vector<bool> detected(params.n, false);
  std::vector<bool> outcome(params.n, false);
  const Label tmp = photon0 + "~pulse";
  for (std::size_t i = 0; i < params.n; ++i) {
    r.pulses.push_back(sample_pulse(params.alpha_sq, thetas[i], rng, i));
    if (transcript) transcript->client(round, msg::PulseSent{i, server_view(r.pulses.back())});
    if (!sample_emission_success(emitter, rng)) continue;
    emit_photon(state, spin, thetas[i], tmp);
    outcome[i] = measure_qubit(state, tmp, Basis::x(), rng);
    detected[i] = true;
  }
  emit_photon(state, spin, Angle8::zero(), photon0);

  const auto set = server.choose_set(r.pulses, detected);
  if (transcript) transcript->server(round, msg::SetS{set});
  r.set_size = set.size();
  for (auto i : set) {
    if (i >= params.n) throw std::out_of_range("server reported a pulse index outside the batch");
    r.parity ^= detected[i] && outcome[i];
  }
  if (static_cast<double>(set.size()) <= params.t) {
    r.aborted = true;
    if (transcript) transcript->client(round, msg::Abort{});
    return r;
  }
  r.m_x = rng.fair_bit();
  r.theta_bar = theta.signed_by(r.m_x);
  for (auto i : set) r.theta_bar -= thetas[i];
  if (transcript) transcript->client(round, msg::Correction{r.theta_bar, r.m_x});
  if (apply_correction) state.apply_1q(photon0, mat2::rz(r.theta_bar.plus_pi_if(r.parity).radians()));
  return r;
}

struct PostselectedResult {
  bool aborted = false;
  bool m_x = false;
  bool parity = false;
  std::vector<PulseRecord> pulses;
};

/// Post-selected gadget: the last pulse angle pre-compensates the others and
/// any missing photon aborts.
inline PostselectedResult protocol5_postselected(PureState& state, const Label& spin, Angle8 theta,
                                                 const Label& photon0, double alpha_sq, std::size_t n, double eta1,
                                                 RandomSource& rng, Transcript* transcript = nullptr,
                                                 std::size_t round = 0) {
  check_intensity(alpha_sq);
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const EmitterModel emitter{eta1, spin};
  emitter.validate();
  PostselectedResult r;
  std::vector<Angle8> thetas(n);
  Angle8 sum{};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    thetas[i] = rng.uniform_angle();
    sum += thetas[i];
  }
  r.m_x = rng.fair_bit();
  thetas[n - 1] = theta.signed_by(r.m_x) - sum;

  bool lost = false;
  const Label tmp = photon0 + "~pulse";
  for (std::size_t i = 0; i < n; ++i) {
    r.pulses.push_back(sample_pulse(alpha_sq, thetas[i], rng, i));
    if (transcript) transcript->client(round, msg::PulseSent{i, server_view(r.pulses.back())});
    if (!sample_emission_success(emitter, rng)) {
      lost = true;
      continue;
    }
    emit_photon(state, spin, thetas[i], tmp);
    r.parity ^= measure_qubit(state, tmp, Basis::x(), rng);
  }
  if (transcript) transcript->client(round, msg::CorrectionBit{r.m_x});
  emit_photon(state, spin, Angle8::zero(), photon0);
  if (lost) {
    r.aborted = true;
    if (transcript) transcript->server(round, msg::Abort{});
    return r;
  }
  if (r.parity) state.apply_1q(photon0, mat2::pauli_z());
  return r;
}

}  // namespace blindqe
