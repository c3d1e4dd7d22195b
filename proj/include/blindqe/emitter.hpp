#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "blindqe/angle.hpp"
#include "blindqe/qstate.hpp"
#include "blindqe/rng.hpp"

namespace blindqe {

/// Single-photon generation probability of one emitter per client pulse.
struct EmitterModel {
  double eta1 = 1.0;
  Label id = "q";

  void validate() const {
    if (!(eta1 >= 0.0 && eta1 <= 1.0)) throw std::invalid_argument("eta1 must lie in [0, 1]");
  }
};

/// Rotated emission E_qe(theta): |0>|L> + e^{i theta}|1>|R> branch structure.
/// The phase sits on the new photon.
inline void emit_photon(PureState& state, const Label& spin, Angle8 theta, const Label& new_photon) {
  (void)state.index_of(spin);
  state.add_qubit(new_photon);
  state.apply_cnot(spin, new_photon);
  if (theta != Angle8::zero()) state.apply_1q(new_photon, mat2::rz(theta.radians()));
}

inline void spin_hadamard(PureState& state, const Label& spin) { state.apply_1q(spin, mat2::hadamard()); }

/// Z-measures the spin (outcome c, returned) and applies Z^c to `correction_target`.
inline bool retire_spin(PureState& state, const Label& spin, const Label& correction_target, RandomSource& rng) {
  (void)state.index_of(correction_target);
  const bool c = measure_qubit(state, spin, Basis::z(), rng);
  if (c) state.apply_1q(correction_target, mat2::pauli_z());
  return c;
}

inline bool sample_emission_success(const EmitterModel& model, RandomSource& rng) {
  if (model.eta1 >= 1.0) return true;
  if (model.eta1 <= 0.0) return false;
  return rng.bernoulli(model.eta1);
}

inline Label photon_label(const Label& spin, std::size_t index) { return spin + ".p" + std::to_string(index); }

/// Linear cluster of `length` photons from one emitter: emit, H, emit, H, ...
/// then retire the spin onto the last photon. Photons are named prefix0..
inline std::vector<Label> generate_linear_cluster(PureState& state, const Label& spin, std::size_t length,
                                                  const Label& prefix, RandomSource& rng) {
  if (length == 0) throw std::invalid_argument("linear cluster needs at least one photon");
  std::vector<Label> photons;
  state.add_plus(spin);
  for (std::size_t i = 0; i < length; ++i) {
    photons.push_back(prefix + std::to_string(i));
    emit_photon(state, spin, Angle8::zero(), photons.back());
    spin_hadamard(state, spin);
  }
  retire_spin(state, spin, photons.back(), rng);
  return photons;
}

/// rows x cols cluster from `rows` emitters linked by spin-spin CZ, one
/// column per round. Photon (r, c) is named "r,c" to match cluster presets.
inline void generate_2d_cluster(PureState& state, std::size_t rows, std::size_t cols, RandomSource& rng) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("cluster dimensions must be positive");
  auto spin = [](std::size_t r) { return "s" + std::to_string(r); };
  auto photon = [](std::size_t r, std::size_t c) { return std::to_string(r) + "," + std::to_string(c); };
  for (std::size_t r = 0; r < rows; ++r) state.add_plus(spin(r));
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r + 1 < rows; ++r) state.apply_cz(spin(r), spin(r + 1));
    for (std::size_t r = 0; r < rows; ++r) emit_photon(state, spin(r), Angle8::zero(), photon(r, c));
    for (std::size_t r = 0; r < rows; ++r) spin_hadamard(state, spin(r));
  }
  for (std::size_t r = 0; r < rows; ++r) retire_spin(state, spin(r), photon(r, cols - 1), rng);
}

}  // namespace blindqe
