#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blindqe/angle.hpp"
#include "blindqe/enumerate.hpp"
#include "blindqe/rng.hpp"

namespace blindqe {

using Amplitude = std::complex<double>;
using Label = std::string;
using Mat2 = std::array<Amplitude, 4>;  // row-major

inline constexpr std::size_t kMaxRegisterQubits = 20;

namespace mat2 {

inline Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
inline Mat2 hadamard() {
  const double r = std::numbers::sqrt2 / 2.0;
  return {r, r, r, -r};
}
inline Mat2 pauli_x() { return {0.0, 1.0, 1.0, 0.0}; }
inline Mat2 pauli_y() { return {0.0, Amplitude{0.0, -1.0}, Amplitude{0.0, 1.0}, 0.0}; }
inline Mat2 pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }
inline Mat2 phase_s() { return {1.0, 0.0, 0.0, Amplitude{0.0, 1.0}}; }
/// diag(1, e^{i theta}); equals exp(-i theta Z / 2) up to a global phase.
inline Mat2 rz(double radians) { return {1.0, 0.0, 0.0, std::polar(1.0, radians)}; }

}  // namespace mat2

enum class GateKind { H, X, Y, Z, S, RZ, CZ, CNOT };

struct Gate {
  GateKind kind;
  double radians = 0.0;

  static Gate h() { return {GateKind::H}; }
  static Gate x() { return {GateKind::X}; }
  static Gate y() { return {GateKind::Y}; }
  static Gate z() { return {GateKind::Z}; }
  static Gate s() { return {GateKind::S}; }
  static Gate rz(double r) { return {GateKind::RZ, r}; }
  static Gate rz(Angle8 a) { return {GateKind::RZ, a.radians()}; }
  static Gate cz() { return {GateKind::CZ}; }
  static Gate cnot() { return {GateKind::CNOT}; }

  std::size_t arity() const { return kind == GateKind::CZ || kind == GateKind::CNOT ? 2 : 1; }
};

/// Dense state vector over a labelled qubit register.
///
/// Qubit `labels()[k]` is bit k of the amplitude index. Measured or discarded
/// qubits are removed from the register, so labels stay unique and stable.
class PureState {
 public:
  PureState() : amps_{Amplitude{1.0}} {}

  /// |0...0> on the given labels.
  explicit PureState(std::vector<Label> labels) : PureState() {
    for (auto& l : labels) add_qubit(std::move(l));
  }

  static PureState from_amplitudes(std::vector<Label> labels, std::vector<Amplitude> amps) {
    if (amps.size() != (std::size_t{1} << labels.size()))
      throw std::invalid_argument("amplitude count does not match label count");
    PureState s;
    s.labels_ = std::move(labels);
    s.check_labels_unique();
    s.amps_ = std::move(amps);
    s.normalize();
    return s;
  }

  const std::vector<Label>& labels() const { return labels_; }
  std::size_t num_qubits() const { return labels_.size(); }
  std::span<const Amplitude> amplitudes() const { return amps_; }

  bool contains(const Label& l) const { return std::find(labels_.begin(), labels_.end(), l) != labels_.end(); }

  std::size_t index_of(const Label& l) const {
    auto it = std::find(labels_.begin(), labels_.end(), l);
    if (it == labels_.end()) throw std::out_of_range("unknown qubit label '" + l + "'");
    return static_cast<std::size_t>(it - labels_.begin());
  }

  /// Appends a qubit in the (normalised) state a0|0> + a1|1>.
  void add_qubit(Label label, Amplitude a0 = 1.0, Amplitude a1 = 0.0) {
    if (contains(label)) throw std::invalid_argument("qubit label '" + label + "' already in use");
    if (labels_.size() >= kMaxRegisterQubits) throw std::length_error("register cap of 20 qubits exceeded");
    const double n = std::sqrt(std::norm(a0) + std::norm(a1));
    if (n == 0.0) throw std::invalid_argument("zero single-qubit state");
    a0 /= n;
    a1 /= n;
    const std::size_t old = amps_.size();
    amps_.resize(old * 2);
    for (std::size_t i = 0; i < old; ++i) {
      amps_[old + i] = amps_[i] * a1;
      amps_[i] *= a0;
    }
    labels_.push_back(std::move(label));
  }

  void add_plus(Label label) { add_qubit(std::move(label), 1.0, 1.0); }

  void rename(const Label& from, Label to) {
    if (from == to) return;
    if (contains(to)) throw std::invalid_argument("qubit label '" + to + "' already in use");
    labels_[index_of(from)] = std::move(to);
  }

  void apply_1q(const Label& target, const Mat2& m) {
    const std::size_t bit = std::size_t{1} << index_of(target);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (i & bit) continue;
      const Amplitude a = amps_[i];
      const Amplitude b = amps_[i | bit];
      amps_[i] = m[0] * a + m[1] * b;
      amps_[i | bit] = m[2] * a + m[3] * b;
    }
  }

  void apply_cz(const Label& a, const Label& b) {
    const auto [ba, bb] = two_bits(a, b);
    for (std::size_t i = 0; i < amps_.size(); ++i)
      if ((i & ba) && (i & bb)) amps_[i] = -amps_[i];
  }

  void apply_cnot(const Label& control, const Label& target) {
    const auto [bc, bt] = two_bits(control, target);
    for (std::size_t i = 0; i < amps_.size(); ++i)
      if ((i & bc) && !(i & bt)) std::swap(amps_[i], amps_[i | bt]);
  }

  /// Probability that a computational-basis measurement of `target` gives 1.
  double probability_one(const Label& target) const {
    const std::size_t bit = std::size_t{1} << index_of(target);
    double p = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i)
      if (i & bit) p += std::norm(amps_[i]);
    return p;
  }

  /// Projects `target` onto |outcome>, renormalises and removes the qubit.
  void project_and_remove(const Label& target, bool outcome) {
    const std::size_t k = index_of(target);
    const std::size_t bit = std::size_t{1} << k;
    const std::size_t low = bit - 1;
    std::vector<Amplitude> next(amps_.size() / 2);
    double p = 0.0;
    for (std::size_t j = 0; j < next.size(); ++j) {
      const std::size_t i = (j & low) | ((j & ~low) << 1) | (outcome ? bit : 0);
      next[j] = amps_[i];
      p += std::norm(next[j]);
    }
    if (p <= 1e-14) throw ZeroProbabilityBranch{};
    const double scale = 1.0 / std::sqrt(p);
    for (auto& a : next) a *= scale;
    amps_ = std::move(next);
    labels_.erase(labels_.begin() + static_cast<std::ptrdiff_t>(k));
  }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  /// Amplitudes re-indexed so that `order[k]` is bit k. `order` must be a
  /// permutation of labels().
  std::vector<Amplitude> amplitudes_in_order(std::span<const Label> order) const {
    if (order.size() != labels_.size()) throw std::invalid_argument("label sets differ");
    std::vector<std::size_t> src_bit(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) src_bit[k] = index_of(order[k]);
    std::vector<std::size_t> seen(src_bit);
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) throw std::invalid_argument("label sets differ");
    std::vector<Amplitude> out(amps_.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
      std::size_t i = 0;
      for (std::size_t k = 0; k < order.size(); ++k)
        if (j >> k & 1U) i |= std::size_t{1} << src_bit[k];
      out[j] = amps_[i];
    }
    return out;
  }

 private:
  std::pair<std::size_t, std::size_t> two_bits(const Label& a, const Label& b) const {
    if (a == b) throw std::invalid_argument("two-qubit gate needs distinct targets");
    return {std::size_t{1} << index_of(a), std::size_t{1} << index_of(b)};
  }

  void check_labels_unique() const {
    auto sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("duplicate qubit labels");
    if (labels_.size() > kMaxRegisterQubits) throw std::length_error("register cap of 20 qubits exceeded");
  }

  void normalize() {
    const double n = std::sqrt(norm_squared());
    if (n == 0.0) throw std::invalid_argument("zero state vector");
    for (auto& a : amps_) a /= n;
  }

  std::vector<Label> labels_;
  std::vector<Amplitude> amps_;
};

inline void apply_gate(PureState& state, const Gate& gate, std::span<const Label> targets) {
  if (targets.size() != gate.arity()) throw std::invalid_argument("wrong number of gate targets");
  switch (gate.kind) {
    case GateKind::H: state.apply_1q(targets[0], mat2::hadamard()); break;
    case GateKind::X: state.apply_1q(targets[0], mat2::pauli_x()); break;
    case GateKind::Y: state.apply_1q(targets[0], mat2::pauli_y()); break;
    case GateKind::Z: state.apply_1q(targets[0], mat2::pauli_z()); break;
    case GateKind::S: state.apply_1q(targets[0], mat2::phase_s()); break;
    case GateKind::RZ: state.apply_1q(targets[0], mat2::rz(gate.radians)); break;
    case GateKind::CZ: state.apply_cz(targets[0], targets[1]); break;
    case GateKind::CNOT: state.apply_cnot(targets[0], targets[1]); break;
  }
}

inline void apply_gate(PureState& state, const Gate& gate, std::initializer_list<Label> targets) {
  apply_gate(state, gate, std::span<const Label>{targets.begin(), targets.size()});
}

/// Computational basis, or the X-Y plane basis {|+_delta>, |-_delta>} with
/// outcome 0 meaning |+_delta> = (|0> + e^{i delta}|1>)/sqrt2.
struct Basis {
  enum class Kind { Z, XY } kind = Kind::Z;
  Angle8 angle{};

  static Basis z() { return {Kind::Z, {}}; }
  static Basis x() { return {Kind::XY, Angle8{0}}; }
  static Basis y() { return {Kind::XY, Angle8{2}}; }
  static Basis rotated(Angle8 delta) { return {Kind::XY, delta}; }
};

namespace detail {
inline void rotate_into_z(PureState& state, const Label& target, const Basis& basis) {
  if (basis.kind == Basis::Kind::XY) {
    state.apply_1q(target, mat2::rz(-basis.angle.radians()));
    state.apply_1q(target, mat2::hadamard());
  }
}
inline double clamp_probability(double p) {
  if (p < 1e-13) return 0.0;
  if (p > 1.0 - 1e-13) return 1.0;
  return p;
}
}  // namespace detail

/// Born-rule measurement of `target`; the qubit is removed from `state`.
inline bool measure_qubit(PureState& state, const Label& target, const Basis& basis, RandomSource& rng) {
  detail::rotate_into_z(state, target, basis);
  const bool outcome = rng.bernoulli(detail::clamp_probability(state.probability_one(target)));
  state.project_and_remove(target, outcome);
  return outcome;
}

/// Probability of `outcome` when measuring `target` in `basis`, without collapse.
inline double outcome_probability(const PureState& state, const Label& target, const Basis& basis, bool outcome) {
  PureState copy = state;
  detail::rotate_into_z(copy, target, basis);
  const double p1 = copy.probability_one(target);
  return outcome ? p1 : 1.0 - p1;
}

/// Loses `target`: measure in Z and forget the outcome. Averaged over
/// trajectories this is exactly the partial trace.
inline void discard_qubit(PureState& state, const Label& target, RandomSource& rng) {
  (void)measure_qubit(state, target, Basis::z(), rng);
}

/// |<a|b>|^2 after matching label orders.
inline double fidelity_up_to_phase(const PureState& a, const PureState& b) {
  if (a.num_qubits() != b.num_qubits()) throw std::invalid_argument("fidelity: label sets differ");
  const auto bv = b.amplitudes_in_order(a.labels());
  const auto av = a.amplitudes();
  Amplitude overlap{};
  for (std::size_t i = 0; i < bv.size(); ++i) overlap += std::conj(av[i]) * bv[i];
  return std::min(1.0, std::norm(overlap));
}

}  // namespace blindqe
