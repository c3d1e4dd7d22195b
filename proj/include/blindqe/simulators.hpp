#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "blindqe/emitter.hpp"
#include "blindqe/extender.hpp"
#include "blindqe/graph.hpp"
#include "blindqe/pulses.hpp"
#include "blindqe/qstate.hpp"
#include "blindqe/rng.hpp"
#include "blindqe/server.hpp"
#include "blindqe/views.hpp"

namespace blindqe {

// ---------------------------------------------------------------------------
// Graph extender simulator

/// Emulates one blind extension per vertex using only an oracle copy of
/// |G(theta)>: the CZ layer is undone once, then each call CNOTs the server's
/// qubit onto the oracle qubit of v, Z-measures the oracle qubit (bit b) and
/// emits a fresh |0> photon by CNOT from the server's qubit.
class Simulator1Extender final : public Extender {
 public:
  /// Moves the oracle state into `state` (labels prefixed "~o") and strips its edges.
  Simulator1Extender(const Graph& g, const PureState& oracle, PureState& state) : g_(g) {
    for (Vertex v = 0; v < g.size(); ++v) {
      if (!oracle.contains(g.label(v))) throw std::invalid_argument("oracle state lacks vertex " + g.label(v));
    }
    std::vector<Label> order;
    for (Vertex v = 0; v < g.size(); ++v) order.push_back(g.label(v));
    if (oracle.num_qubits() != g.size()) throw std::invalid_argument("oracle state must hold exactly the graph");
    const auto amps = oracle.amplitudes_in_order(order);
    // Append the oracle register to `state`: |state> (x) |oracle>.
    std::vector<Label> labels = state.labels();
    for (const auto& l : order) labels.push_back(oracle_label(l));
    std::vector<Amplitude> joint(state.amplitudes().size() * amps.size());
    const auto base = state.amplitudes();
    for (std::size_t j = 0; j < amps.size(); ++j)
      for (std::size_t i = 0; i < base.size(); ++i) joint[j * base.size() + i] = base[i] * amps[j];
    state = PureState::from_amplitudes(std::move(labels), std::move(joint));
    for (const auto& [a, b] : g.edges) state.apply_cz(oracle_label(g.label(a)), oracle_label(g.label(b)));
  }

  ExtensionOutput extend(PureState& state, const Label& spin, Vertex v, Angle8, const Label& photon,
                         RandomSource& rng) override {
    const Label o = oracle_label(g_.label(v));
    state.apply_cnot(spin, o);
    ExtensionOutput out;
    out.b = measure_qubit(state, o, Basis::z(), rng);
    emit_photon(state, spin, Angle8::zero(), photon);
    return out;
  }

  static Label oracle_label(const Label& vertex) { return "~o" + vertex; }

 private:
  const Graph& g_;
};

// ---------------------------------------------------------------------------
// GHZ gadget: real view and Simulator 2

/// A malicious server's situation: photon count per pulse and the set S it
/// reports (0-based pulse indices).
struct GadgetViewCase {
  std::vector<std::uint64_t> k;
  std::vector<std::size_t> S;
  double t = 0.0;
};

/// Honest client facing a server that resolved photon numbers `k`: the server
/// holds |+_{theta_i}> for single photons, learns theta_i for k_i >= 2, then
/// receives Abort or (theta_bar, m_x).
inline BranchView real_gadget_branch(Angle8 theta, const GadgetViewCase& c, RandomSource& rng) {
  const std::size_t n = c.k.size();
  std::vector<Angle8> thetas(n);
  for (auto& th : thetas) th = rng.uniform_angle();
  BranchView bv;
  for (std::size_t i = 0; i < n; ++i)
    if (c.k[i] == 1) {
      bv.state.add_qubit(detail::pulse_qubit(i), 1.0, std::polar(1.0, thetas[i].radians()));
      bv.server_qubits.push_back(detail::pulse_qubit(i));
    }
  if (static_cast<double>(c.S.size()) <= c.t) {
    bv.key = detail::view_key("abort", c.k, thetas, "");
    return bv;
  }
  const bool m = rng.fair_bit();
  Angle8 theta_bar = theta.signed_by(m);
  for (auto i : c.S) theta_bar -= thetas[i];
  bv.key = detail::view_key("corr", c.k, thetas,
                            "tb=" + std::to_string(theta_bar.value()) + ";m=" + std::to_string(m));
  return bv;
}

struct SimulatorRun {
  bool error = false;
  bool aborted = false;
  BranchView view;
};

/// Simulator 2. `oracle` is the single qubit |+_theta> handed over by the
/// ideal resource; the simulator never sees theta itself. With `materialise`
/// false only the Abort/Error decision is computed (Monte Carlo mode).
inline SimulatorRun simulator2_gadget(const GadgetViewCase& c, const PureState& oracle, RandomSource& rng,
                                      bool materialise = true) {
  const std::size_t n = c.k.size();
  for (auto i : c.S)
    if (i >= n) throw std::out_of_range("S names a pulse outside the batch");
  SimulatorRun run;
  if (static_cast<double>(c.S.size()) <= c.t) run.aborted = true;
  std::vector<std::size_t> ones, zeros;
  for (auto i : c.S) {
    if (c.k[i] == 1) ones.push_back(i);
    if (c.k[i] == 0) zeros.push_back(i);
  }
  run.error = !run.aborted && ones.empty() && zeros.empty();
  if (!materialise || run.error) {
    if (run.error) run.view.key = "error";
    return run;
  }

  if (oracle.num_qubits() != 1) throw std::invalid_argument("oracle must be a single qubit");
  PureState& st = run.view.state;
  st = oracle;
  st.rename(st.labels()[0], "~o");
  std::vector<Angle8> thetas(n);
  for (auto& th : thetas) th = rng.uniform_angle();
  auto half = [](std::size_t i) { return "~e" + std::to_string(i); };
  for (std::size_t i = 0; i < n; ++i)
    if (c.k[i] == 1) {
      st.add_plus(half(i));
      st.add_qubit(detail::pulse_qubit(i));
      st.apply_cnot(half(i), detail::pulse_qubit(i));
      run.view.server_qubits.push_back(detail::pulse_qubit(i));
    }
  if (run.aborted) {
    run.view.key = detail::view_key("abort", c.k, thetas, "");
    return run;
  }

  const auto& pool = ones.empty() ? zeros : ones;
  const std::size_t s = pool[static_cast<std::size_t>(rng.uniform_below(pool.size()))];
  Angle8 theta_bar{};
  for (auto i : c.S) {
    if (i == s) continue;
    bool m_i = false;
    if (c.k[i] == 1) m_i = measure_qubit(st, half(i), Basis::rotated(-thetas[i]), rng);
    theta_bar -= thetas[i].plus_pi_if(m_i);
  }
  bool m_sx = false, m_sz = false;
  if (c.k[s] == 1) {
    st.apply_1q("~o", mat2::rz(thetas[s].radians()));
    st.apply_cnot("~o", half(s));
    m_sz = measure_qubit(st, "~o", Basis::x(), rng);
    m_sx = measure_qubit(st, half(s), Basis::z(), rng);
  } else {
    m_sx = rng.fair_bit();
    m_sz = rng.fair_bit();
  }
  theta_bar -= thetas[s].signed_by(m_sx).plus_pi_if(m_sz);
  run.view.key = detail::view_key("corr", c.k, thetas,
                                  "tb=" + std::to_string(theta_bar.value()) + ";m=" + std::to_string(m_sx));
  return run;
}

// ---------------------------------------------------------------------------
// Post-selected gadget: real view and Simulator 3

inline BranchView real_postselected_branch(Angle8 theta, const std::vector<std::uint64_t>& k, RandomSource& rng) {
  const std::size_t n = k.size();
  if (n == 0) throw std::invalid_argument("need at least one pulse");
  std::vector<Angle8> thetas(n);
  Angle8 sum{};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    thetas[i] = rng.uniform_angle();
    sum += thetas[i];
  }
  const bool m = rng.fair_bit();
  thetas[n - 1] = theta.signed_by(m) - sum;
  BranchView bv;
  for (std::size_t i = 0; i < n; ++i)
    if (k[i] == 1) {
      bv.state.add_qubit(detail::pulse_qubit(i), 1.0, std::polar(1.0, thetas[i].radians()));
      bv.server_qubits.push_back(detail::pulse_qubit(i));
    }
  bv.key = detail::view_key("ps", k, thetas, "m=" + std::to_string(m));
  return bv;
}

/// Simulator 3; Error iff no pulse holds fewer than two photons.
inline SimulatorRun simulator3_postselected(const std::vector<std::uint64_t>& k, const PureState& oracle,
                                            RandomSource& rng, bool materialise = true) {
  const std::size_t n = k.size();
  if (n == 0) throw std::invalid_argument("need at least one pulse");
  SimulatorRun run;
  std::vector<std::size_t> ones, zeros;
  for (std::size_t i = 0; i < n; ++i) {
    if (k[i] == 1) ones.push_back(i);
    if (k[i] == 0) zeros.push_back(i);
  }
  if (ones.empty() && zeros.empty()) {
    run.error = true;
    run.view.key = "error";
    return run;
  }
  if (!materialise) return run;

  if (oracle.num_qubits() != 1) throw std::invalid_argument("oracle must be a single qubit");
  const auto& pool = ones.empty() ? zeros : ones;
  const std::size_t s = pool[static_cast<std::size_t>(rng.uniform_below(pool.size()))];
  PureState& st = run.view.state;
  st = oracle;
  st.rename(st.labels()[0], "~o");
  const bool m = rng.fair_bit();
  if (m) st.apply_1q("~o", mat2::pauli_x());
  std::vector<Angle8> thetas(n);
  Angle8 sum{};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    thetas[i] = rng.uniform_angle();
    sum += thetas[i];
  }
  thetas[n - 1] = -sum;
  for (std::size_t i = 0; i < n; ++i) {
    if (k[i] != 1) continue;
    if (i == s) {
      st.apply_1q("~o", mat2::rz(thetas[s].radians()));
      st.rename("~o", detail::pulse_qubit(i));
    } else {
      st.add_qubit(detail::pulse_qubit(i), 1.0, std::polar(1.0, thetas[i].radians()));
    }
    run.view.server_qubits.push_back(detail::pulse_qubit(i));
  }
  run.view.key = detail::view_key("ps", k, thetas, "m=" + std::to_string(m));
  return run;
}

inline PureState rotated_plus(Angle8 theta, const Label& label = "oracle") {
  PureState s;
  s.add_qubit(label, 1.0, std::polar(1.0, theta.radians()));
  return s;
}

// ---------------------------------------------------------------------------
// Monte Carlo error rates

struct RateEstimate {
  std::size_t runs = 0;
  std::size_t hits = 0;
  double rate() const { return runs == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(runs); }
};

/// Simulator 2 against the distinguisher that reports exactly the
/// multi-photon pulses, so Error happens iff more than t pulses leak.
inline RateEstimate simulator2_error_rate(double alpha_sq, std::size_t n, double t, std::size_t runs,
                                          std::uint64_t seed) {
  check_intensity(alpha_sq);
  MultiphotonReporter distinguisher;
  RateEstimate est{runs, 0};
  const PureState unused;
  for (std::size_t r = 0; r < runs; ++r) {
    auto rng = Rng::stream(seed, r);
    std::vector<PulseRecord> pulses;
    GadgetViewCase c;
    for (std::size_t i = 0; i < n; ++i) {
      pulses.push_back(sample_pulse(alpha_sq, Angle8{}, rng, i));
      c.k.push_back(pulses.back().k);
    }
    c.S = distinguisher.choose_set(pulses, std::vector<bool>(n, true));
    c.t = t;
    est.hits += simulator2_gadget(c, unused, rng, false).error;
  }
  return est;
}

inline RateEstimate simulator3_error_rate(double alpha_sq, std::size_t n, std::size_t runs, std::uint64_t seed) {
  check_intensity(alpha_sq);
  RateEstimate est{runs, 0};
  const PureState unused;
  for (std::size_t r = 0; r < runs; ++r) {
    auto rng = Rng::stream(seed, r);
    std::vector<std::uint64_t> k(n);
    for (auto& x : k) x = sample_poisson(rng, alpha_sq);
    est.hits += simulator3_postselected(k, unused, rng, false).error;
  }
  return est;
}

}  // namespace blindqe
