#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "blindqe/emitter.hpp"
#include "blindqe/extender.hpp"
#include "blindqe/graph.hpp"
#include "blindqe/qstate.hpp"
#include "blindqe/rng.hpp"

namespace blindqe {

using EmitterAssignment = std::vector<std::vector<Vertex>>;

/// Single emitter walking the vertices in measurement order (valid for paths).
inline EmitterAssignment single_emitter(const Graph& g) { return {g.order}; }

/// How each edge of the graph is produced by the emitter schedule.
struct LinkPlan {
  std::vector<std::size_t> emitter_of;  // per vertex
  /// For each vertex v, the earlier vertices w (other emitters) linked by a
  /// spin-spin CZ while v is being generated.
  std::vector<std::vector<Vertex>> spin_links;
};

/// Checks an emitter assignment against the graph and the generation order.
/// Consecutive vertices of one emitter must be adjacent; every other edge
/// (v, w), w generated first, needs w to be the latest vertex of its emitter
/// when v is generated, so that a spin-spin CZ can create it.
inline LinkPlan plan_links(const Graph& g, const EmitterAssignment& emitters) {
  g.validate();
  const auto rank = g.rank();
  LinkPlan plan{std::vector<std::size_t>(g.size(), emitters.size()), std::vector<std::vector<Vertex>>(g.size())};
  std::vector<std::size_t> position(g.size());
  for (std::size_t q = 0; q < emitters.size(); ++q) {
    if (emitters[q].empty()) throw std::invalid_argument("emitter " + std::to_string(q) + " has no vertices");
    for (std::size_t i = 0; i < emitters[q].size(); ++i) {
      const Vertex v = emitters[q][i];
      if (v >= g.size()) throw std::invalid_argument("emitter assignment names an unknown vertex");
      if (plan.emitter_of[v] != emitters.size())
        throw std::invalid_argument("vertex " + g.label(v) + " is assigned to two emitters");
      plan.emitter_of[v] = q;
      position[v] = i;
      if (i > 0) {
        const Vertex prev = emitters[q][i - 1];
        if (!g.has_edge(prev, v))
          throw std::invalid_argument("consecutive emitter vertices " + g.label(prev) + ", " + g.label(v) +
                                      " are not adjacent");
        if (rank[prev] > rank[v])
          throw std::invalid_argument("emitter " + std::to_string(q) + " visits its vertices against the order");
      }
    }
  }
  for (Vertex v = 0; v < g.size(); ++v)
    if (plan.emitter_of[v] == emitters.size()) throw std::invalid_argument("vertex " + g.label(v) + " has no emitter");

  // Replay the schedule and record, for every emitter, its latest vertex.
  std::vector<std::optional<Vertex>> latest(emitters.size());
  for (const Vertex v : g.order) {
    const std::size_t q = plan.emitter_of[v];
    for (const Vertex w : g.neighbours(v)) {
      if (rank[w] > rank[v]) continue;
      const std::size_t r = plan.emitter_of[w];
      if (r == q) {
        if (position[w] + 1 != position[v])
          throw std::invalid_argument("edge " + g.label(w) + "-" + g.label(v) +
                                      " joins non-consecutive vertices of one emitter");
        continue;
      }
      if (latest[r] != w)
        throw std::invalid_argument("edge " + g.label(w) + "-" + g.label(v) + " needs emitter " + std::to_string(r) +
                                    " to still sit at " + g.label(w));
      plan.spin_links[v].push_back(w);
    }
    latest[q] = v;
  }
  return plan;
}

struct RspOptions {
  /// Additional E_qe emissions per vertex (n_v); empty means none.
  std::vector<std::size_t> extra_emissions;
};

struct RspResult {
  bool aborted = false;
  PureState state;
  std::vector<bool> b;        // per vertex, from the extender
  std::vector<bool> c;        // per emitter, spin retirement outcomes
  std::vector<bool> d;        // per vertex, parity of the extra-qubit outcomes
  /// Corrections owed on vertex qubits when the extender defers them: measure
  /// vertex v at delta + client_shift[v] + server_flip[v] pi instead of delta.
  std::vector<Angle8> client_shift;
  std::vector<bool> server_flip;
};

inline Label spin_label(std::size_t q) { return "~spin" + std::to_string(q); }

/// Blind graph state preparation from one extender call per vertex. The
/// returned state holds exactly one qubit per vertex, labelled by the vertex
/// name. Each emitter's Hadamard is applied lazily, right before its next use
/// or its retirement; nothing else touches that spin in between.
inline RspResult protocol2_blind_rsp(const Graph& g, const std::vector<Angle8>& thetas,
                                     const EmitterAssignment& emitters, Extender& extender, RandomSource& rng,
                                     const RspOptions& options = {}, PureState initial = PureState{}) {
  if (thetas.size() != g.size()) throw std::invalid_argument("one angle per vertex required");
  const auto plan = plan_links(g, emitters);
  std::vector<std::size_t> extras = options.extra_emissions;
  if (extras.empty()) extras.assign(g.size(), 0);
  if (extras.size() != g.size()) throw std::invalid_argument("extra_emissions needs one entry per vertex");

  RspResult r;
  r.state = std::move(initial);
  r.b.assign(g.size(), false);
  r.c.assign(emitters.size(), false);
  r.d.assign(g.size(), false);
  r.client_shift.assign(g.size(), Angle8{});
  r.server_flip.assign(g.size(), false);
  PureState& st = r.state;

  auto photon = [&](Vertex v) { return "~v" + g.label(v); };
  auto extra = [&](Vertex v, std::size_t i) { return "~x" + g.label(v) + "." + std::to_string(i); };

  for (std::size_t q = 0; q < emitters.size(); ++q) st.add_plus(spin_label(q));
  std::vector<std::optional<Vertex>> latest(emitters.size());

  for (const Vertex v : g.order) {
    const std::size_t q = plan.emitter_of[v];
    const Label spin = spin_label(q);
    if (latest[q]) spin_hadamard(st, spin);

    const auto ext = extender.extend(st, spin, v, thetas[v], photon(v), rng);
    if (ext.aborted) {
      r.aborted = true;
      return r;
    }
    r.b[v] = ext.b;
    // X^b moves past the owed RZ(c) as RZ((-1)^b c); measuring RZ(c)|psi> at
    // delta equals measuring |psi> at delta - c.
    r.client_shift[v] = -ext.pending_client.signed_by(ext.b);
    r.server_flip[v] = ext.pending_server_pi;
    if (ext.b) {
      st.apply_1q(spin, mat2::pauli_x());
      st.apply_1q(photon(v), mat2::pauli_x());
      if (latest[q]) st.apply_1q(photon(*latest[q]), mat2::pauli_z());
    }
    for (std::size_t i = 0; i < extras[v]; ++i) emit_photon(st, spin, Angle8::zero(), extra(v, i));
    for (const Vertex w : plan.spin_links[v]) st.apply_cz(spin, spin_label(plan.emitter_of[w]));
    latest[q] = v;
  }

  for (std::size_t q = 0; q < emitters.size(); ++q) {
    spin_hadamard(st, spin_label(q));
    r.c[q] = retire_spin(st, spin_label(q), photon(emitters[q].back()), rng);
  }
  for (Vertex v = 0; v < g.size(); ++v) {
    for (std::size_t i = 0; i < extras[v]; ++i) r.d[v] = r.d[v] ^ measure_qubit(st, extra(v, i), Basis::x(), rng);
    if (r.d[v]) st.apply_1q(photon(v), mat2::pauli_z());
  }
  for (Vertex v = 0; v < g.size(); ++v) st.rename(photon(v), g.label(v));
  return r;
}

}  // namespace blindqe
