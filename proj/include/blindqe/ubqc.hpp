#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "blindqe/extender.hpp"
#include "blindqe/gadget.hpp"
#include "blindqe/graph.hpp"
#include "blindqe/mbqc.hpp"
#include "blindqe/rsp.hpp"
#include "blindqe/server.hpp"
#include "blindqe/transcript.hpp"

namespace blindqe {

enum class StateSource { IdealRsp, Protocol2Resource, Protocol2Gadget };

struct UbqcOptions {
  StateSource source = StateSource::IdealRsp;
  GadgetParams gadget = GadgetParams::with_default_threshold(0.5, 20, 0.9);
  /// Fold the gadget's final RZ into the measurement angles instead of
  /// applying it on the photon.
  bool merge_corrections = false;
  /// Emitter schedule for the Protocol 2 sources; default is one emitter per vertex.
  std::optional<EmitterAssignment> emitters;
  /// With false, theta_v = r_v = 0 (no one-time padding of the angles).
  bool encrypt = true;
};

/// The blind graph state on the server's side plus what the client must
/// remember about it.
struct BlindResource {
  bool aborted = false;
  PureState state;
  std::vector<Angle8> thetas;
  std::vector<Angle8> client_shift;
  std::vector<bool> server_flip;
};

inline EmitterAssignment one_emitter_per_vertex(const Graph& g) {
  EmitterAssignment out;
  for (const Vertex v : g.order) out.push_back({v});
  return out;
}

inline BlindResource prepare_blind_resource(const Graph& g, const UbqcOptions& options, ServerPolicy& server,
                                            RandomSource& rng, Transcript* transcript) {
  BlindResource res;
  res.thetas.resize(g.size());
  for (auto& th : res.thetas) th = options.encrypt ? rng.uniform_angle() : Angle8{};
  res.client_shift.assign(g.size(), Angle8{});
  res.server_flip.assign(g.size(), false);
  if (options.source == StateSource::IdealRsp) {
    res.state = build_blind_graph_state(g, res.thetas);
    return res;
  }
  const auto emitters = options.emitters.value_or(one_emitter_per_vertex(g));
  ResourceExtender resource;
  GadgetExtender gadget(options.gadget, server, options.merge_corrections, transcript);
  Extender& ext = options.source == StateSource::Protocol2Resource ? static_cast<Extender&>(resource) : gadget;
  auto r = protocol2_blind_rsp(g, res.thetas, emitters, ext, rng);
  res.aborted = r.aborted;
  res.state = std::move(r.state);
  res.client_shift = std::move(r.client_shift);
  res.server_flip = std::move(r.server_flip);
  return res;
}

/// Delegated measurement of every vertex of `res` in the graph's order.
/// `intended(v, s)` gives the unpadded angle the client wants for v given the
/// corrected outcomes so far; returns the corrected outcomes s_v = b_v xor r_v.
inline std::vector<bool> delegate_measurements(const Graph& g, BlindResource& res,
                                               const std::function<Angle8(Vertex, const std::vector<bool>&)>& intended,
                                               const std::vector<bool>& r, ServerPolicy& server, RandomSource& rng,
                                               Transcript* transcript, std::size_t round) {
  std::vector<bool> s(g.size(), false);
  for (const Vertex v : g.order) {
    const Label& q = g.label(v);
    const Angle8 delta = (intended(v, s) + res.thetas[v] + res.client_shift[v]).plus_pi_if(r[v]);
    if (transcript) transcript->client(round, msg::MeasureInstruction{q, delta});
    Angle8 server_delta = delta;
    server.before_measure(res.state, q, server_delta);
    const bool b = measure_qubit(res.state, q, Basis::rotated(server_delta.plus_pi_if(res.server_flip[v])), rng);
    const bool reported = server.report_outcome(q, b);
    if (transcript) transcript->server(round, msg::Outcome{q, reported});
    s[v] = reported != r[v];
  }
  return s;
}

struct UbqcResult {
  bool aborted = false;
  std::vector<bool> outputs;
  std::vector<bool> s;
  std::vector<Angle8> thetas;
  std::vector<bool> r;
  Transcript transcript;
};

/// Classical-input/output UBQC: delta_v = phi'_v + theta_v + r_v pi + x_v pi.
inline UbqcResult ubqc_run(const Graph& g, const MeasurementPattern& pattern, const std::vector<bool>& x,
                           const UbqcOptions& options, ServerPolicy& server, RandomSource& rng,
                           std::size_t round = 0) {
  g.validate_flow();
  pattern.validate_for(g);
  const auto shift = input_shifts(g, x);
  const auto deps = flow_dependencies(g);
  UbqcResult out;
  auto res = prepare_blind_resource(g, options, server, rng, &out.transcript);
  out.thetas = res.thetas;
  if (res.aborted) {
    out.aborted = true;
    return out;
  }
  out.r.resize(g.size());
  for (Vertex v = 0; v < g.size(); ++v) out.r[v] = options.encrypt ? rng.fair_bit() : false;
  auto intended = [&](Vertex v, const std::vector<bool>& s) {
    return corrected_angle(deps, s, v, pattern.angles[v]).plus_pi_if(shift[v]);
  };
  out.s = delegate_measurements(g, res, intended, out.r, server, rng, &out.transcript, round);
  out.outputs = output_bits(g, out.s);
  return out;
}

}  // namespace blindqe
