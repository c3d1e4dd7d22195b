#pragma once

#include <stdexcept>
#include <vector>

#include "blindqe/graph.hpp"
#include "blindqe/qstate.hpp"
#include "blindqe/rng.hpp"

namespace blindqe {

/// Adds x_v * pi to the angle of input vertices; the classical input enters
/// the pattern as Z^{x_v} on an input qubit prepared in |+>.
inline std::vector<bool> input_shifts(const Graph& g, const std::vector<bool>& x) {
  if (x.size() != g.inputs.size())
    throw std::invalid_argument("expected " + std::to_string(g.inputs.size()) + " input bits, got " +
                                std::to_string(x.size()));
  std::vector<bool> shift(g.size(), false);
  for (std::size_t i = 0; i < x.size(); ++i) shift[g.inputs[i]] = x[i];
  return shift;
}

inline std::vector<bool> output_bits(const Graph& g, const std::vector<bool>& s) {
  std::vector<bool> out;
  for (auto v : g.outputs) out.push_back(s[v]);
  return out;
}

/// Measures every vertex of `state` in the graph's order at its flow-corrected
/// angle and returns the outcomes s_v of the output vertices (in g.outputs order).
inline std::vector<bool> run_mbqc(const Graph& g, const MeasurementPattern& pattern, const std::vector<bool>& x,
                                  PureState state, RandomSource& rng) {
  g.validate_flow();
  pattern.validate_for(g);
  for (Vertex v = 0; v < g.size(); ++v)
    if (!state.contains(g.label(v))) throw std::invalid_argument("state has no qubit for vertex " + g.label(v));
  const auto deps = flow_dependencies(g);
  const auto shift = input_shifts(g, x);
  std::vector<bool> s(g.size(), false);
  for (auto v : g.order) {
    const Angle8 angle = corrected_angle(deps, s, v, pattern.angles[v]).plus_pi_if(shift[v]);
    s[v] = measure_qubit(state, g.label(v), Basis::rotated(angle), rng);
  }
  return output_bits(g, s);
}

}  // namespace blindqe
