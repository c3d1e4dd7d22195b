#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blindqe/angle.hpp"
#include "blindqe/qstate.hpp"

namespace blindqe {

using Vertex = std::size_t;

/// Open graph with measurement order and (optional) flow. Vertex v is held
/// in the quantum register under the label names[v].
struct Graph {
  std::vector<std::string> names;
  std::vector<std::pair<Vertex, Vertex>> edges;
  std::vector<Vertex> inputs;
  std::vector<Vertex> outputs;
  std::vector<Vertex> order;
  std::map<Vertex, Vertex> flow;  // v -> f(v), defined on V \ O when present

  std::size_t size() const { return names.size(); }
  const std::string& label(Vertex v) const { return names.at(v); }

  bool has_edge(Vertex a, Vertex b) const {
    return std::any_of(edges.begin(), edges.end(), [&](const auto& e) {
      return (e.first == a && e.second == b) || (e.first == b && e.second == a);
    });
  }

  std::vector<Vertex> neighbours(Vertex v) const {
    std::vector<Vertex> out;
    for (const auto& [a, b] : edges) {
      if (a == v) out.push_back(b);
      if (b == v) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool is_input(Vertex v) const { return std::find(inputs.begin(), inputs.end(), v) != inputs.end(); }
  bool is_output(Vertex v) const { return std::find(outputs.begin(), outputs.end(), v) != outputs.end(); }

  /// Position of each vertex in the measurement order.
  std::vector<std::size_t> rank() const {
    std::vector<std::size_t> r(size());
    for (std::size_t i = 0; i < order.size(); ++i) r[order[i]] = i;
    return r;
  }

  std::optional<Vertex> vertex_named(const std::string& name) const {
    for (Vertex v = 0; v < size(); ++v)
      if (names[v] == name) return v;
    return std::nullopt;
  }

  /// Structural checks: simple undirected edges, I/O and order consistent.
  void validate() const {
    const std::size_t n = size();
    if (n == 0) throw std::invalid_argument("graph has no vertices");
    std::set<std::string> seen(names.begin(), names.end());
    if (seen.size() != n) throw std::invalid_argument("duplicate vertex names");
    std::set<std::pair<Vertex, Vertex>> es;
    for (const auto& [a, b] : edges) {
      if (a >= n || b >= n) throw std::invalid_argument("edge refers to an unknown vertex");
      if (a == b) throw std::invalid_argument("self-loop on vertex " + names[a]);
      if (!es.insert(std::minmax(a, b)).second) throw std::invalid_argument("duplicate edge");
    }
    auto check_subset = [&](const std::vector<Vertex>& s, const char* what) {
      std::set<Vertex> u(s.begin(), s.end());
      if (u.size() != s.size()) throw std::invalid_argument(std::string("repeated vertex in ") + what);
      for (auto v : s)
        if (v >= n) throw std::invalid_argument(std::string(what) + " refers to an unknown vertex");
    };
    check_subset(inputs, "inputs");
    check_subset(outputs, "outputs");
    check_subset(order, "order");
    if (order.size() != n) throw std::invalid_argument("order must list every vertex exactly once");
  }

  bool has_flow() const { return !flow.empty() || outputs.size() == size(); }

  /// Checks that `flow` is a flow for (G, I, O) compatible with `order`.
  void validate_flow() const {
    validate();
    const auto r = rank();
    for (Vertex v = 0; v < size(); ++v) {
      const bool in_domain = flow.contains(v);
      if (in_domain == is_output(v))
        throw std::invalid_argument("flow must be defined exactly on non-output vertices (vertex " + names[v] + ")");
    }
    std::set<Vertex> images;
    for (const auto& [v, w] : flow) {
      if (w >= size()) throw std::invalid_argument("flow image out of range");
      if (is_input(w)) throw std::invalid_argument("flow maps onto input vertex " + names[w]);
      if (!has_edge(v, w)) throw std::invalid_argument("flow pair " + names[v] + "->" + names[w] + " is not an edge");
      if (!images.insert(w).second) throw std::invalid_argument("flow is not injective");
      if (r[w] <= r[v]) throw std::invalid_argument("order must place f(v) after v for " + names[v]);
      for (auto u : neighbours(w))
        if (u != v && r[u] <= r[v])
          throw std::invalid_argument("order violates flow: neighbour " + names[u] + " of f(" + names[v] + ")");
    }
  }
};

/// Outcome dependencies induced by the flow: X-dependency (the vertex whose
/// flow image is w) and Z-dependencies (vertices v with w in N(f(v)), w != v).
struct FlowDependencies {
  std::vector<std::optional<Vertex>> x_dep;
  std::vector<std::vector<Vertex>> z_deps;
};

inline FlowDependencies flow_dependencies(const Graph& g) {
  FlowDependencies d{std::vector<std::optional<Vertex>>(g.size()), std::vector<std::vector<Vertex>>(g.size())};
  for (const auto& [v, w] : g.flow) {
    d.x_dep[w] = v;
    for (auto u : g.neighbours(w))
      if (u != v) d.z_deps[u].push_back(v);
  }
  return d;
}

/// phi' = (-1)^{sX} phi + sZ pi.
inline Angle8 flow_update(Angle8 phi, bool sx, bool sz) { return phi.signed_by(sx).plus_pi_if(sz); }

/// Base measurement angles, one per vertex.
struct MeasurementPattern {
  std::vector<Angle8> angles;

  void validate_for(const Graph& g) const {
    if (angles.size() != g.size()) throw std::invalid_argument("pattern has " + std::to_string(angles.size()) +
                                                                " angles for a graph with " +
                                                                std::to_string(g.size()) + " vertices");
  }
};

/// Corrected angle for vertex w given the corrected outcomes s seen so far.
inline Angle8 corrected_angle(const FlowDependencies& deps, const std::vector<bool>& s, Vertex w, Angle8 phi) {
  const bool sx = deps.x_dep[w] ? s[*deps.x_dep[w]] : false;
  bool sz = false;
  for (auto u : deps.z_deps[w]) sz ^= s[u];
  return flow_update(phi, sx, sz);
}

/// prod CZ . (x) RZ(theta_v)|+>, qubits labelled by vertex names in vertex order.
inline PureState build_blind_graph_state(const Graph& g, const std::vector<Angle8>& thetas) {
  if (thetas.size() != g.size()) throw std::invalid_argument("one angle per vertex required");
  if (g.size() > kMaxRegisterQubits) throw std::length_error("graph exceeds the register cap");
  PureState s;
  for (Vertex v = 0; v < g.size(); ++v) s.add_qubit(g.label(v), 1.0, std::polar(1.0, thetas[v].radians()));
  for (const auto& [a, b] : g.edges) s.apply_cz(g.label(a), g.label(b));
  return s;
}

inline PureState build_graph_state(const Graph& g) {
  return build_blind_graph_state(g, std::vector<Angle8>(g.size()));
}

namespace presets {

/// Path 0 - 1 - ... - (n-1), input 0, output n-1, flow i -> i+1.
inline Graph path(std::size_t n) {
  if (n == 0) throw std::invalid_argument("path needs at least one vertex");
  Graph g;
  for (std::size_t i = 0; i < n; ++i) {
    g.names.push_back(std::to_string(i));
    g.order.push_back(i);
    if (i + 1 < n) {
      g.edges.emplace_back(i, i + 1);
      g.flow[i] = i + 1;
    }
  }
  g.inputs = {0};
  g.outputs = {n - 1};
  return g;
}

/// rows x cols grid; vertex r*cols + c is named "r,c". Flow runs along rows,
/// column 0 are inputs, the last column outputs, measured column by column.
inline Graph cluster(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("cluster dimensions must be positive");
  Graph g;
  auto id = [cols](std::size_t r, std::size_t c) { return r * cols + c; };
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) g.names.push_back(std::to_string(r) + "," + std::to_string(c));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (c + 1 < cols) {
        g.edges.emplace_back(id(r, c), id(r, c + 1));
        g.flow[id(r, c)] = id(r, c + 1);
      }
      if (r + 1 < rows) g.edges.emplace_back(id(r, c), id(r + 1, c));
    }
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r) g.order.push_back(id(r, c));
  for (std::size_t r = 0; r < rows; ++r) {
    g.inputs.push_back(id(r, 0));
    g.outputs.push_back(id(r, cols - 1));
  }
  return g;
}

/// Complete graph on three vertices; every vertex is an output (no flow needed).
inline Graph triangle() {
  Graph g;
  g.names = {"0", "1", "2"};
  g.edges = {{0, 1}, {1, 2}, {0, 2}};
  g.order = {0, 1, 2};
  g.outputs = {0, 1, 2};
  return g;
}

/// One emitter per row of a cluster preset, or a single emitter along a path.
inline std::vector<std::vector<Vertex>> row_emitters(std::size_t rows, std::size_t cols) {
  std::vector<std::vector<Vertex>> out(rows);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out[r].push_back(r * cols + c);
  return out;
}

}  // namespace presets

/// Parses "path-N", "cluster-RxC" or "triangle".
inline Graph preset_graph(const std::string& name) {
  auto number = [&](const std::string& s) {
    std::size_t pos = 0;
    const unsigned long v = std::stoul(s, &pos);
    if (pos != s.size() || v == 0) throw std::invalid_argument("bad graph preset '" + name + "'");
    return static_cast<std::size_t>(v);
  };
  try {
    if (name == "triangle") return presets::triangle();
    if (name.rfind("path-", 0) == 0) return presets::path(number(name.substr(5)));
    if (name.rfind("cluster-", 0) == 0) {
      const auto dims = name.substr(8);
      const auto x = dims.find('x');
      if (x == std::string::npos) throw std::invalid_argument("bad graph preset '" + name + "'");
      return presets::cluster(number(dims.substr(0, x)), number(dims.substr(x + 1)));
    }
  } catch (const std::logic_error&) {
    throw std::invalid_argument("bad graph preset '" + name + "'");
  }
  throw std::invalid_argument("unknown graph preset '" + name + "' (expected path-N, cluster-RxC or triangle)");
}

}  // namespace blindqe
