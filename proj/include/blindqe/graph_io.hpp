#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "blindqe/graph.hpp"

namespace blindqe {

/// Graph description document:
///
///   {
///     "vertices": ["a1", "a2", "b1", "b2"],
///     "edges":    [["a1", "a2"], ["b1", "b2"], ["a1", "b1"], ["a2", "b2"]],
///     "inputs":   ["a1", "b1"],
///     "outputs":  ["a2", "b2"],
///     "order":    ["a1", "b1", "a2", "b2"],      (optional, default: vertex order)
///     "flow":     [["a1", "a2"], ["b1", "b2"]],  (optional)
///     "angles":   [0, 0, 0, 0],                  (optional, units of pi/4)
///     "emitters": [["a1", "a2"], ["b1", "b2"]]   (optional)
///   }
struct GraphDocument {
  Graph graph;
  MeasurementPattern pattern;
  std::optional<std::vector<std::vector<Vertex>>> emitters;
};

inline GraphDocument parse_graph_document(const nlohmann::json& j) {
  using nlohmann::json;
  if (!j.is_object()) throw std::invalid_argument("graph document must be a JSON object");
  static const std::set<std::string> known{"vertices", "edges", "inputs", "outputs", "order", "flow", "angles",
                                           "emitters"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw std::invalid_argument("graph document: unknown key '" + key + "'");
  if (!j.contains("vertices")) throw std::invalid_argument("graph document: missing key 'vertices'");

  GraphDocument doc;
  Graph& g = doc.graph;
  for (const auto& v : j.at("vertices")) g.names.push_back(v.get<std::string>());
  auto vertex = [&](const json& name, const char* key) {
    const auto s = name.get<std::string>();
    const auto v = g.vertex_named(s);
    if (!v) throw std::invalid_argument(std::string("graph document: '") + key + "' names unknown vertex '" + s + "'");
    return *v;
  };
  auto vertex_list = [&](const char* key) {
    std::vector<Vertex> out;
    if (j.contains(key))
      for (const auto& v : j.at(key)) out.push_back(vertex(v, key));
    return out;
  };
  auto pairs = [&](const char* key) {
    std::vector<std::pair<Vertex, Vertex>> out;
    if (!j.contains(key)) return out;
    for (const auto& e : j.at(key)) {
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument(std::string("graph document: entries of '") + key + "' must be pairs");
      out.emplace_back(vertex(e[0], key), vertex(e[1], key));
    }
    return out;
  };

  g.edges = pairs("edges");
  g.inputs = vertex_list("inputs");
  g.outputs = vertex_list("outputs");
  g.order = vertex_list("order");
  if (!j.contains("order"))
    for (Vertex v = 0; v < g.size(); ++v) g.order.push_back(v);
  for (const auto& [v, w] : pairs("flow")) {
    if (g.flow.contains(v)) throw std::invalid_argument("graph document: flow defined twice for '" + g.names[v] + "'");
    g.flow[v] = w;
  }
  g.validate();

  doc.pattern.angles.assign(g.size(), Angle8{});
  if (j.contains("angles")) {
    const auto& a = j.at("angles");
    if (!a.is_array() || a.size() != g.size())
      throw std::invalid_argument("graph document: 'angles' must list one integer per vertex");
    for (std::size_t i = 0; i < g.size(); ++i) doc.pattern.angles[i] = Angle8{a[i].get<int>()};
  }
  if (j.contains("emitters")) {
    std::vector<std::vector<Vertex>> em;
    for (const auto& list : j.at("emitters")) {
      em.emplace_back();
      for (const auto& v : list) em.back().push_back(vertex(v, "emitters"));
    }
    doc.emitters = std::move(em);
  }
  return doc;
}

inline GraphDocument load_graph_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("graph file '" + path + "': " + e.what());
  }
  try {
    return parse_graph_document(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("graph file '" + path + "': " + e.what());
  }
}

inline nlohmann::json to_json(const GraphDocument& doc) {
  const Graph& g = doc.graph;
  nlohmann::json j;
  j["vertices"] = g.names;
  auto names = [&](const std::vector<Vertex>& vs) {
    std::vector<std::string> out;
    for (auto v : vs) out.push_back(g.names[v]);
    return out;
  };
  j["edges"] = nlohmann::json::array();
  for (const auto& [a, b] : g.edges) j["edges"].push_back({g.names[a], g.names[b]});
  j["inputs"] = names(g.inputs);
  j["outputs"] = names(g.outputs);
  j["order"] = names(g.order);
  j["flow"] = nlohmann::json::array();
  for (const auto& [v, w] : g.flow) j["flow"].push_back({g.names[v], g.names[w]});
  std::vector<int> angles;
  for (auto a : doc.pattern.angles) angles.push_back(a.value());
  j["angles"] = angles;
  if (doc.emitters) {
    j["emitters"] = nlohmann::json::array();
    for (const auto& list : *doc.emitters) j["emitters"].push_back(names(list));
  }
  return j;
}

}  // namespace blindqe
