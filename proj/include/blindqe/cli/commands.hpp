#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "blindqe/blindness.hpp"
#include "blindqe/cli/config.hpp"
#include "blindqe/csv.hpp"
#include "blindqe/enumerate.hpp"
#include "blindqe/extender.hpp"
#include "blindqe/gadget.hpp"
#include "blindqe/graph_io.hpp"
#include "blindqe/mbqc.hpp"
#include "blindqe/physics.hpp"
#include "blindqe/rsp.hpp"
#include "blindqe/sdqc.hpp"
#include "blindqe/secbounds.hpp"
#include "blindqe/ubqc.hpp"

namespace blindqe::cli {

struct CommandOutput {
  Table table;
  int status = 0;  // nonzero when a verification command finds a violation
};

inline const std::vector<std::string>& bounds_columns() {
  static const std::vector<std::string> c{"alpha_sq", "eta1", "p2",  "n",    "t",    "nu",      "eps_cor",
                                          "eps_sec",  "eps",  "bdqc", "sdqc", "eps_post"};
  return c;
}

inline const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> c{"alpha_sq", "eta1_max",    "theta_star", "tau_star", "p1",
                                          "p2",       "gap_emitter", "gap_ideal",  "model"};
  return c;
}

/// Gadget parameters with the equilibrium threshold as default.
inline GadgetParams resolve_gadget(const Params& p, double alpha_sq = 0.5, std::size_t n = 100, double eta1 = 0.9) {
  const double a = p.real("alpha_sq", alpha_sq);
  const double e = p.real("eta1", eta1);
  const std::size_t count = p.count("n", n, 1);
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("key 'alpha_sq' must be > 0");
  if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("key 'eta1' must lie in [0, 1]");
  auto g = GadgetParams::with_default_threshold(a, count, e);
  if (const auto t = p.opt_real("t")) g.t = *t;
  if (!(g.t >= 0.0 && g.t <= static_cast<double>(count))) throw ConfigError("key 't' must lie in [0, n]");
  return g;
}

struct ResolvedGraph {
  std::string name;
  Graph graph;
  MeasurementPattern pattern;
  std::optional<EmitterAssignment> file_emitters;
};

inline ResolvedGraph resolve_graph(const Params& p, const std::string& fallback = "cluster-2x2") {
  if (p.has("graph") && p.has("graph_file")) throw ConfigError("give either 'graph' or 'graph_file', not both");
  ResolvedGraph r;
  if (p.has("graph_file")) {
    r.name = p.string("graph_file", "");
    auto doc = load_graph_document(r.name);
    r.graph = std::move(doc.graph);
    r.pattern = std::move(doc.pattern);
    r.file_emitters = std::move(doc.emitters);
  } else {
    r.name = p.string("graph", fallback);
    r.graph = preset_graph(r.name);
    r.pattern.angles.assign(r.graph.size(), Angle8{});
  }
  if (const auto angles = p.int_list("angles")) {
    if (angles->size() != r.graph.size())
      throw ConfigError("key 'angles' needs " + std::to_string(r.graph.size()) + " entries, got " +
                        std::to_string(angles->size()));
    for (std::size_t i = 0; i < angles->size(); ++i) r.pattern.angles[i] = Angle8{static_cast<int>((*angles)[i])};
  }
  return r;
}

inline EmitterAssignment resolve_emitters(const Params& p, const ResolvedGraph& rg) {
  const auto kind = p.choice("emitters", "auto", {"auto", "single", "per-vertex", "rows"});
  if (kind == "auto") return rg.file_emitters.value_or(one_emitter_per_vertex(rg.graph));
  if (kind == "single") return single_emitter(rg.graph);
  if (kind == "per-vertex") return one_emitter_per_vertex(rg.graph);
  if (rg.name.rfind("path-", 0) == 0) return single_emitter(rg.graph);
  if (rg.name.rfind("cluster-", 0) == 0) {
    const auto dims = rg.name.substr(8);
    const auto x = dims.find('x');
    return presets::row_emitters(std::stoul(dims.substr(0, x)), std::stoul(dims.substr(x + 1)));
  }
  throw ConfigError("emitters 'rows' needs a path-N or cluster-RxC preset");
}

inline std::vector<bool> resolve_input(const Params& p, const Graph& g) {
  std::vector<bool> x(g.inputs.size(), false);
  if (const auto bits = p.int_list("input")) {
    if (bits->size() != x.size())
      throw ConfigError("key 'input' needs " + std::to_string(x.size()) + " bits, got " + std::to_string(bits->size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
      if ((*bits)[i] != 0 && (*bits)[i] != 1) throw ConfigError("key 'input' must hold bits 0/1");
      x[i] = (*bits)[i] == 1;
    }
  }
  return x;
}

inline UbqcOptions resolve_ubqc(const Params& p, const ResolvedGraph& rg) {
  UbqcOptions o;
  const auto src = p.choice("source", "ideal", {"ideal", "resource", "gadget"});
  o.source = src == "ideal" ? StateSource::IdealRsp
             : src == "resource" ? StateSource::Protocol2Resource
                                 : StateSource::Protocol2Gadget;
  o.gadget = resolve_gadget(p, 0.5, 20, 0.9);
  o.merge_corrections = p.boolean("merge", false);
  if (o.merge_corrections && o.source != StateSource::Protocol2Gadget)
    throw ConfigError("key 'merge' needs source 'gadget'");
  o.encrypt = p.boolean("encrypt", true);
  o.emitters = resolve_emitters(p, rg);
  return o;
}

inline std::string bit_string(const std::vector<bool>& bits) {
  std::string s;
  for (bool b : bits) s += b ? '1' : '0';
  return s;
}

/// Output distribution of the pattern run directly on |G>, by exact enumeration.
inline std::map<std::vector<bool>, double> exact_mbqc_distribution(const Graph& g, const MeasurementPattern& pattern,
                                                                   const std::vector<bool>& x) {
  std::map<std::vector<bool>, double> d;
  for (const auto& br : enumerate_branches([&](RandomSource& rng) {
         return run_mbqc(g, pattern, x, build_graph_state(g), rng);
       }))
    d[br.result] += br.probability;
  return d;
}

inline constexpr std::size_t kExactMbqcMaxVertices = 12;

// ---------------------------------------------------------------- commands

inline CommandOutput run_bounds(const RunConfig& rc) {
  const auto& p = rc.params;
  const auto g = resolve_gadget(p);
  const auto V = p.count("V", 1, 1);
  const auto N = p.opt_count("N", 1);
  const auto eps_S = p.opt_real("eps_S");
  if (N.has_value() != eps_S.has_value()) throw ConfigError("keys 'N' and 'eps_S' go together");
  std::vector<std::size_t> ns{g.n};
  if (const auto n_max = p.opt_count("n_max", 1)) {
    if (p.has("t")) throw ConfigError("key 't' cannot be combined with an n sweep");
    const auto step = p.count("n_step", 1, 1);
    ns.clear();
    for (std::size_t n = step; n <= *n_max; n += step) ns.push_back(n);
  }
  CommandOutput out{Table(bounds_columns())};
  for (const auto n : ns) {
    const auto r = p.has("t") ? gadget_bounds(g.eta1, g.alpha_sq, n, g.t) : gadget_bounds(g.eta1, g.alpha_sq, n);
    const auto c = composed_bounds(r, V, N, eps_S);
    out.table.add_row({r.alpha_sq, r.eta1, r.p2, static_cast<std::int64_t>(n), r.t, r.nu, r.eps_cor, r.eps_sec, r.eps,
                       c.bdqc, c.sdqc.value_or(std::nan("")), postselect_bounds(g.eta1, g.alpha_sq, n)});
  }
  return out;
}

inline CommandOutput run_gadget_sim(const RunConfig& rc) {
  const auto& p = rc.params;
  const auto g = resolve_gadget(p);
  const Angle8 theta{static_cast<int>(p.integer("theta", 3))};
  const auto runs = p.count("runs", 1000, 1);
  const auto protocol = p.choice("protocol", "threshold", {"threshold", "postselected"});
  const auto server_kind = p.choice("server", "honest", {"honest", "multiphoton"});
  const auto keep = p.count("transcripts", 0);
  if (keep > 0 && !p.has("transcript_out")) throw ConfigError("key 'transcripts' needs 'transcript_out'");
  if (protocol == "postselected" && server_kind != "honest")
    throw ConfigError("the post-selected gadget has no set S to misreport; use server 'honest'");
  std::ofstream transcripts;
  if (keep > 0) {
    transcripts.open(p.string("transcript_out", ""));
    if (!transcripts) throw std::runtime_error("cannot write '" + p.string("transcript_out", "") + "'");
  }

  HonestServer honest;
  MultiphotonReporter multiphoton;
  ServerPolicy& server = server_kind == "honest" ? honest : static_cast<ServerPolicy&>(multiphoton);
  const std::complex<double> a{0.6, 0.0}, b{0.0, 0.8};
  std::size_t aborts = 0;
  double min_f = 1.0, sum_f = 0.0;
  for (std::size_t i = 0; i < runs; ++i) {
    auto rng = Rng::stream(rc.seed, i);
    PureState s;
    s.add_qubit("s", a, b);
    Transcript tr;
    Transcript* trp = i < keep ? &tr : nullptr;
    bool aborted = false, m_x = false;
    if (protocol == "threshold") {
      const auto r = protocol3_gadget(s, "s", theta, "p", g, server, rng, trp, i);
      aborted = r.aborted;
      m_x = r.m_x;
    } else {
      const auto r = protocol5_postselected(s, "s", theta, "p", g.alpha_sq, g.n, g.eta1, rng, trp, i);
      aborted = r.aborted;
      m_x = r.m_x;
    }
    if (trp) write_jsonl(transcripts, tr);
    if (aborted) {
      ++aborts;
      continue;
    }
    const auto target = PureState::from_amplitudes(
        {"s", "p"}, {a, 0.0, 0.0, b * std::polar(1.0, theta.signed_by(m_x).radians())});
    const double f = fidelity_up_to_phase(s, target);
    min_f = std::min(min_f, f);
    sum_f += f;
  }
  const bool threshold = protocol == "threshold";
  const double bound = threshold ? gadget_bounds(g.eta1, g.alpha_sq, g.n, g.t).eps_cor
                                 : -std::expm1(static_cast<double>(g.n) * std::log1p(g.eta1 - 1.0));
  const std::size_t ok = runs - aborts;
  CommandOutput out{Table({"protocol", "server", "alpha_sq", "eta1", "n", "t", "theta", "runs", "aborts", "abort_rate",
                           "abort_bound", "min_fidelity", "mean_fidelity"})};
  out.table.add_row({protocol, server_kind, g.alpha_sq, g.eta1, static_cast<std::int64_t>(g.n),
                     threshold ? g.t : std::nan(""), static_cast<std::int64_t>(theta.value()),
                     static_cast<std::int64_t>(runs), static_cast<std::int64_t>(aborts),
                     static_cast<double>(aborts) / static_cast<double>(runs), bound, ok ? min_f : std::nan(""),
                     ok ? sum_f / static_cast<double>(ok) : std::nan("")});
  return out;
}

inline CommandOutput run_rsp_sim(const RunConfig& rc) {
  const auto& p = rc.params;
  const auto rg = resolve_graph(p);
  const auto emitters = resolve_emitters(p, rg);
  const auto kind = p.choice("extender", "resource", {"resource", "gadget"});
  const auto g = resolve_gadget(p, 0.5, 20, 0.9);
  const auto runs = p.count("runs", 100, 1);
  HonestServer server;
  std::size_t aborts = 0;
  double min_f = 1.0, sum_f = 0.0;
  for (std::size_t i = 0; i < runs; ++i) {
    auto rng = Rng::stream(rc.seed, i);
    std::vector<Angle8> th(rg.graph.size());
    for (auto& t : th) t = rng.uniform_angle();
    ResourceExtender resource;
    GadgetExtender gadget(g, server);
    Extender& ext = kind == "resource" ? static_cast<Extender&>(resource) : gadget;
    const auto r = protocol2_blind_rsp(rg.graph, th, emitters, ext, rng);
    if (r.aborted) {
      ++aborts;
      continue;
    }
    const double f = fidelity_up_to_phase(r.state, build_blind_graph_state(rg.graph, th));
    min_f = std::min(min_f, f);
    sum_f += f;
  }
  const std::size_t ok = runs - aborts;
  CommandOutput out{
      Table({"graph", "vertices", "emitters", "extender", "runs", "aborts", "min_fidelity", "mean_fidelity"})};
  out.table.add_row({rg.name, static_cast<std::int64_t>(rg.graph.size()), static_cast<std::int64_t>(emitters.size()),
                     kind, static_cast<std::int64_t>(runs), static_cast<std::int64_t>(aborts),
                     ok ? min_f : std::nan(""), ok ? sum_f / static_cast<double>(ok) : std::nan("")});
  return out;
}

inline CommandOutput run_ubqc_sim(const RunConfig& rc) {
  const auto& p = rc.params;
  const auto rg = resolve_graph(p);
  const auto x = resolve_input(p, rg.graph);
  const auto opts = resolve_ubqc(p, rg);
  const auto runs = p.count("runs", 1000, 1);
  HonestServer server;
  std::map<std::vector<bool>, std::size_t> counts;
  std::size_t aborts = 0;
  for (std::size_t i = 0; i < runs; ++i) {
    auto rng = Rng::stream(rc.seed, i);
    const auto r = ubqc_run(rg.graph, rg.pattern, x, opts, server, rng, i);
    if (r.aborted) ++aborts;
    else ++counts[r.outputs];
  }
  std::map<std::vector<bool>, double> exact;
  const bool have_exact = rg.graph.size() <= kExactMbqcMaxVertices;
  if (have_exact) exact = exact_mbqc_distribution(rg.graph, rg.pattern, x);
  for (const auto& [k, _] : exact) counts.try_emplace(k, 0);
  const std::size_t ok = runs - aborts;
  CommandOutput out{Table({"output", "count", "freq", "mbqc_prob"})};
  for (const auto& [k, c] : counts) {
    const double prob = have_exact ? (exact.contains(k) ? exact.at(k) : 0.0) : std::nan("");
    out.table.add_row({bit_string(k), static_cast<std::int64_t>(c),
                       ok ? static_cast<double>(c) / static_cast<double>(ok) : std::nan(""), prob});
  }
  if (aborts) out.table.add_row({std::string("abort"), static_cast<std::int64_t>(aborts), std::nan(""), std::nan("")});
  return out;
}

inline std::unique_ptr<ServerPolicy> make_server(const std::string& spec, const Graph& g) {
  if (spec == "honest") return std::make_unique<HonestServer>();
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const auto kind = spec.substr(0, colon);
    const auto target = spec.substr(colon + 1);
    if (!g.vertex_named(target)) throw ConfigError("server target '" + target + "' is not a vertex of the graph");
    if (kind == "z") return std::make_unique<ZDeviation>(target);
    if (kind == "flip") return std::make_unique<OutcomeFlip>(target);
  }
  throw ConfigError("key 'server' must be honest, z:<vertex> or flip:<vertex>, got '" + spec + "'");
}

inline CommandOutput run_sdqc_sim(const RunConfig& rc) {
  const auto& p = rc.params;
  const auto rg = resolve_graph(p);
  const auto x = resolve_input(p, rg.graph);
  SdqcParams sp;
  sp.ubqc = resolve_ubqc(p, rg);
  sp.N = p.count("N", 40, 2);
  sp.test_fraction = p.real("test_fraction", 0.5);
  if (!(sp.test_fraction > 0.0 && sp.test_fraction < 1.0)) throw ConfigError("key 'test_fraction' must lie in (0, 1)");
  sp.w = p.opt_count("w");
  const auto runs = p.count("runs", 200, 1);
  const auto server = make_server(p.string("server", "honest"), rg.graph);

  std::optional<std::vector<bool>> reference;
  if (rg.graph.size() <= kExactMbqcMaxVertices) {
    const auto exact = exact_mbqc_distribution(rg.graph, rg.pattern, x);
    reference = std::max_element(exact.begin(), exact.end(), [](const auto& l, const auto& r) {
                  return l.second < r.second;
                })->first;
  }
  std::size_t aborts = 0, correct = 0, wrong = 0, failed = 0;
  for (std::size_t i = 0; i < runs; ++i) {
    auto rng = Rng::stream(rc.seed, i);
    const auto r = sdqc_run(rg.graph, rg.pattern, x, sp, *server, rng);
    failed += r.failed_tests;
    if (r.aborted) ++aborts;
    else if (reference && r.output == *reference) ++correct;
    else ++wrong;
  }
  CommandOutput out{Table({"graph", "executions", "N", "tests", "w", "aborts", "abort_rate", "mean_failed_tests",
                           "accepted_correct", "accepted_wrong"})};
  out.table.add_row({rg.name, static_cast<std::int64_t>(runs), static_cast<std::int64_t>(sp.N),
                     static_cast<std::int64_t>(sp.num_tests()), static_cast<std::int64_t>(sp.threshold()),
                     static_cast<std::int64_t>(aborts), static_cast<double>(aborts) / static_cast<double>(runs),
                     static_cast<double>(failed) / static_cast<double>(runs), static_cast<std::int64_t>(correct),
                     static_cast<std::int64_t>(wrong)});
  return out;
}

inline CommandOutput run_blindness_verify(const RunConfig& rc) {
  const auto n = rc.params.count("n", 2, 1);
  if (n > kMaxBlindnessPulses) throw ConfigError("key 'n' must be <= " + std::to_string(kMaxBlindnessPulses));
  CommandOutput out{Table({"k", "S", "single_photon_in_S", "max_tv"})};
  for (const auto& row : blindness_table(n)) {
    std::string k, s;
    for (auto v : row.k) k += std::to_string(v);
    for (auto v : row.S) s += (s.empty() ? "" : ";") + std::to_string(v);
    out.table.add_row({k, s, static_cast<std::int64_t>(row.single_photon_in_S), row.max_tv});
    if (row.single_photon_in_S && row.max_tv > 1e-12) out.status = 3;
  }
  return out;
}

inline void add_sweep_row(Table& t, const SweepRow& r, const std::string& model) {
  t.add_row({r.alpha_sq, r.eta1_max, r.theta_star, r.tau_star, r.p1, r.p2, r.gap_emitter, r.gap_ideal, model});
}

inline CommandOutput run_physics_sweep(const RunConfig& rc) {
  const auto& p = rc.params;
  const double lo = p.real("alpha_min", 0.1), hi = p.real("alpha_max", 10.0);
  if (!(lo > 0.0 && hi >= lo)) throw ConfigError("need 0 < alpha_min <= alpha_max");
  const auto points = p.count("points", 100, 1);
  const auto model = p.choice("model", "both", {"two_level", "ideal_lambda", "both"});
  const double coupling = p.real("coupling", 1.0);
  if (!(coupling > 0.0 && coupling <= 1.0)) throw ConfigError("key 'coupling' must lie in (0, 1]");
  const auto alphas = linspace(lo, hi, points);
  CommandOutput out{Table(sweep_columns())};
  if (model != "ideal_lambda")
    for (const auto& r : security_gap_sweep(alphas)) add_sweep_row(out.table, r, "two_level");
  if (model != "two_level")
    for (const auto& r : security_gap_sweep(alphas, EmitterPhysics::ideal_lambda(coupling)))
      add_sweep_row(out.table, r, "ideal_lambda");
  return out;
}

/// Optimum for one alpha_sq (or the gap crossing), with the master-equation
/// value and the alternative closed form evaluated at the same pulse.
inline CommandOutput run_physics_opt(const RunConfig& rc) {
  const auto& p = rc.params;
  SweepRow r;
  if (p.boolean("crossing", false)) {
    if (p.has("alpha_sq")) throw ConfigError("key 'crossing' replaces 'alpha_sq'");
    r = gap_crossing();
  } else {
    const double a = p.real("alpha_sq", 2.5);
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("key 'alpha_sq' must be > 0");
    r = sweep_row(a);
  }
  const DriveParams d{1.0, r.alpha_sq, r.theta_star};
  CommandOutput out{Table({"alpha_sq", "eta1_star", "theta_star", "theta_star_over_pi", "tau_star", "p2",
                           "eta1_numeric", "eta1_plus_form"})};
  out.table.add_row({r.alpha_sq, r.eta1_max, r.theta_star, r.theta_star / std::numbers::pi, r.tau_star, r.p2,
                     eta1_numeric(d), eta1_plus_form(d)});
  return out;
}

inline CommandOutput execute_command(const RunConfig& rc) {
  const auto& c = rc.command;
  if (c == "bounds") return run_bounds(rc);
  if (c == "gadget-sim") return run_gadget_sim(rc);
  if (c == "rsp-sim") return run_rsp_sim(rc);
  if (c == "ubqc-sim") return run_ubqc_sim(rc);
  if (c == "sdqc-sim") return run_sdqc_sim(rc);
  if (c == "blindness-verify") return run_blindness_verify(rc);
  if (c == "physics-sweep") return run_physics_sweep(rc);
  if (c == "physics-opt") return run_physics_opt(rc);
  throw ConfigError("unknown command '" + c + "'");
}

inline void write_output(std::ostream& os, const RunConfig& rc, const Table& t) {
  if (rc.format == "csv") {
    t.write_csv(os);
    return;
  }
  auto j = t.to_json();
  j["command"] = rc.command;
  j["seed"] = rc.seed;
  j["params"] = rc.params.raw();
  os << j.dump(2) << '\n';
}

}  // namespace blindqe::cli
