#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "blindqe/enumerate.hpp"
#include "blindqe/extender.hpp"
#include "blindqe/gadget.hpp"
#include "blindqe/rsp.hpp"
#include "blindqe/sdqc.hpp"
#include "blindqe/ubqc.hpp"

using namespace blindqe;
using C = std::complex<double>;

namespace {

const C kAlpha{0.6, 0.0};
const C kBeta{0.0, 0.8};

PureState spin_in(C a, C b) {
  PureState s;
  s.add_qubit("s", a, b);
  return s;
}

// a|00> + e^{i phi} b|11> on (s, p)
PureState rotated_pair(C a, C b, Angle8 phi) {
  return PureState::from_amplitudes({"s", "p"}, {a, 0.0, 0.0, b * std::polar(1.0, phi.radians())});
}

std::vector<Angle8> random_angles(std::size_t n, RandomSource& rng) {
  std::vector<Angle8> out(n);
  for (auto& a : out) a = rng.uniform_angle();
  return out;
}

using Dist = std::map<std::vector<bool>, double>;

Dist exact_mbqc(const Graph& g, const MeasurementPattern& p, const std::vector<bool>& x) {
  Dist d;
  for (const auto& br : enumerate_branches([&](RandomSource& rng) {
         return run_mbqc(g, p, x, build_graph_state(g), rng);
       }))
    d[br.result] += br.probability;
  return d;
}

double tv(const Dist& a, const Dist& b) {
  std::set<std::vector<bool>> keys;
  for (const auto& [k, _] : a) keys.insert(k);
  for (const auto& [k, _] : b) keys.insert(k);
  double s = 0;
  for (const auto& k : keys) s += std::abs((a.contains(k) ? a.at(k) : 0.0) - (b.contains(k) ? b.at(k) : 0.0));
  return 0.5 * s;
}

Dist sampled_ubqc(const Graph& g, const MeasurementPattern& p, const std::vector<bool>& x, const UbqcOptions& o,
                  std::size_t runs, std::uint64_t seed) {
  HonestServer server;
  Dist d;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < runs; ++i) {
    auto rng = Rng::stream(seed, i);
    const auto r = ubqc_run(g, p, x, o, server, rng);
    if (r.aborted) continue;
    d[r.outputs] += 1.0;
    ++kept;
  }
  for (auto& [_, v] : d) v /= static_cast<double>(kept);
  return d;
}

// Flips the reported outcome of one qubit during a single call window.
class OneShotFlip final : public ServerPolicy {
 public:
  OneShotFlip(Label target, std::size_t which) : target_(std::move(target)), which_(which) {}
  bool report_outcome(const Label& qubit, bool b) override {
    if (qubit != target_) return b;
    return seen_++ == which_ ? !b : b;
  }

 private:
  Label target_;
  std::size_t which_;
  std::size_t seen_ = 0;
};

}  // namespace

TEST(ResourceExtender, Examples) {
  ResourceExtender ext;
  auto branches = enumerate_branches([&](RandomSource& rng) {
    PureState s;
    s.add_plus("s");
    const auto out = ext.extend(s, "s", 0, Angle8{1}, "p", rng);
    return std::pair{out.b, s};
  });
  ASSERT_EQ(branches.size(), 2U);
  for (const auto& br : branches) {
    const auto& [b, st] = br.result;
    EXPECT_NEAR(br.probability, 0.5, 1e-12);
    EXPECT_NEAR(fidelity_up_to_phase(st, rotated_pair(1.0, 1.0, b ? Angle8{7} : Angle8{1})), 1.0, 1e-12);
  }
  Rng rng(3);
  PureState s;
  s.add_plus("s");
  ext.extend(s, "s", 0, Angle8{}, "p", rng);
  EXPECT_NEAR(fidelity_up_to_phase(s, rotated_pair(1.0, 1.0, Angle8{})), 1.0, 1e-12);
}

TEST(Protocol2, PathWithOneEmitter) {
  const auto g = presets::path(2);
  const std::vector<Angle8> th{Angle8{1}, Angle8{2}};
  for (const auto& br : enumerate_branches([&](RandomSource& rng) {
         ResourceExtender ext;
         return protocol2_blind_rsp(g, th, single_emitter(g), ext, rng).state;
       }))
    EXPECT_NEAR(fidelity_up_to_phase(br.result, build_blind_graph_state(g, th)), 1.0, 1e-10);
}

TEST(Protocol2, ClusterWithSpinLinks) {
  Rng rng(21);
  const auto g = presets::cluster(3, 2);
  for (int rep = 0; rep < 20; ++rep) {
    const auto th = random_angles(g.size(), rng);
    ResourceExtender ext;
    const auto r = protocol2_blind_rsp(g, th, presets::row_emitters(3, 2), ext, rng);
    EXPECT_FALSE(r.aborted);
    EXPECT_NEAR(fidelity_up_to_phase(r.state, build_blind_graph_state(g, th)), 1.0, 1e-10);
  }
}

TEST(Protocol2, ExtraEmissionsCollapse) {
  Rng rng(22);
  for (const auto& g : {presets::path(3), presets::cluster(2, 2)}) {
    RspOptions opt{std::vector<std::size_t>(g.size(), 2)};
    const auto emitters = g.size() == 3 ? single_emitter(g) : presets::row_emitters(2, 2);
    for (int rep = 0; rep < 5; ++rep) {
      ResourceExtender ext;
      const auto r = protocol2_blind_rsp(g, std::vector<Angle8>(g.size()), emitters, ext, rng, opt);
      EXPECT_NEAR(fidelity_up_to_phase(r.state, build_graph_state(g)), 1.0, 1e-10);
    }
  }
}

TEST(Protocol2, GadgetExtenderBuildsSameState) {
  Rng rng(23);
  HonestServer server;
  const auto g = presets::cluster(2, 2);
  GadgetExtender ext(GadgetParams{0.5, 6, 2.0, 1.0}, server);
  for (int rep = 0; rep < 10; ++rep) {
    const auto th = random_angles(g.size(), rng);
    const auto r = protocol2_blind_rsp(g, th, one_emitter_per_vertex(g), ext, rng);
    ASSERT_FALSE(r.aborted);
    EXPECT_NEAR(fidelity_up_to_phase(r.state, build_blind_graph_state(g, th)), 1.0, 1e-10);
  }
}

TEST(Protocol2, RejectsInvalidAssignments) {
  Rng rng(1);
  ResourceExtender ext;
  const auto g = presets::cluster(2, 2);
  const std::vector<Angle8> th(4);
  // single emitter zig-zagging a square needs a link to a vertex it already left
  EXPECT_THROW(protocol2_blind_rsp(g, th, single_emitter(g), ext, rng), std::invalid_argument);
  EXPECT_THROW(protocol2_blind_rsp(g, th, {{0, 1}}, ext, rng), std::invalid_argument);
  EXPECT_THROW(protocol2_blind_rsp(g, th, {{0, 3}, {1, 2}}, ext, rng), std::invalid_argument);
  EXPECT_THROW(protocol2_blind_rsp(g, std::vector<Angle8>(3), presets::row_emitters(2, 2), ext, rng),
               std::invalid_argument);
}

TEST(Protocol3, SinglePulseBellPair) {
  Rng rng(2);
  HonestServer server;
  for (int rep = 0; rep < 20; ++rep) {
    auto s = spin_in(1.0, 1.0);
    const auto r = protocol3_gadget(s, "s", Angle8{}, "p", {0.5, 1, 0.0, 1.0}, server, rng);
    ASSERT_FALSE(r.aborted);
    EXPECT_NEAR(fidelity_up_to_phase(s, rotated_pair(1.0, 1.0, Angle8{})), 1.0, 1e-12);
  }
}

TEST(Protocol3, SuccessStateIsExactForAllAngles) {
  Rng rng(4);
  HonestServer server;
  for (std::size_t n = 1; n <= 6; ++n)
    for (int j = 0; j < 8; ++j)
      for (int rep = 0; rep < 100; ++rep) {
        auto s = spin_in(kAlpha, kBeta);
        const auto r = protocol3_gadget(s, "s", Angle8{j}, "p", {0.5, n, 0.0, 1.0}, server, rng);
        ASSERT_FALSE(r.aborted);
        ASSERT_EQ(s.num_qubits(), 2U);
        EXPECT_NEAR(fidelity_up_to_phase(s, rotated_pair(kAlpha, kBeta, Angle8{j}.signed_by(r.m_x))), 1.0, 1e-10);
      }
}

TEST(Protocol3, LossyRunsStayExactWhenNotAborting) {
  Rng rng(5);
  HonestServer server;
  std::size_t ok = 0;
  for (int rep = 0; rep < 500; ++rep) {
    auto s = spin_in(kAlpha, kBeta);
    const auto r = protocol3_gadget(s, "s", Angle8{3}, "p", {0.5, 6, 2.0, 0.6}, server, rng);
    if (r.aborted) continue;
    ++ok;
    EXPECT_GT(r.set_size, 2U);
    EXPECT_NEAR(fidelity_up_to_phase(s, rotated_pair(kAlpha, kBeta, Angle8{3}.signed_by(r.m_x))), 1.0, 1e-10);
  }
  EXPECT_GT(ok, 100U);
}

TEST(Protocol3, AbortRateBelowHoeffdingBound) {
  HonestServer server;
  for (double eta : {0.7, 0.9})
    for (double gap : {0.05, 0.1})
      for (std::size_t n : {20U, 50U}) {
        const double t = (eta - gap) * static_cast<double>(n);
        const double bound = std::exp(-2.0 * gap * gap * static_cast<double>(n));
        const std::size_t runs = 2000;
        std::size_t aborts = 0;
        for (std::size_t i = 0; i < runs; ++i) {
          auto rng = Rng::stream(99, i);
          auto s = spin_in(1.0, 1.0);
          aborts += protocol3_gadget(s, "s", Angle8{1}, "p", {0.5, n, t, eta}, server, rng).aborted;
        }
        const double sigma = std::sqrt(bound * (1 - bound) / runs);
        EXPECT_LE(static_cast<double>(aborts) / runs, bound + 4 * sigma) << eta << " " << gap << " " << n;
      }
}

TEST(Protocol3, NoAbortsAtLargeMargin) {
  HonestServer server;
  const auto params = GadgetParams{0.5, 100, 49.51, 0.9};
  std::size_t aborts = 0;
  for (std::size_t i = 0; i < 10000; ++i) {
    auto rng = Rng::stream(5, i);
    auto s = spin_in(1.0, 1.0);
    aborts += protocol3_gadget(s, "s", Angle8{2}, "p", params, server, rng).aborted;
  }
  EXPECT_EQ(aborts, 0U);
}

TEST(Protocol3, TranscriptHidesSinglePhotonAngles) {
  Rng rng(6);
  HonestServer server;
  auto s = spin_in(1.0, 1.0);
  Transcript tr;
  const auto r = protocol3_gadget(s, "s", Angle8{5}, "p", {3.0, 8, 1.0, 1.0}, server, rng, &tr, 4);
  ASSERT_FALSE(r.aborted);
  EXPECT_EQ(tr.all<msg::PulseSent>().size(), 8U);
  ASSERT_EQ(tr.all<msg::SetS>().size(), 1U);
  EXPECT_EQ(tr.all<msg::SetS>()[0].indices.size(), 8U);
  ASSERT_EQ(tr.all<msg::Correction>().size(), 1U);
  EXPECT_EQ(tr.all<msg::Correction>()[0].theta_bar, r.theta_bar);
  std::ostringstream os;
  write_jsonl(os, tr);
  std::istringstream in(os.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.at("round"), 4);
    if (j.at("type") == "pulse") {
      EXPECT_EQ(j.contains("theta"), j.at("view") == "full_leak");
    }
    ++lines;
  }
  EXPECT_EQ(lines, tr.size());
}

TEST(Protocol3, ParamValidation) {
  Rng rng(1);
  HonestServer server;
  auto s = spin_in(1.0, 1.0);
  EXPECT_THROW(protocol3_gadget(s, "s", Angle8{}, "p", {0.0, 5, 1.0, 0.9}, server, rng), std::invalid_argument);
  EXPECT_THROW(protocol3_gadget(s, "s", Angle8{}, "p", {0.5, 0, 0.0, 0.9}, server, rng), std::invalid_argument);
  EXPECT_THROW(protocol3_gadget(s, "s", Angle8{}, "p", {0.5, 5, 6.0, 0.9}, server, rng), std::invalid_argument);
  EXPECT_THROW(protocol3_gadget(s, "s", Angle8{}, "p", {0.5, 5, 1.0, 1.2}, server, rng), std::invalid_argument);
  const auto d = GadgetParams::with_default_threshold(0.5, 100, 0.9);
  EXPECT_NEAR(d.t, 50 * (0.9 + multiphoton_prob(0.5)), 1e-12);
}

TEST(Protocol5, LosslessIsExact) {
  Rng rng(7);
  for (int j = 0; j < 8; ++j)
    for (std::size_t n : {1U, 3U, 5U})
      for (int rep = 0; rep < 20; ++rep) {
        auto s = spin_in(kAlpha, kBeta);
        const auto r = protocol5_postselected(s, "s", Angle8{j}, "p", 0.5, n, 1.0, rng);
        ASSERT_FALSE(r.aborted);
        EXPECT_NEAR(fidelity_up_to_phase(s, rotated_pair(kAlpha, kBeta, Angle8{j}.signed_by(r.m_x))), 1.0, 1e-10);
      }
}

TEST(Protocol5, AbortRateIsOneMinusEtaToTheN) {
  const std::size_t runs = 20000, n = 10;
  std::size_t aborts = 0;
  for (std::size_t i = 0; i < runs; ++i) {
    auto rng = Rng::stream(8, i);
    auto s = spin_in(1.0, 1.0);
    aborts += protocol5_postselected(s, "s", Angle8{2}, "p", 0.5, n, 0.9, rng).aborted;
  }
  const double p = 1 - std::pow(0.9, 10);
  EXPECT_NEAR(static_cast<double>(aborts) / runs, p, 4 * std::sqrt(p * (1 - p) / runs));
}

TEST(Protocol5, TranscriptCarriesOnlyTheBit) {
  Rng rng(9);
  auto s = spin_in(1.0, 1.0);
  Transcript tr;
  const auto r = protocol5_postselected(s, "s", Angle8{2}, "p", 0.5, 3, 1.0, rng, &tr);
  ASSERT_EQ(tr.all<msg::CorrectionBit>().size(), 1U);
  EXPECT_EQ(tr.all<msg::CorrectionBit>()[0].m_x, r.m_x);
  EXPECT_TRUE(tr.all<msg::Correction>().empty());
}

TEST(Ubqc, IdentityPatternOutputsInput) {
  const auto g = presets::path(3);
  const MeasurementPattern p{std::vector<Angle8>(3)};
  HonestServer server;
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    for (bool x : {false, true}) {
      Rng rng(seed);
      const auto r = ubqc_run(g, p, {x}, {}, server, rng);
      EXPECT_EQ(r.outputs, std::vector<bool>{x});
    }
}

TEST(Ubqc, MatchesMbqcDistribution) {
  const auto g = presets::cluster(2, 2);
  const MeasurementPattern p{{Angle8{1}, Angle8{3}, Angle8{6}, Angle8{2}}};
  const auto exact = exact_mbqc(g, p, {true, false});
  EXPECT_LT(tv(sampled_ubqc(g, p, {true, false}, {}, 10000, 31), exact), 0.02);
  UbqcOptions res;
  res.source = StateSource::Protocol2Resource;
  EXPECT_LT(tv(sampled_ubqc(g, p, {true, false}, res, 4000, 32), exact), 0.03);
}

TEST(Ubqc, MergedCorrectionsGiveSameDistribution) {
  const auto g = presets::path(2);
  const MeasurementPattern p{{Angle8{1}, Angle8{5}}};
  const auto exact = exact_mbqc(g, p, {false});
  UbqcOptions applied;
  applied.source = StateSource::Protocol2Gadget;
  applied.gadget = GadgetParams{0.5, 6, 2.0, 1.0};
  auto merged = applied;
  merged.merge_corrections = true;
  const auto a = sampled_ubqc(g, p, {false}, applied, 4000, 41);
  const auto m = sampled_ubqc(g, p, {false}, merged, 4000, 42);
  EXPECT_LT(tv(a, exact), 0.03);
  EXPECT_LT(tv(m, exact), 0.03);
  EXPECT_LT(tv(a, m), 0.04);
}

TEST(Ubqc, UnencryptedAnglesAreVisible) {
  const auto g = presets::path(2);
  const MeasurementPattern p{{Angle8{1}, Angle8{3}}};
  UbqcOptions o;
  o.encrypt = false;
  HonestServer server;
  Rng rng(10);
  const auto r = ubqc_run(g, p, {true}, o, server, rng);
  const auto m = r.transcript.all<msg::MeasureInstruction>();
  ASSERT_EQ(m.size(), 2U);
  EXPECT_EQ(m[0].delta, Angle8{5});  // phi + x pi
  EXPECT_EQ(m[1].delta, Angle8{3}.signed_by(r.s[0]));
  EXPECT_EQ(r.transcript.all<msg::Outcome>().size(), 2U);
}

TEST(Ubqc, Errors) {
  HonestServer server;
  Rng rng(1);
  const auto g = presets::path(2);
  EXPECT_THROW(ubqc_run(g, {{Angle8{}}}, {false}, {}, server, rng), std::invalid_argument);
  EXPECT_THROW(ubqc_run(g, {{Angle8{}, Angle8{}}}, {false, true}, {}, server, rng), std::invalid_argument);
}

TEST(Sdqc, HonestServerNeverAborts) {
  const auto g = presets::cluster(2, 2);
  const MeasurementPattern p{std::vector<Angle8>(4)};
  const auto expected = exact_mbqc(g, p, {true, false});
  ASSERT_EQ(expected.size(), 1U);
  SdqcParams params;
  params.w = 0;
  HonestServer server;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto r = sdqc_run(g, p, {true, false}, params, server, rng);
    EXPECT_FALSE(r.aborted);
    EXPECT_EQ(r.output, expected.begin()->first);
    EXPECT_EQ(r.test_rounds.size(), 10U);
    for (bool parity : r.test_parities) EXPECT_FALSE(parity);
  }
}

TEST(Sdqc, ZDeviationIsCaughtByAnticommutingTests) {
  const auto g = presets::cluster(2, 2);
  const auto tests = enumerate_tests(g);
  for (Vertex v = 0; v < g.size(); ++v) {
    std::size_t anti = 0;
    for (const auto& t : tests) anti += t.paulis[v] != Pauli::I;
    ASSERT_GE(anti, 1U);
    ZDeviation server(g.label(v));
    const std::size_t runs = 3000;
    std::size_t fails = 0;
    for (std::size_t i = 0; i < runs; ++i) {
      auto rng = Rng::stream(50 + v, i);
      fails += run_test_round(g, tests, {}, server, rng).parity;
    }
    const double p = static_cast<double>(anti) / static_cast<double>(tests.size());
    EXPECT_NEAR(static_cast<double>(fails) / runs, p, 4 * std::sqrt(p * (1 - p) / runs)) << g.label(v);
    EXPECT_GE(p, 1.0 / static_cast<double>(tests.size()));
  }
}

TEST(Sdqc, SingleCorruptedRoundLosesTheVote) {
  const auto g = presets::cluster(2, 2);
  const MeasurementPattern p{std::vector<Angle8>(4)};
  const auto expected = exact_mbqc(g, p, {false, true}).begin()->first;
  SdqcParams params;
  params.w = 20;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    OneShotFlip server("0,1", 0);
    Rng rng(seed);
    const auto r = sdqc_run(g, p, {false, true}, params, server, rng);
    EXPECT_FALSE(r.aborted);
    EXPECT_EQ(r.output, expected);
  }
}

TEST(Sdqc, ParamsAndErrors) {
  SdqcParams p;
  p.N = 20;
  EXPECT_EQ(p.num_tests(), 10U);
  EXPECT_EQ(p.threshold(), 1U);
  p.test_fraction = 0.01;
  EXPECT_EQ(p.num_tests(), 1U);
  p.test_fraction = 0.99;
  EXPECT_EQ(p.num_tests(), 19U);
  p.N = 1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.N = 10;
  p.test_fraction = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}
