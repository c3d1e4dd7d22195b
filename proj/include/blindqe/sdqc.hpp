#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "blindqe/stabilizer_tests.hpp"
#include "blindqe/ubqc.hpp"

namespace blindqe {

struct SdqcParams {
  std::size_t N = 20;
  double test_fraction = 0.5;
  /// Tolerated number of failed tests; default floor(#tests / 10).
  std::optional<std::size_t> w;
  UbqcOptions ubqc;

  void validate() const {
    if (N < 2) throw std::invalid_argument("SDQC needs N >= 2 rounds");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw std::invalid_argument("test_fraction must lie in (0, 1)");
  }

  /// round(test_fraction * N), kept inside [1, N - 1].
  std::size_t num_tests() const {
    const auto t = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(N)));
    return std::clamp<std::size_t>(t, 1, N - 1);
  }

  std::size_t threshold() const { return w.value_or(num_tests() / 10); }
};

struct TestRoundResult {
  std::size_t test_index = 0;
  bool parity = false;  // corrected parity (outcome parity xor sign); 0 means pass
  bool aborted = false;
};

/// One hidden test round: X at angle 0, Y at pi/2, unconstrained vertices at
/// a uniformly random angle, all padded exactly like a computation round.
inline TestRoundResult run_test_round(const Graph& g, const std::vector<StabilizerTest>& tests,
                                      const UbqcOptions& options, ServerPolicy& server, RandomSource& rng,
                                      Transcript* transcript = nullptr, std::size_t round = 0) {
  TestRoundResult out;
  out.test_index = static_cast<std::size_t>(rng.uniform_below(tests.size()));
  const auto& test = tests[out.test_index];
  auto res = prepare_blind_resource(g, options, server, rng, transcript);
  if (res.aborted) {
    out.aborted = true;
    return out;
  }
  std::vector<Angle8> angle(g.size());
  for (Vertex v = 0; v < g.size(); ++v) {
    switch (test.paulis[v]) {
      case Pauli::X: angle[v] = Angle8{0}; break;
      case Pauli::Y: angle[v] = Angle8::half_pi(); break;
      case Pauli::I: angle[v] = rng.uniform_angle(); break;
      case Pauli::Z: throw std::logic_error("stabilizer test acts as Z");
    }
  }
  std::vector<bool> r(g.size());
  for (Vertex v = 0; v < g.size(); ++v) r[v] = options.encrypt ? rng.fair_bit() : false;
  const auto s = delegate_measurements(
      g, res, [&](Vertex v, const std::vector<bool>&) { return angle[v]; }, r, server, rng, transcript, round);
  bool parity = test.negative;
  for (Vertex v = 0; v < g.size(); ++v)
    if (test.paulis[v] != Pauli::I) parity ^= s[v];
  out.parity = parity;
  return out;
}

struct SdqcResult {
  bool aborted = false;
  std::vector<bool> output;
  std::vector<std::size_t> test_rounds;
  std::vector<bool> test_parities;  // per test round, in round order
  std::size_t failed_tests = 0;
  std::size_t computation_rounds = 0;
};

/// SDQC by UBQC repetition with hidden stabilizer test rounds.
inline SdqcResult sdqc_run(const Graph& g, const MeasurementPattern& pattern, const std::vector<bool>& x,
                           const SdqcParams& params, ServerPolicy& server, RandomSource& rng,
                           Transcript* transcript = nullptr) {
  params.validate();
  g.validate_flow();
  pattern.validate_for(g);
  const auto tests = enumerate_tests(g);
  if (tests.empty()) throw std::invalid_argument("graph admits no stabilizer tests");

  // uniform subset of size #tests by a partial Fisher-Yates shuffle
  std::vector<std::size_t> rounds(params.N);
  for (std::size_t i = 0; i < params.N; ++i) rounds[i] = i;
  const std::size_t t = params.num_tests();
  for (std::size_t i = 0; i < t; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_below(params.N - i));
    std::swap(rounds[i], rounds[j]);
  }
  std::vector<bool> is_test(params.N, false);
  for (std::size_t i = 0; i < t; ++i) is_test[rounds[i]] = true;

  SdqcResult out;
  std::map<std::vector<bool>, std::size_t> votes;
  bool resource_abort = false;
  for (std::size_t round = 0; round < params.N; ++round) {
    if (is_test[round]) {
      const auto tr = run_test_round(g, tests, params.ubqc, server, rng, transcript, round);
      resource_abort = resource_abort || tr.aborted;
      out.test_rounds.push_back(round);
      out.test_parities.push_back(tr.parity);
      out.failed_tests += tr.parity || tr.aborted;
    } else {
      auto r = ubqc_run(g, pattern, x, params.ubqc, server, rng, round);
      resource_abort = resource_abort || r.aborted;
      if (transcript) transcript->append(r.transcript);
      if (!r.aborted) {
        ++votes[r.outputs];
        ++out.computation_rounds;
      }
    }
  }
  if (resource_abort || out.failed_tests > params.threshold()) {
    out.aborted = true;
    return out;
  }
  std::size_t best = 0;
  for (const auto& [bits, count] : votes)
    if (count > best) {
      best = count;
      out.output = bits;
    }
  return out;
}

}  // namespace blindqe
