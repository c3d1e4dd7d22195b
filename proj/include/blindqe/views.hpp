#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "blindqe/angle.hpp"
#include "blindqe/density.hpp"
#include "blindqe/enumerate.hpp"
#include "blindqe/qstate.hpp"

namespace blindqe {

/// Classical part of a view together with the (sub-normalised) state of the
/// server's qubits on that branch: sum over branches of p * rho.
struct CqEntry {
  double probability = 0.0;
  DensityMatrix weighted_state;
};

using CqView = std::map<std::string, CqEntry>;

/// What one enumerated branch shows the distinguisher.
struct BranchView {
  std::string key;
  PureState state;               // may contain qubits the distinguisher does not hold
  std::vector<Label> server_qubits;
};

/// Exact cq view of a procedure drawing only discrete randomness.
template <class Fn>
CqView exact_view(Fn&& fn) {
  CqView view;
  for (auto& br : enumerate_branches(std::forward<Fn>(fn))) {
    const auto rho = reduced_density(br.result.state, br.result.server_qubits).scaled(br.probability);
    auto it = view.find(br.result.key);
    if (it == view.end()) {
      view.emplace(br.result.key, CqEntry{br.probability, rho});
    } else {
      it->second.probability += br.probability;
      it->second.weighted_state += rho;
    }
  }
  return view;
}

struct ViewComparison {
  double max_probability_gap = 0.0;
  double max_state_gap = 0.0;      // entrywise, on the weighted states
  std::vector<std::string> unmatched;

  bool equal(double tol = 1e-10) const {
    return unmatched.empty() && max_probability_gap <= tol && max_state_gap <= tol;
  }
};

/// Compares two cq views key by key; keys with probability below 1e-14 on
/// one side must be absent or negligible on the other.
inline ViewComparison compare_views(const CqView& a, const CqView& b) {
  ViewComparison c;
  auto visit = [&](const CqView& x, const CqView& y, bool record_gap) {
    for (const auto& [key, ex] : x) {
      const auto it = y.find(key);
      if (it == y.end()) {
        if (ex.probability > 1e-14) c.unmatched.push_back(key);
        continue;
      }
      if (!record_gap) continue;
      c.max_probability_gap = std::max(c.max_probability_gap, std::abs(ex.probability - it->second.probability));
      c.max_state_gap = std::max(c.max_state_gap, max_abs_difference(ex.weighted_state, it->second.weighted_state));
    }
  };
  visit(a, b, true);
  visit(b, a, false);
  return c;
}

/// Total-variation distance between the classical marginals of two views.
inline double classical_tv(const CqView& a, const CqView& b) {
  double s = 0.0;
  for (const auto& [key, e] : a) {
    const auto it = b.find(key);
    s += std::abs(e.probability - (it == b.end() ? 0.0 : it->second.probability));
  }
  for (const auto& [key, e] : b)
    if (!a.contains(key)) s += e.probability;
  return 0.5 * s;
}

inline double total_probability(const CqView& v) {
  double s = 0.0;
  for (const auto& [_, e] : v) s += e.probability;
  return s;
}

namespace detail {
inline std::string view_key(const std::string& head, const std::vector<std::uint64_t>& k,
                            const std::vector<Angle8>& thetas, const std::string& tail) {
  std::ostringstream os;
  os << head << "|leak:";
  for (std::size_t i = 0; i < k.size(); ++i)
    if (k[i] >= 2) os << i << '=' << thetas[i].value() << ',';
  os << '|' << tail;
  return os.str();
}
inline Label pulse_qubit(std::size_t i) { return "pulse" + std::to_string(i); }
}  // namespace detail

}  // namespace blindqe
