#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "blindqe/angle.hpp"
#include "blindqe/views.hpp"

namespace blindqe {

inline constexpr std::size_t kMaxBlindnessPulses = 3;

using ClassicalView = std::map<std::string, double>;

/// Exact distribution of (leaked angles, theta_bar, m_x) or abort, for client
/// angle `theta`, by counting over Phi^n x {0,1}. Single-photon qubits outside
/// S carry angles that appear nowhere else, so they only add a maximally
/// mixed factor and are left out.
inline ClassicalView gadget_classical_view(Angle8 theta, const std::vector<std::uint64_t>& k,
                                           const std::vector<std::size_t>& S, double t = 0.0) {
  const std::size_t n = k.size();
  if (n == 0 || n > kMaxBlindnessPulses) throw std::invalid_argument("blindness_check needs 1..3 pulses");
  for (auto i : S)
    if (i >= n) throw std::out_of_range("S names a pulse outside the batch");
  std::size_t combos = 1;
  for (std::size_t i = 0; i < n; ++i) combos *= 8;
  const double w = 1.0 / (2.0 * static_cast<double>(combos));
  const bool abort = static_cast<double>(S.size()) <= t;
  ClassicalView out;
  std::vector<Angle8> thetas(n);
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t c = code;
    for (auto& th : thetas) {
      th = Angle8{static_cast<int>(c % 8)};
      c /= 8;
    }
    for (int m = 0; m < 2; ++m) {
      if (abort) {
        out[detail::view_key("abort", k, thetas, "")] += w;
        continue;
      }
      Angle8 tb = theta.signed_by(m != 0);
      for (auto i : S) tb -= thetas[i];
      out[detail::view_key("corr", k, thetas, "tb=" + std::to_string(tb.value()) + ";m=" + std::to_string(m))] += w;
    }
  }
  return out;
}

inline double total_variation(const ClassicalView& a, const ClassicalView& b) {
  double s = 0.0;
  for (const auto& [key, p] : a) {
    const auto it = b.find(key);
    s += std::abs(p - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [key, p] : b)
    if (!a.contains(key)) s += p;
  return 0.5 * s;
}

struct BlindnessResult {
  double max_tv = 0.0;
  Angle8 theta_a{}, theta_b{};  // a pair attaining max_tv
};

/// Max over client angle pairs of the TV distance between server views.
inline BlindnessResult blindness_check(const std::vector<std::uint64_t>& k, const std::vector<std::size_t>& S,
                                       double t = 0.0) {
  std::vector<ClassicalView> views;
  for (int j = 0; j < 8; ++j) views.push_back(gadget_classical_view(Angle8{j}, k, S, t));
  BlindnessResult r;
  for (int a = 0; a < 8; ++a)
    for (int b = a + 1; b < 8; ++b) {
      const double tv = total_variation(views[a], views[b]);
      if (tv > r.max_tv) r = {tv, Angle8{a}, Angle8{b}};
    }
  return r;
}

struct BlindnessRow {
  std::vector<std::uint64_t> k;
  std::vector<std::size_t> S;
  bool single_photon_in_S = false;
  double max_tv = 0.0;
};

/// Every k in {0,1,2}^n and every non-empty S (t = 0, so nothing aborts).
inline std::vector<BlindnessRow> blindness_table(std::size_t n) {
  if (n == 0 || n > kMaxBlindnessPulses) throw std::invalid_argument("blindness table needs 1..3 pulses");
  std::size_t kc = 1;
  for (std::size_t i = 0; i < n; ++i) kc *= 3;
  std::vector<BlindnessRow> rows;
  for (std::size_t code = 0; code < kc; ++code) {
    std::vector<std::uint64_t> k(n);
    std::size_t c = code;
    for (auto& x : k) {
      x = c % 3;
      c /= 3;
    }
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
      BlindnessRow row;
      row.k = k;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1U) {
          row.S.push_back(i);
          row.single_photon_in_S = row.single_photon_in_S || k[i] == 1;
        }
      row.max_tv = blindness_check(row.k, row.S).max_tv;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace blindqe
