#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "blindqe/qstate.hpp"

namespace blindqe {

inline constexpr std::size_t kMaxDensityQubits = 5;

using CMatrix = Eigen::MatrixXcd;

/// Exact density matrix over at most five labelled qubits. Same bit order as
/// PureState: labels()[k] is bit k of the row/column index.
class DensityMatrix {
 public:
  DensityMatrix() : rho_(CMatrix::Ones(1, 1)) {}

  DensityMatrix(std::vector<Label> labels, CMatrix rho) : labels_(std::move(labels)), rho_(std::move(rho)) {
    if (labels_.size() > kMaxDensityQubits) throw std::length_error("density oracle is limited to 5 qubits");
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << labels_.size());
    if (rho_.rows() != dim || rho_.cols() != dim) throw std::invalid_argument("density matrix dimension mismatch");
  }

  static DensityMatrix zero(std::vector<Label> labels) {
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << labels.size());
    return DensityMatrix(std::move(labels), CMatrix::Zero(dim, dim));
  }

  static DensityMatrix from_pure(const PureState& s) {
    const auto amps = s.amplitudes();
    Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps[i];
    return DensityMatrix(s.labels(), v * v.adjoint());
  }

  const std::vector<Label>& labels() const { return labels_; }
  const CMatrix& matrix() const { return rho_; }

  /// Reduced state on `keep` (in that order), tracing out everything else.
  DensityMatrix partial_trace_keep(const std::vector<Label>& keep) const {
    std::vector<std::size_t> keep_bits;
    for (const auto& l : keep) keep_bits.push_back(bit_of(l));
    std::vector<std::size_t> traced_bits;
    for (std::size_t k = 0; k < labels_.size(); ++k) {
      bool kept = false;
      for (auto b : keep_bits) kept = kept || b == k;
      if (!kept) traced_bits.push_back(k);
    }
    const std::size_t dk = std::size_t{1} << keep_bits.size();
    const std::size_t dt = std::size_t{1} << traced_bits.size();
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    auto compose = [&](std::size_t a, std::size_t t) {
      std::size_t idx = 0;
      for (std::size_t k = 0; k < keep_bits.size(); ++k)
        if (a >> k & 1U) idx |= std::size_t{1} << keep_bits[k];
      for (std::size_t k = 0; k < traced_bits.size(); ++k)
        if (t >> k & 1U) idx |= std::size_t{1} << traced_bits[k];
      return static_cast<Eigen::Index>(idx);
    };
    for (std::size_t a = 0; a < dk; ++a)
      for (std::size_t b = 0; b < dk; ++b) {
        std::complex<double> s{};
        for (std::size_t t = 0; t < dt; ++t) s += rho_(compose(a, t), compose(b, t));
        out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s;
      }
    return DensityMatrix(keep, std::move(out));
  }

  /// Matrix with rows/columns re-indexed so that `order[k]` is bit k.
  CMatrix matrix_in_order(const std::vector<Label>& order) const {
    if (order.size() != labels_.size()) throw std::invalid_argument("label sets differ");
    return partial_trace_keep(order).rho_;
  }

  DensityMatrix& operator+=(const DensityMatrix& o) {
    rho_ += o.matrix_in_order(labels_);
    return *this;
  }

  DensityMatrix scaled(double w) const { return DensityMatrix(labels_, rho_ * w); }

  double trace() const { return rho_.trace().real(); }

  /// Hermitian, unit trace and positive semidefinite within the given tolerances.
  bool is_valid(double trace_tol = 1e-10, double psd_tol = 1e-9) const {
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > trace_tol) return false;
    if (std::abs(rho_.trace() - std::complex<double>{1.0}) > trace_tol) return false;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho_);
    return es.eigenvalues().minCoeff() >= -psd_tol;
  }

 private:
  std::size_t bit_of(const Label& l) const {
    for (std::size_t k = 0; k < labels_.size(); ++k)
      if (labels_[k] == l) return k;
    throw std::out_of_range("unknown qubit label '" + l + "'");
  }

  std::vector<Label> labels_;
  CMatrix rho_;
};

/// Reduced density matrix of a pure state on `keep`. Works for registers
/// larger than the oracle cap as long as `keep` itself fits.
inline DensityMatrix reduced_density(const PureState& s, const std::vector<Label>& keep) {
  if (keep.size() > kMaxDensityQubits) throw std::length_error("density oracle is limited to 5 qubits");
  std::vector<std::size_t> keep_bits;
  for (const auto& l : keep) keep_bits.push_back(s.index_of(l));
  const std::size_t dk = std::size_t{1} << keep.size();
  std::size_t keep_mask = 0;
  for (auto b : keep_bits) keep_mask |= std::size_t{1} << b;
  const auto amps = s.amplitudes();
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  // Group amplitudes by the traced-out bits; each group contributes |v><v|.
  std::vector<std::complex<double>> vec(dk);
  for (std::size_t rest = 0; rest < amps.size(); ++rest) {
    if (rest & keep_mask) continue;
    for (std::size_t a = 0; a < dk; ++a) {
      std::size_t idx = rest;
      for (std::size_t k = 0; k < keep_bits.size(); ++k)
        if (a >> k & 1U) idx |= std::size_t{1} << keep_bits[k];
      vec[a] = amps[idx];
    }
    for (std::size_t a = 0; a < dk; ++a)
      for (std::size_t b = 0; b < dk; ++b)
        out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += vec[a] * std::conj(vec[b]);
  }
  return DensityMatrix(keep, std::move(out));
}

/// (1/2)||a - b||_1 after matching label orders.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  const CMatrix diff = a.matrix() - b.matrix_in_order(a.labels());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(diff);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double max_abs_difference(const DensityMatrix& a, const DensityMatrix& b) {
  return (a.matrix() - b.matrix_in_order(a.labels())).cwiseAbs().maxCoeff();
}

}  // namespace blindqe
