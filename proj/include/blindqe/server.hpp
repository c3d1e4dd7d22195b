#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "blindqe/angle.hpp"
#include "blindqe/pulses.hpp"
#include "blindqe/qstate.hpp"

namespace blindqe {

/// Server behaviour. The default implementation is the honest server; a
/// deviating server overrides the hooks it wants to corrupt.
class ServerPolicy {
 public:
  virtual ~ServerPolicy() = default;

  /// Set S reported after the gadget's photon measurements. `pulses` is the
  /// full photon-number record (a QND-capable server sees it).
  virtual std::vector<std::size_t> choose_set(const std::vector<PulseRecord>& pulses,
                                              const std::vector<bool>& detected) {
    (void)pulses;
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < detected.size(); ++i)
      if (detected[i]) s.push_back(i);
    return s;
  }

  /// Called right before `qubit` is measured at angle `delta`.
  virtual void before_measure(PureState& state, const Label& qubit, Angle8& delta) {
    (void)state;
    (void)qubit;
    (void)delta;
  }

  virtual bool report_outcome(const Label& qubit, bool b) {
    (void)qubit;
    return b;
  }
};

using HonestServer = ServerPolicy;

/// Reports exactly the multi-photon pulses as S: every angle in S leaks.
class MultiphotonReporter final : public ServerPolicy {
 public:
  std::vector<std::size_t> choose_set(const std::vector<PulseRecord>& pulses,
                                      const std::vector<bool>&) override {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < pulses.size(); ++i)
      if (pulses[i].k >= 2) s.push_back(i);
    return s;
  }
};

/// Applies a Pauli Z to one fixed qubit just before it is measured.
class ZDeviation final : public ServerPolicy {
 public:
  explicit ZDeviation(Label target) : target_(std::move(target)) {}

  void before_measure(PureState& state, const Label& qubit, Angle8&) override {
    if (qubit == target_) state.apply_1q(qubit, mat2::pauli_z());
  }

 private:
  Label target_;
};

/// Flips every reported outcome of one qubit.
class OutcomeFlip final : public ServerPolicy {
 public:
  explicit OutcomeFlip(Label target) : target_(std::move(target)) {}

  bool report_outcome(const Label& qubit, bool b) override { return qubit == target_ ? !b : b; }

 private:
  Label target_;
};

}  // namespace blindqe
