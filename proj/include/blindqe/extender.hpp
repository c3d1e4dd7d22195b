#pragma once

#include <cstddef>

#include "blindqe/angle.hpp"
#include "blindqe/gadget.hpp"
#include "blindqe/graph.hpp"
#include "blindqe/qstate.hpp"
#include "blindqe/rng.hpp"
#include "blindqe/server.hpp"
#include "blindqe/transcript.hpp"

namespace blindqe {

struct ExtensionOutput {
  bool aborted = false;
  bool b = false;
  /// Correction still owed on the new photon, split between what the client
  /// knows (an angle) and what only the server knows (a pi flip).
  Angle8 pending_client{};
  bool pending_server_pi = false;
};

/// One use of a blind graph state extender: consumes the spin, leaves the spin
/// plus a new photon `photon` (both in `state`) and returns bit b.
class Extender {
 public:
  virtual ~Extender() = default;
  virtual ExtensionOutput extend(PureState& state, const Label& spin, Vertex v, Angle8 theta, const Label& photon,
                                 RandomSource& rng) = 0;
};

/// The ideal resource: RZ((-1)^b theta) CNOT(rho (x) |0><0|), b uniform.
class ResourceExtender final : public Extender {
 public:
  ExtensionOutput extend(PureState& state, const Label& spin, Vertex, Angle8 theta, const Label& photon,
                         RandomSource& rng) override {
    ExtensionOutput out;
    out.b = rng.fair_bit();
    emit_photon(state, spin, theta.signed_by(out.b), photon);
    return out;
  }
};

/// Threshold GHZ gadget with b = m_x. In merge mode the final RZ is not
/// applied and is reported back as a pending correction.
class GadgetExtender final : public Extender {
 public:
  GadgetExtender(GadgetParams params, ServerPolicy& server, bool merge = false, Transcript* transcript = nullptr)
      : params_(params), server_(server), merge_(merge), transcript_(transcript) {}

  ExtensionOutput extend(PureState& state, const Label& spin, Vertex v, Angle8 theta, const Label& photon,
                         RandomSource& rng) override {
    const auto r = protocol3_gadget(state, spin, theta, photon, params_, server_, rng, transcript_, v, !merge_);
    ExtensionOutput out;
    out.aborted = r.aborted;
    out.b = r.m_x;
    if (merge_ && !r.aborted) {
      out.pending_client = r.theta_bar;
      out.pending_server_pi = r.parity;
    }
    return out;
  }

 private:
  GadgetParams params_;
  ServerPolicy& server_;
  bool merge_;
  Transcript* transcript_;
};

}  // namespace blindqe
