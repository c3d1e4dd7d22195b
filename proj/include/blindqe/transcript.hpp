#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "blindqe/angle.hpp"
#include "blindqe/pulses.hpp"

namespace blindqe {

enum class Direction { ClientToServer, ServerToClient };

namespace msg {
struct PulseSent {
  std::size_t index;
  LeakView view;
};
struct SetS {
  std::vector<std::size_t> indices;
};
struct Abort {};
struct Correction {
  Angle8 theta_bar;
  bool m_x;
};
struct CorrectionBit {
  bool m_x;
};
struct MeasureInstruction {
  std::string qubit;
  Angle8 delta;
};
struct Outcome {
  std::string qubit;
  bool b;
};
}  // namespace msg

using Message = std::variant<msg::PulseSent, msg::SetS, msg::Abort, msg::Correction, msg::CorrectionBit,
                             msg::MeasureInstruction, msg::Outcome>;

struct TranscriptEntry {
  std::size_t round;
  Direction direction;
  Message message;
};

/// Ordered record of every client/server message of one execution.
class Transcript {
 public:
  void record(std::size_t round, Direction d, Message m) { entries_.push_back({round, d, std::move(m)}); }
  void client(std::size_t round, Message m) { record(round, Direction::ClientToServer, std::move(m)); }
  void server(std::size_t round, Message m) { record(round, Direction::ServerToClient, std::move(m)); }

  const std::vector<TranscriptEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  void append(const Transcript& other) { entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end()); }

  template <class T>
  std::vector<T> all() const {
    std::vector<T> out;
    for (const auto& e : entries_)
      if (const auto* p = std::get_if<T>(&e.message)) out.push_back(*p);
    return out;
  }

 private:
  std::vector<TranscriptEntry> entries_;
};

inline nlohmann::json to_json(const TranscriptEntry& e) {
  nlohmann::json j;
  j["round"] = e.round;
  j["dir"] = e.direction == Direction::ClientToServer ? "client->server" : "server->client";
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, msg::PulseSent>) {
          j["type"] = "pulse";
          j["index"] = m.index;
          j["view"] = to_string(m.view.kind);
          if (m.view.kind == LeakView::Kind::FullLeak) j["theta"] = m.view.theta.value();
        } else if constexpr (std::is_same_v<T, msg::SetS>) {
          j["type"] = "set_s";
          j["indices"] = m.indices;
        } else if constexpr (std::is_same_v<T, msg::Abort>) {
          j["type"] = "abort";
        } else if constexpr (std::is_same_v<T, msg::Correction>) {
          j["type"] = "correction";
          j["theta_bar"] = m.theta_bar.value();
          j["m_x"] = static_cast<int>(m.m_x);
        } else if constexpr (std::is_same_v<T, msg::CorrectionBit>) {
          j["type"] = "correction_bit";
          j["m_x"] = static_cast<int>(m.m_x);
        } else if constexpr (std::is_same_v<T, msg::MeasureInstruction>) {
          j["type"] = "measure";
          j["qubit"] = m.qubit;
          j["delta"] = m.delta.value();
        } else {
          j["type"] = "outcome";
          j["qubit"] = m.qubit;
          j["b"] = static_cast<int>(m.b);
        }
      },
      e.message);
  return j;
}

/// One JSON object per line; angles are integers in units of pi/4.
inline void write_jsonl(std::ostream& os, const Transcript& t) {
  for (const auto& e : t.entries()) os << to_json(e).dump() << '\n';
}

}  // namespace blindqe
