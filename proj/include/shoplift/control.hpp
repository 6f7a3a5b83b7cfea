#pragma once

// Control channel between the decision service and edge agents: threshold
// updates and model swaps, versioned per camera.

#include <cstdint>
#include <optional>
#include <string>

#include "shoplift/json_fields.hpp"

namespace shoplift {

struct ControlMessage {
  std::string camera_id;
  std::uint64_t version = 0;
  std::string token;
  std::optional<double> threshold;
  // A TrainedModel document, validated by the receiving agent.
  std::optional<Json> model;

  friend bool operator==(const ControlMessage&, const ControlMessage&) = default;
};

struct ControlAck {
  std::string camera_id;
  std::uint64_t version = 0;
  bool accepted = false;
  std::optional<std::string> reason;

  friend bool operator==(const ControlAck&, const ControlAck&) = default;
};

Json to_json(const ControlMessage& message);
ControlMessage control_message_from_json(const Json& j);
Json to_json(const ControlAck& ack);
ControlAck control_ack_from_json(const Json& j);

// Delivers a control message to a live agent. Returns std::nullopt when the
// agent cannot be reached.
class AgentControlLink {
 public:
  virtual ~AgentControlLink() = default;
  virtual std::optional<ControlAck> push(const ControlMessage& message) = 0;
};

}  // namespace shoplift
