#pragma once

#include <atomic>
#include <string>

#include "shoplift/cloud_service.hpp"
#include "shoplift/inventory.hpp"

namespace shoplift::testing {

inline SuspicionEvent suspicion(const std::string& id, const std::string& zone, TimestampMs ts,
                                const std::string& camera = "cam-1", double score = 3.0) {
  return {id, camera, zone, ts, score, std::nullopt, camera + "/" + id};
}

inline StaffFeedback verdict(const std::string& alert_id, Verdict v, TimestampMs ts = 0) {
  return {alert_id, v, std::nullopt, ts, "op-1"};
}

// Wraps a real inventory and can pretend to be unreachable.
class FlakyInventory final : public InventoryPort {
 public:
  explicit FlakyInventory(const InventoryPort& inner) : inner_(inner) {}

  std::vector<std::string> products_in_zone(const std::string& zone_id) const override {
    check();
    return inner_.products_in_zone(zone_id);
  }
  ReconciliationResult reconcile(const std::string& product_id, TimestampMs now) const override {
    check();
    return inner_.reconcile(product_id, now);
  }

  std::atomic<bool> down{false};

 private:
  void check() const {
    if (down) {
      throw InventoryError(InventoryError::Code::Unavailable, "inventory down");
    }
  }
  const InventoryPort& inner_;
};

// Records what a pushed control message would do, answering like an agent.
class ScriptedLink final : public AgentControlLink {
 public:
  std::optional<ControlAck> push(const ControlMessage& message) override {
    ++pushes;
    last = message;
    if (!online) {
      return std::nullopt;
    }
    if (message.token != expected_token) {
      return ControlAck{message.camera_id, message.version, false, "bad token"};
    }
    return ControlAck{message.camera_id, message.version, true, std::nullopt};
  }

  bool online = true;
  std::string expected_token;
  int pushes = 0;
  std::optional<ControlMessage> last;
};

}  // namespace shoplift::testing
