#pragma once

// HTTP front end of the decision service.
//
//   POST /events                 SuspicionEvent, header X-Topic: suspicion/<camera_id>
//   POST /feedback               StaffFeedback -> Alert
//   POST /control/threshold      {"camera_id", "threshold"}, header X-Control-Token
//   POST /control/model          {"camera_id", "model"}, header X-Control-Token
//   GET  /control/<camera_id>    pending ControlMessage, or 204
//   POST /control/ack            ControlAck
//   POST /agents/register        {"camera_id", "zone_id", "control_endpoint"?}
//   GET  /alerts?since=N         {"cursor": M, "alerts": [{"seq", "alert"}, ...]}
//   GET  /alerts/stream?since=N  server-sent events, one {"seq", "alert"} per event
//   GET  /alerts/<id>            Alert
//   GET  /zones/<id>/status      ZoneStatus
//
// The inventory routes are mounted too when an Inventory is hosted in-process.

#include <atomic>
#include <chrono>
#include <memory>
#include <string>
#include <thread>

#include "shoplift/cloud_service.hpp"
#include "shoplift/http_util.hpp"

namespace shoplift {

inline constexpr std::string_view kTopicHeader = "X-Topic";
inline constexpr std::string_view kControlTokenHeader = "X-Control-Token";

std::string suspicion_topic(const std::string& camera_id);

class CloudServer {
 public:
  CloudServer(CloudService& service, Inventory* hosted_inventory = nullptr);
  ~CloudServer();

  CloudServer(const CloudServer&) = delete;
  CloudServer& operator=(const CloudServer&) = delete;

  // Binds (port 0 picks a free port), starts serving on a background thread
  // and returns the bound port.
  int start(const std::string& host, int port);
  void stop();
  int port() const { return port_; }

  // Interval at which idle alert streams send a keep-alive comment.
  void set_heartbeat(std::chrono::milliseconds interval) { heartbeat_ = interval; }

 private:
  void mount();

  CloudService& service_;
  Inventory* inventory_;
  httplib::Server server_;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
  std::chrono::milliseconds heartbeat_{std::chrono::seconds(5)};
  int port_ = 0;
};

// Pushes control messages to an agent's local control port (POST /control).
class HttpAgentControlLink final : public AgentControlLink {
 public:
  explicit HttpAgentControlLink(http::Endpoint endpoint);
  std::optional<ControlAck> push(const ControlMessage& message) override;

 private:
  std::mutex mutex_;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace shoplift
