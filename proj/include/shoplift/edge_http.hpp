#pragma once

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <thread>

#include "shoplift/edge_agent.hpp"
#include "shoplift/http_util.hpp"

namespace shoplift {

// POST /events with the camera's topic header. Connection failures and 5xx
// answers are retried; other 4xx answers reject the event.
class HttpEventPublisher final : public EventPublisher {
 public:
  explicit HttpEventPublisher(http::Endpoint cloud);
  PublishStatus publish(const SuspicionEvent& event) override;

 private:
  std::mutex mutex_;
  std::unique_ptr<httplib::Client> client_;
};

// The agent's side of the control channel: registers with the cloud, polls
// GET /control/<camera_id> and acknowledges, and optionally serves
// POST /control on a local port for pushed messages.
class AgentControlChannel {
 public:
  AgentControlChannel(EdgeAgent& agent, http::Endpoint cloud);
  ~AgentControlChannel();

  AgentControlChannel(const AgentControlChannel&) = delete;
  AgentControlChannel& operator=(const AgentControlChannel&) = delete;

  void start();
  void stop();
  // Bound local control port, 0 when no push port is served.
  int control_port() const { return control_port_; }
  bool registered() const { return registered_; }
  // One poll cycle; returns true when a message was applied or acknowledged.
  bool poll_once();

 private:
  bool try_register();
  void loop();

  EdgeAgent& agent_;
  http::Endpoint cloud_;
  std::unique_ptr<httplib::Client> client_;
  httplib::Server control_server_;
  std::thread server_thread_;
  std::thread poll_thread_;
  std::atomic<bool> running_{false};
  std::atomic<bool> registered_{false};
  std::mutex wake_mutex_;
  std::condition_variable wake_;
  int control_port_ = 0;
};

}  // namespace shoplift
