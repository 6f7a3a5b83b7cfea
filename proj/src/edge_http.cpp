#include "shoplift/edge_http.hpp"

#include <spdlog/spdlog.h>

#include "shoplift/cloud_http.hpp"
#include "shoplift/codec.hpp"

namespace shoplift {

HttpEventPublisher::HttpEventPublisher(http::Endpoint cloud) : client_(http::make_client(cloud)) {}

PublishStatus HttpEventPublisher::publish(const SuspicionEvent& event) {
  std::lock_guard lock(mutex_);
  httplib::Headers headers{{std::string(kTopicHeader), suspicion_topic(event.camera_id)}};
  auto result = client_->Post("/events", headers, serialize(event), "application/json");
  if (!result) {
    return PublishStatus::Retry;
  }
  if (result->status >= 200 && result->status < 300) {
    return PublishStatus::Delivered;
  }
  if (result->status >= 400 && result->status < 500 && result->status != 408 && result->status != 429) {
    spdlog::error("event {} refused with HTTP {}: {}", event.event_id, result->status, result->body);
    return PublishStatus::Rejected;
  }
  return PublishStatus::Retry;
}

AgentControlChannel::AgentControlChannel(EdgeAgent& agent, http::Endpoint cloud)
    : agent_(agent), cloud_(std::move(cloud)), client_(http::make_client(cloud_)) {
  control_server_.Post("/control", [this](const httplib::Request& req, httplib::Response& res) {
    ControlMessage message;
    try {
      message = control_message_from_json(parse_json(req.body));
    } catch (const DecodeError& e) {
      http::send_error(res, 400, "invalid", e.what());
      return;
    }
    const ControlAck ack = agent_.handle_control(message);
    http::send_json(res, ack.accepted ? 200 : (ack.reason == "bad token" ? 403 : 422), to_json(ack));
  });
}

AgentControlChannel::~AgentControlChannel() { stop(); }

void AgentControlChannel::start() {
  if (running_) {
    return;
  }
  running_ = true;
  if (agent_.config().control_port > 0) {
    if (!control_server_.bind_to_port("127.0.0.1", agent_.config().control_port)) {
      throw Error("cannot bind control port " + std::to_string(agent_.config().control_port));
    }
    control_port_ = agent_.config().control_port;
    server_thread_ = std::thread([this] { control_server_.listen_after_bind(); });
    control_server_.wait_until_ready();
  }
  poll_thread_ = std::thread([this] { loop(); });
}

void AgentControlChannel::stop() {
  {
    std::lock_guard lock(wake_mutex_);
    running_ = false;
  }
  wake_.notify_all();
  if (poll_thread_.joinable()) {
    poll_thread_.join();
  }
  control_server_.stop();
  if (server_thread_.joinable()) {
    server_thread_.join();
  }
}

bool AgentControlChannel::try_register() {
  Json body = {{"camera_id", agent_.config().camera_id}, {"zone_id", agent_.config().zone_id}};
  body["control_endpoint"] = control_port_ > 0 ? Json("127.0.0.1:" + std::to_string(control_port_)) : Json(nullptr);
  auto result = client_->Post("/agents/register", body.dump(), "application/json");
  registered_ = result && result->status == 200;
  return registered_;
}

bool AgentControlChannel::poll_once() {
  if (!registered_ && !try_register()) {
    return false;
  }
  auto result = client_->Get("/control/" + agent_.config().camera_id);
  if (!result || result->status != 200) {
    return false;
  }
  ControlMessage message;
  try {
    message = control_message_from_json(parse_json(result->body));
  } catch (const DecodeError& e) {
    spdlog::warn("ignoring malformed control message: {}", e.what());
    return false;
  }
  const ControlAck ack = agent_.handle_control(message);
  auto posted = client_->Post("/control/ack", to_json(ack).dump(), "application/json");
  return posted && posted->status == 200;
}

void AgentControlChannel::loop() {
  while (running_) {
    poll_once();
    std::unique_lock lock(wake_mutex_);
    wake_.wait_for(lock, agent_.config().poll_interval, [&] { return !running_; });
  }
}

}  // namespace shoplift
