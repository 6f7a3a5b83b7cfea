#include "shoplift/cloud_http.hpp"

#include "shoplift/codec.hpp"
#include "shoplift/inventory_http.hpp"

namespace shoplift {

namespace {

std::uint64_t cursor_param(const httplib::Request& req) {
  std::string text;
  if (req.has_param("since")) {
    text = req.get_param_value("since");
  } else if (req.has_header("Last-Event-ID")) {
    text = req.get_header_value("Last-Event-ID");
  } else {
    return 0;
  }
  try {
    std::size_t used = 0;
    const auto value = std::stoull(text, &used);
    if (used != text.size()) {
      throw std::invalid_argument(text);
    }
    return value;
  } catch (const std::exception&) {
    throw DecodeError("since", "expected a non-negative integer cursor");
  }
}

std::string sse_frame(const FeedEntry& entry) {
  return "id: " + std::to_string(entry.seq) + "\nevent: alert\ndata: " + to_json(entry).dump() + "\n\n";
}

}  // namespace

std::string suspicion_topic(const std::string& camera_id) { return "suspicion/" + camera_id; }

CloudServer::CloudServer(CloudService& service, Inventory* hosted_inventory)
    : service_(service), inventory_(hosted_inventory) {
  mount();
}

CloudServer::~CloudServer() { stop(); }

void CloudServer::mount() {
  using http::guarded;
  using http::send_json;

  server_.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                               {"Access-Control-Allow-Headers", "Content-Type, X-Control-Token, X-Topic"}});
  server_.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  auto require_token = [this](const httplib::Request& req) {
    const std::string& token = service_.options().control_token;
    if (!token.empty() && req.get_header_value(std::string(kControlTokenHeader)) != token) {
      throw ServiceError(ServiceError::Code::Unauthorized, "missing or wrong control token");
    }
  };

  server_.Post("/events", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const SuspicionEvent event = decode<SuspicionEvent>(http::body_json(req));
                 const std::string topic = req.get_header_value(std::string(kTopicHeader));
                 if (topic != suspicion_topic(event.camera_id)) {
                   throw ServiceError(ServiceError::Code::Validation,
                                      "topic '" + topic + "' does not match " + suspicion_topic(event.camera_id));
                 }
                 const SuspicionResult result = service_.on_suspicion(event);
                 Json ids = Json::array();
                 for (const Alert& a : result.alerts) {
                   ids.push_back(a.alert_id);
                 }
                 send_json(res, result.outcome == EventOutcome::Parked ? 202 : 200,
                           {{"outcome", std::string(to_string(result.outcome))}, {"alert_ids", std::move(ids)}});
               }));

  server_.Post("/feedback", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, 200, to_json(service_.record_feedback(decode<StaffFeedback>(http::body_json(req)))));
               }));

  server_.Post("/control/threshold", guarded([this, require_token](const httplib::Request& req, httplib::Response& res) {
                 require_token(req);
                 const Json body = http::body_json(req);
                 FieldReader r(body);
                 send_json(res, 200, to_json(service_.set_threshold(r.non_empty_string("camera_id"), r.number("threshold"))));
               }));

  server_.Post("/control/model", guarded([this, require_token](const httplib::Request& req, httplib::Response& res) {
                 require_token(req);
                 const Json body = http::body_json(req);
                 FieldReader r(body);
                 send_json(res, 200, to_json(service_.push_model(r.non_empty_string("camera_id"), r.at("model"))));
               }));

  server_.Post("/control/ack", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 service_.acknowledge(control_ack_from_json(http::body_json(req)));
                 send_json(res, 200, {{"ok", true}});
               }));

  server_.Get(R"(/control/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                const std::string camera_id = req.matches[1];
                if (auto message = service_.pending_control(camera_id)) {
                  send_json(res, 200, to_json(*message));
                } else {
                  res.status = 204;
                }
              }));

  server_.Post("/agents/register", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const Json body = http::body_json(req);
                 FieldReader r(body);
                 service_.register_agent(r.non_empty_string("camera_id"), r.string("zone_id"),
                                         r.optional_string("control_endpoint"));
                 send_json(res, 200, {{"ok", true}});
               }));

  server_.Get("/alerts", guarded([this](const httplib::Request& req, httplib::Response& res) {
                const std::uint64_t since = cursor_param(req);
                Json alerts = Json::array();
                std::uint64_t cursor = since;
                for (const FeedEntry& e : service_.alerts_since(since)) {
                  alerts.push_back(to_json(e));
                  cursor = e.seq;
                }
                send_json(res, 200, {{"cursor", cursor}, {"alerts", std::move(alerts)}});
              }));

  server_.Get("/alerts/stream", guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto subscription = std::make_shared<CloudService::Subscription>(service_);
                res.set_header("Cache-Control", "no-cache");
                res.set_chunked_content_provider(
                    "text/event-stream",
                    [this, cursor = cursor_param(req), subscription](std::size_t, httplib::DataSink& sink) mutable {
                      const auto deadline = std::chrono::steady_clock::now() + heartbeat_;
                      std::vector<FeedEntry> entries;
                      while (entries.empty() && !stopping_ && std::chrono::steady_clock::now() < deadline) {
                        entries = service_.wait_for_alerts(cursor, std::chrono::milliseconds(100));
                      }
                      if (stopping_) {
                        sink.done();
                        return true;
                      }
                      std::string chunk = entries.empty() ? std::string(": keep-alive\n\n") : std::string();
                      for (const FeedEntry& e : entries) {
                        chunk += sse_frame(e);
                        cursor = e.seq;
                      }
                      return sink.write(chunk.data(), chunk.size());
                    });
              }));

  server_.Get(R"(/alerts/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                const std::string id = req.matches[1];
                auto alert = service_.alert(id);
                if (!alert) {
                  throw ServiceError(ServiceError::Code::UnknownAlert, "unknown alert " + id);
                }
                send_json(res, 200, to_json(*alert));
              }));

  server_.Get(R"(/zones/([^/]+)/status)", guarded([this](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, to_json(service_.zone_status(req.matches[1])));
              }));

  if (inventory_) {
    mount_inventory_routes(server_, *inventory_);
  }
}

int CloudServer::start(const std::string& host, int port) {
  if (thread_.joinable()) {
    throw Error("server already started");
  }
  if (port == 0) {
    port_ = server_.bind_to_any_port(host);
  } else {
    port_ = server_.bind_to_port(host, port) ? port : -1;
  }
  if (port_ <= 0) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  stopping_ = false;
  thread_ = std::thread([this] { server_.listen_after_bind(); });
  server_.wait_until_ready();
  return port_;
}

void CloudServer::stop() {
  stopping_ = true;
  server_.stop();
  if (thread_.joinable()) {
    thread_.join();
  }
}

HttpAgentControlLink::HttpAgentControlLink(http::Endpoint endpoint) : client_(http::make_client(endpoint)) {}

std::optional<ControlAck> HttpAgentControlLink::push(const ControlMessage& message) {
  std::lock_guard lock(mutex_);
  auto result = client_->Post("/control", to_json(message).dump(), "application/json");
  if (!result) {
    return std::nullopt;
  }
  Json body = Json::parse(result->body, nullptr, false);
  try {
    return control_ack_from_json(body);
  } catch (const DecodeError&) {
    return std::nullopt;
  }
}

}  // namespace shoplift
