#include "shoplift/edge_agent.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "shoplift/codec.hpp"
#include "shoplift/features.hpp"

namespace shoplift {

std::chrono::milliseconds BackoffPolicy::next(std::chrono::milliseconds current) const {
  const auto grown = std::chrono::milliseconds(static_cast<std::int64_t>(std::ceil(current.count() * multiplier)));
  return std::min(std::max(grown, initial), max);
}

void AgentConfig::validate() const {
  if (camera_id.empty()) {
    throw ConfigError("camera_id must not be empty");
  }
  if (cloud_endpoint.empty()) {
    throw ConfigError("cloud_endpoint must not be empty");
  }
  if (!std::isfinite(replay_speed) || replay_speed < 0.0) {
    throw ConfigError("replay_speed must be >= 0");
  }
  if (queue_capacity == 0) {
    throw ConfigError("queue_capacity must be >= 1");
  }
  if (poll_interval.count() <= 0) {
    throw ConfigError("poll_interval_ms must be > 0");
  }
  if (control_port < 0 || control_port > 65535) {
    throw ConfigError("control_port must be in [0, 65535]");
  }
  if (backoff.initial.count() <= 0 || backoff.max < backoff.initial || !(backoff.multiplier >= 1.0)) {
    throw ConfigError("backoff needs initial_ms > 0, max_ms >= initial_ms and multiplier >= 1");
  }
  lof.validate();
}

AgentConfig agent_config_from_json(const Json& j) {
  AgentConfig c;
  try {
    FieldReader r(j);
    c.camera_id = r.non_empty_string("camera_id");
    c.zone_id = r.string("zone_id");
    c.cloud_endpoint = r.non_empty_string("cloud_endpoint");
    if (r.has("lof")) {
      FieldReader l = r.object("lof");
      if (l.has("neighbor_count")) c.lof.neighbor_count = l.unsigned_integer("neighbor_count");
      if (l.has("threshold")) c.lof.threshold = l.number("threshold");
      if (l.has("window_capacity")) c.lof.window_capacity = l.unsigned_integer("window_capacity");
      if (l.has("warmup_min")) c.lof.warmup_min = l.unsigned_integer("warmup_min");
    }
    if (r.has("model_path")) c.model_path = r.string("model_path");
    if (r.has("replay_speed")) c.replay_speed = r.number("replay_speed");
    if (r.has("queue_path")) c.queue_path = r.string("queue_path");
    if (r.has("queue_capacity")) c.queue_capacity = r.unsigned_integer("queue_capacity");
    if (r.has("control_token")) c.control_token = r.string("control_token");
    if (r.has("poll_interval_ms")) c.poll_interval = std::chrono::milliseconds(r.integer("poll_interval_ms"));
    if (r.has("control_port")) c.control_port = static_cast<int>(r.integer("control_port"));
    if (r.has("backoff")) {
      FieldReader b = r.object("backoff");
      if (b.has("initial_ms")) c.backoff.initial = std::chrono::milliseconds(b.integer("initial_ms"));
      if (b.has("max_ms")) c.backoff.max = std::chrono::milliseconds(b.integer("max_ms"));
      if (b.has("multiplier")) c.backoff.multiplier = b.number("multiplier");
    }
  } catch (const DecodeError& e) {
    throw ConfigError(std::string("agent config: ") + e.what());
  }
  c.validate();
  return c;
}

Json to_json(const AgentConfig& c) {
  Json j = {{"camera_id", c.camera_id},
            {"zone_id", c.zone_id},
            {"cloud_endpoint", c.cloud_endpoint},
            {"lof",
             {{"neighbor_count", c.lof.neighbor_count},
              {"threshold", c.lof.threshold},
              {"window_capacity", c.lof.window_capacity},
              {"warmup_min", c.lof.warmup_min}}},
            {"replay_speed", c.replay_speed},
            {"queue_capacity", c.queue_capacity},
            {"control_token", c.control_token},
            {"poll_interval_ms", c.poll_interval.count()},
            {"control_port", c.control_port},
            {"backoff",
             {{"initial_ms", c.backoff.initial.count()},
              {"max_ms", c.backoff.max.count()},
              {"multiplier", c.backoff.multiplier}}}};
  j["model_path"] = c.model_path ? Json(c.model_path->string()) : Json(nullptr);
  j["queue_path"] = c.queue_path ? Json(c.queue_path->string()) : Json(nullptr);
  return j;
}

AgentConfig load_agent_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read agent config " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return agent_config_from_json(parse_json(buffer.str()));
  } catch (const DecodeError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

EdgeAgent::EdgeAgent(AgentConfig config, std::shared_ptr<EventPublisher> publisher, std::optional<TrainedModel> model)
    : config_((config.validate(), std::move(config))),
      publisher_(std::move(publisher)),
      queue_(config_.queue_capacity, config_.queue_path),
      detector_(config_.camera_id, config_.zone_id, config_.lof),
      model_(std::move(model)) {
  if (!publisher_) {
    throw ConfigError("agent needs a publisher");
  }
  if (model_) {
    validate(*model_);
  }
}

EdgeAgent::~EdgeAgent() { stop_publisher(); }

std::optional<SuspicionEvent> EdgeAgent::process_frame(const LandmarkFrame& frame) {
  const FeatureVector features = normalize(frame);
  std::optional<SuspicionEvent> event;
  {
    std::lock_guard lock(frame_mutex_);
    std::optional<PoseLabel> pose;
    if (model_) {
      pose = predict(*model_, features.values);
    }
    event = detector_.observe(features, pose);
  }
  {
    std::lock_guard lock(counters_mutex_);
    ++counters_.frames;
    counters_.events += event.has_value();
  }
  if (event) {
    queue_.push(*event);
    wake_.notify_all();
  }
  return event;
}

ControlAck EdgeAgent::handle_control(const ControlMessage& message) {
  ControlAck ack{config_.camera_id, message.version, false, std::nullopt};
  if (message.token != config_.control_token) {
    ack.reason = "bad token";
    return ack;
  }
  if (message.camera_id != config_.camera_id) {
    ack.reason = "message addressed to camera " + message.camera_id;
    return ack;
  }
  std::optional<TrainedModel> model;
  if (message.model) {
    try {
      model = model_from_json(*message.model);
    } catch (const Error& e) {
      ack.reason = std::string("malformed model: ") + e.what();
      return ack;
    }
  }
  if (message.threshold && (!std::isfinite(*message.threshold) || !(*message.threshold > 0.0))) {
    ack.reason = "threshold must be > 0";
    return ack;
  }
  std::lock_guard lock(frame_mutex_);
  if (message.version <= version_) {
    ack.version = version_;
    ack.accepted = true;
    return ack;
  }
  if (message.threshold) {
    detector_.set_threshold(*message.threshold);
  }
  if (model) {
    model_ = std::move(model);
  }
  version_ = message.version;
  ack.accepted = true;
  spdlog::info("camera {}: applied control version {}", config_.camera_id, version_);
  return ack;
}

PublishStatus EdgeAgent::publish_one(const SuspicionEvent& event) {
  std::lock_guard lock(publish_mutex_);
  PublishStatus status = PublishStatus::Retry;
  try {
    status = publisher_->publish(event);
  } catch (const std::exception& e) {
    spdlog::warn("publishing {} failed: {}", event.event_id, e.what());
  }
  std::lock_guard counters(counters_mutex_);
  switch (status) {
    case PublishStatus::Delivered:
      ++counters_.delivered;
      queue_.pop(event.event_id);
      break;
    case PublishStatus::Rejected:
      ++counters_.rejected;
      spdlog::error("cloud rejected event {}; dropping it", event.event_id);
      queue_.pop(event.event_id);
      break;
    case PublishStatus::Retry:
      ++counters_.retries;
      break;
  }
  return status;
}

std::size_t EdgeAgent::deliver_now() {
  std::size_t removed = 0;
  while (auto event = queue_.front()) {
    if (publish_one(*event) == PublishStatus::Retry) {
      break;
    }
    ++removed;
  }
  return removed;
}

void EdgeAgent::start_publisher() {
  if (publisher_thread_.joinable()) {
    return;
  }
  publishing_ = true;
  publisher_thread_ = std::thread([this] { publisher_loop(); });
}

void EdgeAgent::publisher_loop() {
  std::chrono::milliseconds delay = config_.backoff.initial;
  while (publishing_) {
    auto event = queue_.wait_front(std::chrono::milliseconds(100));
    if (!event) {
      continue;
    }
    if (publish_one(*event) != PublishStatus::Retry) {
      delay = config_.backoff.initial;
      continue;
    }
    std::unique_lock lock(wake_mutex_);
    wake_.wait_for(lock, delay, [&] { return !publishing_; });
    delay = config_.backoff.next(delay);
  }
}

void EdgeAgent::stop_publisher(std::chrono::milliseconds drain_timeout) {
  if (!publisher_thread_.joinable()) {
    return;
  }
  if (drain_timeout.count() > 0) {
    queue_.wait_empty(drain_timeout);
  }
  {
    std::lock_guard lock(wake_mutex_);
    publishing_ = false;
  }
  wake_.notify_all();
  publisher_thread_.join();
}

bool EdgeAgent::wait_drained(std::chrono::milliseconds timeout) { return queue_.wait_empty(timeout); }

std::uint64_t EdgeAgent::config_version() const {
  std::lock_guard lock(frame_mutex_);
  return version_;
}

double EdgeAgent::threshold() const {
  std::lock_guard lock(frame_mutex_);
  return detector_.config().threshold;
}

bool EdgeAgent::has_model() const {
  std::lock_guard lock(frame_mutex_);
  return model_.has_value();
}

std::optional<PoseLabel> EdgeAgent::classify(const FeatureVector& features) const {
  std::lock_guard lock(frame_mutex_);
  if (!model_) {
    return std::nullopt;
  }
  return predict(*model_, features.values);
}

AgentCounters EdgeAgent::counters() const {
  std::lock_guard lock(counters_mutex_);
  AgentCounters c = counters_;
  c.dropped = queue_.dropped();
  return c;
}

std::size_t run_frames(EdgeAgent& agent, std::istream& source, const std::atomic<bool>* stop) {
  LandmarkStreamReader reader(source);
  std::size_t count = 0;
  std::optional<TimestampMs> previous;
  const double speed = agent.config().replay_speed;
  while (!(stop && *stop)) {
    auto frame = reader.next();
    if (!frame) {
      break;
    }
    if (speed > 0.0 && previous && frame->timestamp > *previous) {
      const auto gap = static_cast<double>(frame->timestamp - *previous) / speed;
      std::this_thread::sleep_for(std::chrono::microseconds(static_cast<std::int64_t>(gap * 1000.0)));
    }
    previous = frame->timestamp;
    try {
      agent.process_frame(*frame);
    } catch (const NormalizationError& e) {
      // One degenerate face must not stop the camera.
      spdlog::warn("{}: skipping frame {}: {}", agent.config().camera_id, frame->frame_ref, e.what());
      continue;
    }
    ++count;
  }
  return count;
}

}  // namespace shoplift
