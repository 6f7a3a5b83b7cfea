#pragma once

#include <atomic>
#include <condition_variable>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "shoplift/anomaly.hpp"
#include "shoplift/classifier.hpp"
#include "shoplift/control.hpp"
#include "shoplift/delivery_queue.hpp"
#include "shoplift/model.hpp"

namespace shoplift {

struct BackoffPolicy {
  std::chrono::milliseconds initial{100};
  std::chrono::milliseconds max{5000};
  double multiplier = 2.0;

  std::chrono::milliseconds next(std::chrono::milliseconds current) const;
};

struct AgentConfig {
  std::string camera_id;
  // Every event from this camera is attributed to this zone.
  std::string zone_id;
  std::string cloud_endpoint;
  LofConfig lof;
  std::optional<std::filesystem::path> model_path;
  // 0 replays a file as fast as possible; 1 honours frame timestamps.
  double replay_speed = 0.0;
  std::optional<std::filesystem::path> queue_path;
  std::size_t queue_capacity = 1024;
  std::string control_token;
  std::chrono::milliseconds poll_interval{1000};
  // Local port accepting pushed control messages; 0 disables it.
  int control_port = 0;
  BackoffPolicy backoff;

  // Throws ConfigError.
  void validate() const;
};

AgentConfig agent_config_from_json(const Json& j);
Json to_json(const AgentConfig& config);
AgentConfig load_agent_config(const std::filesystem::path& path);

enum class PublishStatus : std::uint8_t { Delivered, Retry, Rejected };

class EventPublisher {
 public:
  virtual ~EventPublisher() = default;
  // Delivered and Rejected remove the event from the queue; Retry keeps it at
  // the head and backs off.
  virtual PublishStatus publish(const SuspicionEvent& event) = 0;
};

struct AgentCounters {
  std::uint64_t frames = 0;
  std::uint64_t events = 0;
  std::uint64_t delivered = 0;
  std::uint64_t rejected = 0;
  std::uint64_t retries = 0;
  std::uint64_t dropped = 0;
};

// One camera's ingestion loop plus its delivery flow. process_frame is the
// single writer of the LOF window; control messages are applied under the
// same lock, so they take effect between frames.
class EdgeAgent {
 public:
  EdgeAgent(AgentConfig config, std::shared_ptr<EventPublisher> publisher,
            std::optional<TrainedModel> model = std::nullopt);
  ~EdgeAgent();

  EdgeAgent(const EdgeAgent&) = delete;
  EdgeAgent& operator=(const EdgeAgent&) = delete;

  // Normalizes, annotates the pose when a model is loaded, scores, and queues
  // any resulting event. Throws NormalizationError for a bad frame.
  std::optional<SuspicionEvent> process_frame(const LandmarkFrame& frame);

  ControlAck handle_control(const ControlMessage& message);

  // Background delivery with exponential backoff.
  void start_publisher();
  // Stops the background flow after waiting up to drain_timeout for the queue
  // to empty. Undelivered events stay in the queue file when one is set.
  void stop_publisher(std::chrono::milliseconds drain_timeout = std::chrono::milliseconds(0));
  // Delivers from the calling thread until the queue is empty or the
  // publisher asks to retry. Returns the number of events removed.
  std::size_t deliver_now();
  bool wait_drained(std::chrono::milliseconds timeout);

  const AgentConfig& config() const { return config_; }
  std::uint64_t config_version() const;
  double threshold() const;
  bool has_model() const;
  std::optional<PoseLabel> classify(const FeatureVector& features) const;
  AgentCounters counters() const;
  std::size_t queued() const { return queue_.size(); }

 private:
  void publisher_loop();
  PublishStatus publish_one(const SuspicionEvent& event);

  AgentConfig config_;
  std::shared_ptr<EventPublisher> publisher_;
  DeliveryQueue queue_;

  mutable std::mutex frame_mutex_;
  StreamingDetector detector_;
  std::optional<TrainedModel> model_;
  std::uint64_t version_ = 0;

  mutable std::mutex counters_mutex_;
  AgentCounters counters_;

  std::mutex publish_mutex_;
  std::atomic<bool> publishing_{false};
  std::mutex wake_mutex_;
  std::condition_variable wake_;
  std::thread publisher_thread_;
};

// Reads landmark frames from the stream until it ends or stop becomes true,
// pacing by replay_speed. Returns the number of frames processed. Frames that
// cannot be normalized are logged and skipped; stream errors propagate.
std::size_t run_frames(EdgeAgent& agent, std::istream& source, const std::atomic<bool>* stop = nullptr);

// Control link that hands messages straight to an in-process agent.
class LocalControlLink final : public AgentControlLink {
 public:
  explicit LocalControlLink(EdgeAgent& agent) : agent_(agent) {}
  std::optional<ControlAck> push(const ControlMessage& message) override { return agent_.handle_control(message); }

 private:
  EdgeAgent& agent_;
};

}  // namespace shoplift
