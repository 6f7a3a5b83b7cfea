#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "shoplift/errors.hpp"
#include "shoplift/model.hpp"
#include "shoplift/reference_window.hpp"

namespace shoplift {

struct LofConfig {
  std::size_t neighbor_count = 10;
  double threshold = 1.5;
  std::size_t window_capacity = 512;
  // Large enough that every normal mode holds more than neighbor_count points
  // before scoring starts; a mode with fewer would score as an outlier and,
  // being kept out of the window, never catch up.
  std::size_t warmup_min = 128;

  void validate() const {
    if (neighbor_count < 1) {
      throw ConfigError("lof.neighbor_count must be >= 1");
    }
    if (!(threshold > 0.0)) {
      throw ConfigError("lof.threshold must be > 0");
    }
    if (window_capacity < neighbor_count + 1) {
      throw ConfigError("lof.window_capacity must be >= neighbor_count + 1");
    }
    if (warmup_min < neighbor_count + 1) {
      throw ConfigError("lof.warmup_min must be >= neighbor_count + 1");
    }
    if (warmup_min > window_capacity) {
      throw ConfigError("lof.warmup_min must not exceed lof.window_capacity");
    }
  }
};

// Streaming LOF for one camera. Until the window holds warmup_min points every
// feature is absorbed. After that each feature is scored against the window;
// a score above the threshold raises a SuspicionEvent and the feature is kept
// out of the window, otherwise the feature joins the window.
class StreamingDetector {
 public:
  StreamingDetector(std::string camera_id, std::string zone_id, LofConfig config)
      : camera_id_(std::move(camera_id)),
        zone_id_(std::move(zone_id)),
        config_(config),
        window_((config.validate(), config.window_capacity)) {}

  std::optional<SuspicionEvent> observe(const FeatureVector& feature,
                                        std::optional<PoseLabel> pose = std::nullopt) {
    const std::uint64_t frame_index = frames_seen_++;
    last_score_.reset();
    if (window_.size() < config_.warmup_min) {
      window_.push(feature.values);
      return std::nullopt;
    }
    const double score = window_.score(feature.values, config_.neighbor_count);
    last_score_ = score;
    if (score > config_.threshold) {
      ++events_emitted_;
      return SuspicionEvent{camera_id_ + "#" + std::to_string(frame_index),
                            camera_id_,
                            zone_id_,
                            feature.timestamp,
                            score,
                            pose,
                            feature.source_frame};
    }
    window_.push(feature.values);
    return std::nullopt;
  }

  void set_threshold(double threshold) {
    if (!(threshold > 0.0)) {
      throw ConfigError("threshold must be > 0");
    }
    config_.threshold = threshold;
  }

  const LofConfig& config() const { return config_; }
  const ReferenceWindow<FeatureValues>& window() const { return window_; }
  std::uint64_t frames_seen() const { return frames_seen_; }
  std::uint64_t events_emitted() const { return events_emitted_; }
  // Score of the most recent observed feature; empty during warmup.
  std::optional<double> last_score() const { return last_score_; }

 private:
  std::string camera_id_;
  std::string zone_id_;
  LofConfig config_;
  ReferenceWindow<FeatureValues> window_;
  std::uint64_t frames_seen_ = 0;
  std::uint64_t events_emitted_ = 0;
  std::optional<double> last_score_;
};

}  // namespace shoplift
