#pragma once

#include <random>
#include <string>

#include "shoplift/pose_templates.hpp"

namespace shoplift::testing {

// Landmark frames in the simulator's style: a random pose on a ~160 px face
// at a random position, or the anomalous template.
class FrameMaker {
 public:
  explicit FrameMaker(std::uint64_t seed, std::string camera = "cam-1", std::string zone = "z1")
      : rng_(mix64(seed)), camera_(std::move(camera)), zone_(std::move(zone)) {}

  LandmarkFrame normal(TimestampMs ts) {
    std::uniform_int_distribution<std::size_t> pose(0, kPoseClassCount - 1);
    return make(templates_[kAllPoseLabels[pose(rng_)]], ts);
  }
  LandmarkFrame anomalous(TimestampMs ts) { return make(anomalous_template(), ts); }

 private:
  LandmarkFrame make(const FaceTemplate& t, TimestampMs ts) {
    std::uniform_real_distribution<double> origin(100.0, 400.0);
    std::uniform_real_distribution<double> size(152.0, 168.0);
    LandmarkFrame f;
    f.camera_id = camera_;
    f.zone_id = zone_;
    f.timestamp = ts;
    f.face_origin = {origin(rng_), origin(rng_)};
    const double s = size(rng_);
    f.face_size = {s, s};
    f.points = place_template(t, f.face_origin, f.face_size, 1.5, rng_);
    f.frame_ref = camera_ + "/" + std::to_string(ts);
    return f;
  }

  PoseTemplates templates_ = PoseTemplates::standard();
  Rng rng_;
  std::string camera_;
  std::string zone_;
};

}  // namespace shoplift::testing
