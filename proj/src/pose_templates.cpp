#include "shoplift/pose_templates.hpp"

#include <cmath>
#include <numbers>

#include "shoplift/features.hpp"

namespace shoplift {

namespace {

constexpr double kPi = std::numbers::pi;

struct Range {
  std::size_t first;
  std::size_t last;  // inclusive
};

constexpr Range kJaw{0, 16};
constexpr Range kLeftEye{36, 41};
constexpr Range kRightEye{42, 47};
constexpr Range kMouth{48, 67};

bool in(std::size_t i, Range r) { return i >= r.first && i <= r.last; }

void ellipse(FaceTemplate& t, std::size_t first, std::size_t count, Point2 c, double rx, double ry) {
  for (std::size_t j = 0; j < count; ++j) {
    const double a = kPi - static_cast<double>(j) * 2.0 * kPi / static_cast<double>(count);
    t[first + j] = {c.x + rx * std::cos(a), c.y - ry * std::sin(a)};
  }
}

}  // namespace

FaceTemplate frontal_template() {
  FaceTemplate t{};
  for (std::size_t i = 0; i <= 16; ++i) {
    const double a = kPi * static_cast<double>(i) / 16.0;
    t[i] = {0.5 - 0.47 * std::cos(a), 0.30 + 0.65 * std::sin(a)};
  }
  for (std::size_t j = 0; j < 5; ++j) {
    const double arc = 0.05 * std::sin(kPi * static_cast<double>(j) / 4.0);
    t[17 + j] = {0.15 + 0.0675 * static_cast<double>(j), 0.24 - arc};
    t[22 + j] = {0.58 + 0.0675 * static_cast<double>(j), 0.24 - arc};
  }
  for (std::size_t j = 0; j < 4; ++j) {
    t[27 + j] = {0.5, 0.32 + 0.075 * static_cast<double>(j)};
  }
  for (std::size_t j = 0; j < 5; ++j) {
    t[31 + j] = {0.40 + 0.05 * static_cast<double>(j), 0.62 - 0.025 * std::sin(kPi * static_cast<double>(j) / 4.0)};
  }
  // Six points per eye starting at the outer corner, upper lid first.
  auto eye = [&](std::size_t first, Point2 c) {
    const double angles[6] = {kPi, 2 * kPi / 3, kPi / 3, 0.0, -kPi / 3, -2 * kPi / 3};
    for (std::size_t j = 0; j < 6; ++j) {
      t[first + j] = {c.x + 0.08 * std::cos(angles[j]), c.y - 0.035 * std::sin(angles[j])};
    }
  };
  eye(36, {0.31, 0.38});
  eye(42, {0.69, 0.38});
  ellipse(t, 48, 12, {0.5, 0.78}, 0.17, 0.065);
  ellipse(t, 60, 8, {0.5, 0.78}, 0.11, 0.025);
  return t;
}

FaceTemplate pose_template(PoseLabel pose) {
  FaceTemplate t = frontal_template();
  switch (pose) {
    case PoseLabel::FacingForward:
      break;
    case PoseLabel::EyesClosed:
      for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        if (in(i, kLeftEye) || in(i, kRightEye)) {
          t[i].y = 0.38 + (t[i].y - 0.38) * 0.1 + 0.01;
        } else if (i >= 17 && i <= 26) {
          t[i].y += 0.03;
        }
      }
      break;
    case PoseLabel::FacingDown:
      for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        if (in(i, kJaw)) {
          t[i].y = 0.30 + (t[i].y - 0.30) * 0.75;
        } else {
          t[i].y = 0.5 + (t[i].y - 0.5) * 0.8 + 0.10;
        }
      }
      break;
    case PoseLabel::FacingSideways:
      for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        if (in(i, kJaw)) {
          t[i].x = 0.5 + (t[i].x - 0.5) * 0.8 + 0.05;
        } else {
          t[i].x = 0.5 + (t[i].x - 0.5) * 0.65 + 0.15;
        }
      }
      break;
  }
  return t;
}

PoseTemplates PoseTemplates::standard() {
  PoseTemplates p;
  for (PoseLabel label : kAllPoseLabels) {
    p.by_class[index_of(label)] = pose_template(label);
  }
  return p;
}

FaceTemplate anomalous_template(double strength) {
  FaceTemplate t = frontal_template();
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    if (in(i, kMouth)) {
      t[i].y = 0.78 + (t[i].y - 0.78) * (1.0 + 2.0 * strength);
    }
    const double y = t[i].y;
    t[i].x += 0.5 * strength * (y - 0.5);
    t[i].y = 0.5 + (y - 0.5) * (1.0 + 0.4 * strength);
  }
  return t;
}

LandmarkPoints place_template(const FaceTemplate& t, Point2 origin, Size2 size, double sigma_px, Rng& rng) {
  LandmarkPoints points{};
  std::normal_distribution<double> noise(0.0, sigma_px > 0.0 ? sigma_px : 1.0);
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    points[i] = {origin.x + t[i].x * size.width, origin.y + t[i].y * size.height};
    if (sigma_px > 0.0) {
      points[i].x += noise(rng);
      points[i].y += noise(rng);
    }
  }
  return points;
}

std::vector<LabeledSample> generate_pose_dataset(const PoseDatasetParams& params, std::size_t n, std::uint64_t seed) {
  Rng rng(mix64(seed));
  std::vector<LabeledSample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PoseLabel label = kAllPoseLabels[i % kPoseClassCount];
    LandmarkFrame frame;
    frame.camera_id = "dataset";
    frame.timestamp = static_cast<TimestampMs>(i);
    frame.face_origin = {0.0, 0.0};
    frame.face_size = {kDatasetFaceSize, kDatasetFaceSize};
    frame.points = place_template(params.templates[label], frame.face_origin, frame.face_size, params.sigma_px, rng);
    frame.frame_ref = "pose-" + std::to_string(i);
    samples.push_back({normalize(frame), label});
  }
  return samples;
}

}  // namespace shoplift
