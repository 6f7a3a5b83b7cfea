#pragma once

// Synthetic 68-point face templates, one per pose class, in face-box units
// ([0, 1] on both axes, y pointing down). Point order follows the common
// 68-landmark layout: jaw 0-16, brows 17-26, nose 27-35, eyes 36-47,
// mouth 48-67.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "shoplift/model.hpp"
#include "shoplift/rng.hpp"

namespace shoplift {

using FaceTemplate = LandmarkPoints;

FaceTemplate frontal_template();
FaceTemplate pose_template(PoseLabel pose);

struct PoseTemplates {
  std::array<FaceTemplate, kPoseClassCount> by_class;

  static PoseTemplates standard();
  const FaceTemplate& operator[](PoseLabel p) const { return by_class[index_of(p)]; }
};

// A deformation far from every pose: the face sheared sideways and stretched
// vertically, with the mouth pulled open.
FaceTemplate anomalous_template(double strength = 1.0);

// Places a template in an image: points = origin + template * size, then adds
// independent Gaussian noise of sigma_px pixels to every coordinate.
LandmarkPoints place_template(const FaceTemplate& t, Point2 origin, Size2 size, double sigma_px, Rng& rng);

struct PoseDatasetParams {
  PoseTemplates templates = PoseTemplates::standard();
  // Per-coordinate jitter in pixels on a 128 px face.
  double sigma_px = 0.0;
};

inline constexpr double kDatasetFaceSize = 128.0;

// Locked pose benchmark: n = 1103, 10 folds. At this jitter the classes still
// overlap enough that the two model kinds do not both score 1.0.
inline constexpr std::size_t kBenchmarkSamples = 1103;
inline constexpr double kBenchmarkSigmaPx = 3.0;
inline constexpr std::uint64_t kBenchmarkSeed = 20240501;

// Sample i has class i mod 4. Every face sits at the image origin with a
// 128 px box, so with sigma 0 each sample equals its template exactly.
std::vector<LabeledSample> generate_pose_dataset(const PoseDatasetParams& params, std::size_t n, std::uint64_t seed);

}  // namespace shoplift
