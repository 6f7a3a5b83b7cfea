#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "shoplift/model.hpp"

namespace shoplift::testing {

inline LandmarkFrame random_frame(std::mt19937_64& rng, std::string camera = "cam-1", TimestampMs ts = 0) {
  std::uniform_real_distribution<double> coord(-500.0, 1500.0);
  std::uniform_real_distribution<double> extent(5.0, 600.0);
  LandmarkFrame f;
  f.camera_id = std::move(camera);
  f.zone_id = "zone-a";
  f.timestamp = ts;
  for (auto& p : f.points) {
    p = {coord(rng), coord(rng)};
  }
  f.face_origin = {coord(rng), coord(rng)};
  f.face_size = {extent(rng), extent(rng)};
  f.frame_ref = "frame-" + std::to_string(ts);
  return f;
}

inline LandmarkFrame translate(LandmarkFrame f, double dx, double dy) {
  for (auto& p : f.points) {
    p.x += dx;
    p.y += dy;
  }
  f.face_origin.x += dx;
  f.face_origin.y += dy;
  return f;
}

inline LandmarkFrame scale(LandmarkFrame f, double s) {
  for (auto& p : f.points) {
    p.x *= s;
    p.y *= s;
  }
  f.face_origin = {f.face_origin.x * s, f.face_origin.y * s};
  f.face_size = {f.face_size.width * s, f.face_size.height * s};
  return f;
}

inline std::vector<std::vector<double>> random_points(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& p : pts) {
    for (auto& v : p) {
      v = g(rng);
    }
  }
  return pts;
}

// Vertices of a regular polygon in the first two coordinates of a dim-space.
inline std::vector<std::vector<double>> regular_polygon(std::size_t sides, std::size_t dim, double radius = 1.0) {
  std::vector<std::vector<double>> pts(sides, std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < sides; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(sides);
    pts[i][0] = radius * std::cos(a);
    pts[i][1] = radius * std::sin(a);
  }
  return pts;
}

// Vertices of the unit hypercube {0,1}^cube_dim, zero-padded to dim.
inline std::vector<std::vector<double>> hypercube(std::size_t cube_dim, std::size_t dim) {
  std::vector<std::vector<double>> pts;
  for (std::size_t mask = 0; mask < (std::size_t{1} << cube_dim); ++mask) {
    std::vector<double> p(dim, 0.0);
    for (std::size_t b = 0; b < cube_dim; ++b) {
      p[b] = (mask >> b) & 1U ? 1.0 : 0.0;
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

inline FeatureVector feature_from(const std::vector<double>& head, TimestampMs ts = 0) {
  FeatureVector fv;
  for (std::size_t i = 0; i < head.size() && i < kFeatureDim; ++i) {
    fv.values[i] = head[i];
  }
  fv.timestamp = ts;
  fv.source_frame = "f" + std::to_string(ts);
  return fv;
}

}  // namespace shoplift::testing
