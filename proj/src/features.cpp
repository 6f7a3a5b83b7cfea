#include "shoplift/features.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "shoplift/codec.hpp"
#include "shoplift/errors.hpp"

namespace shoplift {

FeatureVector normalize(const LandmarkFrame& frame) {
  const auto [width, height] = frame.face_size;
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height)) {
    throw NormalizationError("face_size must be positive and finite");
  }

  FeatureVector out;
  out.source_frame = frame.frame_ref;
  out.timestamp = frame.timestamp;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    const Point2& p = frame.points[i];
    const double x = (p.x - frame.face_origin.x) / width;
    const double y = (p.y - frame.face_origin.y) / height;
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw NormalizationError("landmark " + std::to_string(i) + " normalizes to a non-finite value");
    }
    out.values[i] = x;
    out.values[kLandmarkCount + i] = y;
  }
  return out;
}

std::optional<LandmarkFrame> LandmarkStreamReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    LandmarkFrame frame;
    try {
      frame = deserialize<LandmarkFrame>(line);
    } catch (const DecodeError& e) {
      throw StreamError(StreamError::Kind::Malformed, line_, e.what());
    }
    auto [it, inserted] = last_timestamp_.try_emplace(frame.camera_id, frame.timestamp);
    if (!inserted) {
      if (frame.timestamp < it->second) {
        throw StreamError(StreamError::Kind::OutOfOrder, line_,
                          "timestamp " + std::to_string(frame.timestamp) + " precedes " +
                              std::to_string(it->second) + " for camera " + frame.camera_id);
      }
      it->second = frame.timestamp;
    }
    return frame;
  }
  return std::nullopt;
}

std::vector<LandmarkFrame> read_landmark_stream(std::istream& in) {
  LandmarkStreamReader reader(in);
  std::vector<LandmarkFrame> frames;
  while (auto frame = reader.next()) {
    frames.push_back(std::move(*frame));
  }
  return frames;
}

void write_landmark_stream(std::ostream& out, std::span<const LandmarkFrame> frames) {
  for (const auto& frame : frames) {
    out << serialize(frame) << '\n';
  }
}

}  // namespace shoplift
