#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "shoplift/model.hpp"

namespace shoplift {

// Maps each landmark into face-box relative coordinates:
//   x' = (x - face_origin.x) / face_size.width
//   y' = (y - face_origin.y) / face_size.height
// Throws NormalizationError on a non-positive face size or non-finite output.
FeatureVector normalize(const LandmarkFrame& frame);

// Reads newline-delimited LandmarkFrame JSON, one frame per line. Blank lines
// are skipped. Timestamps must be non-decreasing per camera_id.
class LandmarkStreamReader {
 public:
  explicit LandmarkStreamReader(std::istream& in) : in_(in) {}

  // Next frame, or nullopt at end of input. Throws StreamError naming the line.
  std::optional<LandmarkFrame> next();

  std::size_t line_number() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::unordered_map<std::string, TimestampMs> last_timestamp_;
};

std::vector<LandmarkFrame> read_landmark_stream(std::istream& in);

void write_landmark_stream(std::ostream& out, std::span<const LandmarkFrame> frames);

}  // namespace shoplift
