#pragma once

// Domain values shared by the edge agent, the cloud service and the simulator.
// Every type here is a plain immutable-by-convention value.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace shoplift {

using TimestampMs = std::int64_t;

inline constexpr std::size_t kLandmarkCount = 68;
inline constexpr std::size_t kFeatureDim = 2 * kLandmarkCount;
inline constexpr std::size_t kPoseClassCount = 4;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Size2 {
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const Size2&, const Size2&) = default;
};

using LandmarkPoints = std::array<Point2, kLandmarkCount>;

// One camera frame reduced to 68 face landmarks plus the face box.
struct LandmarkFrame {
  std::string camera_id;
  std::string zone_id;
  TimestampMs timestamp = 0;
  LandmarkPoints points{};
  Point2 face_origin;
  Size2 face_size;
  std::string frame_ref;

  friend bool operator==(const LandmarkFrame&, const LandmarkFrame&) = default;
};

// Layout: x of landmark 0..67, then y of landmark 0..67.
using FeatureValues = std::array<double, kFeatureDim>;

struct FeatureVector {
  FeatureValues values{};
  std::string source_frame;
  TimestampMs timestamp = 0;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

enum class PoseLabel : std::uint8_t { FacingForward = 0, EyesClosed = 1, FacingDown = 2, FacingSideways = 3 };

inline constexpr std::array<PoseLabel, kPoseClassCount> kAllPoseLabels{
    PoseLabel::FacingForward, PoseLabel::EyesClosed, PoseLabel::FacingDown, PoseLabel::FacingSideways};

constexpr std::size_t index_of(PoseLabel label) { return static_cast<std::size_t>(label); }

std::string_view to_string(PoseLabel label);
std::optional<PoseLabel> parse_pose_label(std::string_view text);

struct SuspicionEvent {
  std::string event_id;
  std::string camera_id;
  std::string zone_id;
  TimestampMs timestamp = 0;
  double anomaly_score = 0.0;
  std::optional<PoseLabel> pose_label;
  std::string frame_ref;

  friend bool operator==(const SuspicionEvent&, const SuspicionEvent&) = default;
};

enum class AlertStatus : std::uint8_t { Open, Confirmed, Dismissed };

std::string_view to_string(AlertStatus status);
std::optional<AlertStatus> parse_alert_status(std::string_view text);

struct Alert {
  std::string alert_id;
  SuspicionEvent event;
  std::string product_id;
  std::int64_t expected_count = 0;
  std::int64_t observed_count = 0;
  std::int64_t deficit = 0;
  TimestampMs created_at = 0;
  AlertStatus status = AlertStatus::Open;

  friend bool operator==(const Alert&, const Alert&) = default;
};

enum class Verdict : std::uint8_t { Confirmed, Dismissed };

std::string_view to_string(Verdict verdict);
std::optional<Verdict> parse_verdict(std::string_view text);

struct StaffFeedback {
  std::string alert_id;
  Verdict verdict = Verdict::Confirmed;
  std::optional<std::string> note;
  TimestampMs timestamp = 0;
  std::string operator_id;

  friend bool operator==(const StaffFeedback&, const StaffFeedback&) = default;
};

struct ProductRecord {
  std::string product_id;
  std::string zone_id;
  std::string display_name;
  std::int64_t expected_count = 0;

  friend bool operator==(const ProductRecord&, const ProductRecord&) = default;
};

struct SaleTransaction {
  std::string tx_id;
  std::string product_id;
  std::int64_t quantity = 1;
  TimestampMs timestamp = 0;

  friend bool operator==(const SaleTransaction&, const SaleTransaction&) = default;
};

struct ShelfObservation {
  std::string zone_id;
  std::string product_id;
  std::int64_t observed_count = 0;
  TimestampMs timestamp = 0;

  friend bool operator==(const ShelfObservation&, const ShelfObservation&) = default;
};

struct ReconciliationResult {
  std::string product_id;
  std::int64_t expected_count = 0;
  std::int64_t observed_count = 0;
  bool mismatch = false;
  std::int64_t deficit = 0;

  friend bool operator==(const ReconciliationResult&, const ReconciliationResult&) = default;
};

// Builds a result that satisfies the mismatch/deficit invariants by construction.
ReconciliationResult make_reconciliation(std::string product_id, std::int64_t expected, std::int64_t observed);

struct LabeledSample {
  FeatureVector features;
  PoseLabel label = PoseLabel::FacingForward;

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

}  // namespace shoplift
