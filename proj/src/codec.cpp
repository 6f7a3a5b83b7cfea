#include "shoplift/codec.hpp"

#include <cmath>

namespace shoplift {

namespace {

Json point_json(const Point2& p) { return Json::array({p.x, p.y}); }

Point2 point_from(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) {
    throw DecodeError(where, "expected [x, y]");
  }
  return {FieldReader::number_value(j[0], where + "[0]"), FieldReader::number_value(j[1], where + "[1]")};
}

std::string join(const std::string& prefix, const char* key) {
  return prefix.empty() ? std::string(key) : prefix + "." + key;
}

}  // namespace

std::string_view to_string(PoseLabel label) {
  switch (label) {
    case PoseLabel::FacingForward:
      return "FacingForward";
    case PoseLabel::EyesClosed:
      return "EyesClosed";
    case PoseLabel::FacingDown:
      return "FacingDown";
    case PoseLabel::FacingSideways:
      return "FacingSideways";
  }
  return "?";
}

std::optional<PoseLabel> parse_pose_label(std::string_view text) {
  for (PoseLabel label : kAllPoseLabels) {
    if (to_string(label) == text) {
      return label;
    }
  }
  return std::nullopt;
}

std::string_view to_string(AlertStatus status) {
  switch (status) {
    case AlertStatus::Open:
      return "Open";
    case AlertStatus::Confirmed:
      return "Confirmed";
    case AlertStatus::Dismissed:
      return "Dismissed";
  }
  return "?";
}

std::optional<AlertStatus> parse_alert_status(std::string_view text) {
  for (AlertStatus s : {AlertStatus::Open, AlertStatus::Confirmed, AlertStatus::Dismissed}) {
    if (to_string(s) == text) {
      return s;
    }
  }
  return std::nullopt;
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::Confirmed ? "Confirmed" : "Dismissed";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  if (text == "Confirmed") {
    return Verdict::Confirmed;
  }
  if (text == "Dismissed") {
    return Verdict::Dismissed;
  }
  return std::nullopt;
}

ReconciliationResult make_reconciliation(std::string product_id, std::int64_t expected, std::int64_t observed) {
  const std::int64_t gap = expected - observed;
  return {std::move(product_id), expected, observed, gap > 0, gap > 0 ? gap : 0};
}

Json parse_json(std::string_view bytes) {
  Json j = Json::parse(bytes, nullptr, false);
  if (j.is_discarded()) {
    throw DecodeError("$", "malformed JSON");
  }
  return j;
}

// --- encoders -------------------------------------------------------------

Json to_json(const LandmarkFrame& frame) {
  Json points = Json::array();
  for (const Point2& p : frame.points) {
    points.push_back(point_json(p));
  }
  return {{"camera_id", frame.camera_id},
          {"zone_id", frame.zone_id},
          {"timestamp", frame.timestamp},
          {"points", std::move(points)},
          {"face_origin", point_json(frame.face_origin)},
          {"face_size", Json::array({frame.face_size.width, frame.face_size.height})},
          {"frame_ref", frame.frame_ref}};
}

Json to_json(const FeatureVector& features) {
  return {{"values", features.values}, {"source_frame", features.source_frame}, {"timestamp", features.timestamp}};
}

Json to_json(const SuspicionEvent& event) {
  Json j = {{"event_id", event.event_id},     {"camera_id", event.camera_id},
            {"zone_id", event.zone_id},       {"timestamp", event.timestamp},
            {"anomaly_score", event.anomaly_score}, {"frame_ref", event.frame_ref}};
  j["pose_label"] = event.pose_label ? Json(std::string(to_string(*event.pose_label))) : Json(nullptr);
  return j;
}

Json to_json(const Alert& alert) {
  return {{"alert_id", alert.alert_id},
          {"event", to_json(alert.event)},
          {"product_id", alert.product_id},
          {"expected_count", alert.expected_count},
          {"observed_count", alert.observed_count},
          {"deficit", alert.deficit},
          {"created_at", alert.created_at},
          {"status", std::string(to_string(alert.status))}};
}

Json to_json(const StaffFeedback& feedback) {
  Json j = {{"alert_id", feedback.alert_id},
            {"verdict", std::string(to_string(feedback.verdict))},
            {"timestamp", feedback.timestamp},
            {"operator_id", feedback.operator_id}};
  j["note"] = feedback.note ? Json(*feedback.note) : Json(nullptr);
  return j;
}

Json to_json(const ProductRecord& record) {
  return {{"product_id", record.product_id},
          {"zone_id", record.zone_id},
          {"display_name", record.display_name},
          {"expected_count", record.expected_count}};
}

Json to_json(const SaleTransaction& tx) {
  return {{"tx_id", tx.tx_id}, {"product_id", tx.product_id}, {"quantity", tx.quantity}, {"timestamp", tx.timestamp}};
}

Json to_json(const ShelfObservation& obs) {
  return {{"zone_id", obs.zone_id},
          {"product_id", obs.product_id},
          {"observed_count", obs.observed_count},
          {"timestamp", obs.timestamp}};
}

Json to_json(const ReconciliationResult& result) {
  return {{"product_id", result.product_id},
          {"expected_count", result.expected_count},
          {"observed_count", result.observed_count},
          {"mismatch", result.mismatch},
          {"deficit", result.deficit}};
}

Json to_json(const LabeledSample& sample) {
  return {{"features", to_json(sample.features)}, {"label", std::string(to_string(sample.label))}};
}

// --- decoders -------------------------------------------------------------

template <>
LandmarkFrame decode<LandmarkFrame>(const Json& j, const std::string& prefix) {
  FieldReader r(j, prefix);
  LandmarkFrame frame;
  frame.camera_id = r.non_empty_string("camera_id");
  frame.zone_id = r.string("zone_id");
  frame.timestamp = r.integer("timestamp");
  const Json& points = r.array("points");
  if (points.size() != kLandmarkCount) {
    throw DecodeError(r.path("points"), "expected 68 entries, got " + std::to_string(points.size()));
  }
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    frame.points[i] = point_from(points[i], r.path("points") + "[" + std::to_string(i) + "]");
  }
  frame.face_origin = point_from(r.at("face_origin"), r.path("face_origin"));
  Point2 size = point_from(r.at("face_size"), r.path("face_size"));
  if (size.x <= 0.0 || size.y <= 0.0) {
    throw DecodeError(r.path("face_size"), "width and height must be positive");
  }
  frame.face_size = {size.x, size.y};
  frame.frame_ref = r.string("frame_ref");
  return frame;
}

template <>
FeatureVector decode<FeatureVector>(const Json& j, const std::string& prefix) {
  FieldReader r(j, prefix);
  FeatureVector fv;
  const Json& values = r.array("values");
  if (values.size() != kFeatureDim) {
    throw DecodeError(r.path("values"), "expected 136 entries, got " + std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < kFeatureDim; ++i) {
    fv.values[i] = FieldReader::number_value(values[i], r.path("values") + "[" + std::to_string(i) + "]");
  }
  fv.source_frame = r.string("source_frame");
  fv.timestamp = r.integer("timestamp");
  return fv;
}

template <>
SuspicionEvent decode<SuspicionEvent>(const Json& j, const std::string& prefix) {
  FieldReader r(j, prefix);
  SuspicionEvent e;
  e.event_id = r.non_empty_string("event_id");
  e.camera_id = r.non_empty_string("camera_id");
  e.zone_id = r.string("zone_id");
  e.timestamp = r.integer("timestamp");
  e.anomaly_score = r.number("anomaly_score");
  if (e.anomaly_score < 0.0) {
    throw DecodeError(r.path("anomaly_score"), "must be >= 0");
  }
  if (auto label = r.optional_string("pose_label")) {
    e.pose_label = parse_pose_label(*label);
    if (!e.pose_label) {
      throw DecodeError(r.path("pose_label"), "unknown pose label '" + *label + "'");
    }
  }
  e.frame_ref = r.string("frame_ref");
  return e;
}

template <>
Alert decode<Alert>(const Json& j, const std::string& prefix) {
  FieldReader r(j, prefix);
  Alert a;
  a.alert_id = r.non_empty_string("alert_id");
  a.event = decode<SuspicionEvent>(r.at("event"), r.path("event"));
  a.product_id = r.non_empty_string("product_id");
  a.expected_count = r.integer("expected_count");
  a.observed_count = r.integer("observed_count");
  a.deficit = r.integer("deficit");
  if (a.expected_count < 0) {
    throw DecodeError(r.path("expected_count"), "must be >= 0");
  }
  if (a.observed_count < 0) {
    throw DecodeError(r.path("observed_count"), "must be >= 0");
  }
  if (a.deficit <= 0) {
    throw DecodeError(r.path("deficit"), "must be > 0");
  }
  if (a.deficit != a.expected_count - a.observed_count) {
    throw DecodeError(r.path("deficit"), "must equal expected_count - observed_count");
  }
  a.created_at = r.integer("created_at");
  std::string status = r.string("status");
  auto parsed = parse_alert_status(status);
  if (!parsed) {
    throw DecodeError(r.path("status"), "unknown status '" + status + "'");
  }
  a.status = *parsed;
  return a;
}

template <>
StaffFeedback decode<StaffFeedback>(const Json& j, const std::string& prefix) {
  FieldReader r(j, prefix);
  StaffFeedback fb;
  fb.alert_id = r.non_empty_string("alert_id");
  std::string verdict = r.string("verdict");
  auto parsed = parse_verdict(verdict);
  if (!parsed) {
    throw DecodeError(r.path("verdict"), "expected Confirmed or Dismissed");
  }
  fb.verdict = *parsed;
  fb.note = r.optional_string("note");
  fb.timestamp = r.integer("timestamp");
  fb.operator_id = r.string("operator_id");
  return fb;
}

template <>
ProductRecord decode<ProductRecord>(const Json& j, const std::string& prefix) {
  FieldReader r(j, prefix);
  ProductRecord p;
  p.product_id = r.non_empty_string("product_id");
  p.zone_id = r.non_empty_string("zone_id");
  p.display_name = r.string("display_name");
  p.expected_count = r.integer("expected_count");
  if (p.expected_count < 0) {
    throw DecodeError(r.path("expected_count"), "must be >= 0");
  }
  return p;
}

template <>
SaleTransaction decode<SaleTransaction>(const Json& j, const std::string& prefix) {
  FieldReader r(j, prefix);
  SaleTransaction tx;
  tx.tx_id = r.non_empty_string("tx_id");
  tx.product_id = r.non_empty_string("product_id");
  tx.quantity = r.integer("quantity");
  if (tx.quantity < 1) {
    throw DecodeError(r.path("quantity"), "must be >= 1");
  }
  tx.timestamp = r.integer("timestamp");
  return tx;
}

template <>
ShelfObservation decode<ShelfObservation>(const Json& j, const std::string& prefix) {
  FieldReader r(j, prefix);
  ShelfObservation obs;
  obs.zone_id = r.non_empty_string("zone_id");
  obs.product_id = r.non_empty_string("product_id");
  obs.observed_count = r.integer("observed_count");
  if (obs.observed_count < 0) {
    throw DecodeError(r.path("observed_count"), "must be >= 0");
  }
  obs.timestamp = r.integer("timestamp");
  return obs;
}

template <>
ReconciliationResult decode<ReconciliationResult>(const Json& j, const std::string& prefix) {
  FieldReader r(j, prefix);
  ReconciliationResult res;
  res.product_id = r.non_empty_string("product_id");
  res.expected_count = r.integer("expected_count");
  res.observed_count = r.integer("observed_count");
  res.mismatch = r.boolean("mismatch");
  res.deficit = r.integer("deficit");
  const auto expected = make_reconciliation(res.product_id, res.expected_count, res.observed_count);
  if (res.mismatch != expected.mismatch) {
    throw DecodeError(r.path("mismatch"), "inconsistent with counts");
  }
  if (res.deficit != expected.deficit) {
    throw DecodeError(r.path("deficit"), "must equal max(0, expected_count - observed_count)");
  }
  return res;
}

template <>
LabeledSample decode<LabeledSample>(const Json& j, const std::string& prefix) {
  FieldReader r(j, prefix);
  LabeledSample s;
  s.features = decode<FeatureVector>(r.at("features"), join(prefix, "features"));
  std::string label = r.string("label");
  auto parsed = parse_pose_label(label);
  if (!parsed) {
    throw DecodeError(r.path("label"), "unknown pose label '" + label + "'");
  }
  s.label = *parsed;
  return s;
}

}  // namespace shoplift
