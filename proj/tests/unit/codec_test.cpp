#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <vector>

#include "shoplift/codec.hpp"
#include "support/generators.hpp"

namespace shoplift {
namespace {

SuspicionEvent sample_event() {
  return {"cam-1#120", "cam-1", "zone-a", 1700000000123, 3.25, PoseLabel::FacingDown, "frames/120.jpg"};
}

Alert sample_alert() {
  return {"A-1", sample_event(), "sku-42", 8, 7, 1, 1700000000200, AlertStatus::Open};
}

template <class T>
void expect_round_trip(const T& value) {
  const std::string once = serialize(value);
  const T decoded = deserialize<T>(once);
  EXPECT_EQ(decoded, value);
  EXPECT_EQ(serialize(decoded), once);
}

TEST(Codec, LandmarkFrameRoundTripsByteIdentical) {
  std::mt19937_64 rng(7);
  expect_round_trip(testing::random_frame(rng, "cam-9", 42));
}

TEST(Codec, EveryCoreTypeRoundTrips) {
  std::mt19937_64 rng(11);
  expect_round_trip(sample_event());
  SuspicionEvent unlabeled = sample_event();
  unlabeled.pose_label.reset();
  expect_round_trip(unlabeled);
  expect_round_trip(sample_alert());
  expect_round_trip(StaffFeedback{"A-1", Verdict::Dismissed, "false alarm", 5, "op-3"});
  expect_round_trip(StaffFeedback{"A-1", Verdict::Confirmed, std::nullopt, 5, "op-3"});
  expect_round_trip(ProductRecord{"sku-1", "zone-a", "Green tea", 12});
  expect_round_trip(SaleTransaction{"tx-1", "sku-1", 2, 99});
  expect_round_trip(ShelfObservation{"zone-a", "sku-1", 7, 100});
  expect_round_trip(make_reconciliation("sku-1", 8, 7));

  FeatureVector fv;
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (double& v : fv.values) {
    v = u(rng);
  }
  fv.source_frame = "f";
  fv.timestamp = 3;
  expect_round_trip(fv);
  expect_round_trip(LabeledSample{fv, PoseLabel::EyesClosed});
}

TEST(Codec, RandomFramesRoundTrip) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    expect_round_trip(testing::random_frame(rng, "cam-" + std::to_string(i % 3), i));
  }
}

TEST(Codec, FrameWithSixtySevenPointsIsRejected) {
  std::mt19937_64 rng(1);
  Json j = to_json(testing::random_frame(rng));
  j["points"].erase(j["points"].size() - 1);
  try {
    decode<LandmarkFrame>(j);
    FAIL() << "expected DecodeError";
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.field(), "points");
    EXPECT_EQ(std::string(e.what()).rfind("points: expected 68", 0), 0U) << e.what();
  }
}

TEST(Codec, NonPositiveFaceSizeIsRejected) {
  std::mt19937_64 rng(1);
  Json j = to_json(testing::random_frame(rng));
  j["face_size"][1] = 0.0;
  EXPECT_THROW(decode<LandmarkFrame>(j), DecodeError);
}

TEST(Codec, AlertWithZeroDeficitIsRejected) {
  Alert a = sample_alert();
  a.observed_count = a.expected_count;
  a.deficit = 0;
  try {
    deserialize<Alert>(serialize(a));
    FAIL() << "expected DecodeError";
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.field(), "deficit");
  }
}

TEST(Codec, AlertWithInconsistentDeficitIsRejected) {
  Alert a = sample_alert();
  a.deficit = 2;
  EXPECT_THROW(deserialize<Alert>(serialize(a)), DecodeError);
}

TEST(Codec, NestedErrorsCarryTheFullPath) {
  Json j = to_json(sample_alert());
  j["event"]["anomaly_score"] = -0.5;
  try {
    decode<Alert>(j);
    FAIL();
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.field(), "event.anomaly_score");
  }
}

TEST(Codec, InvariantViolationsNameTheirField) {
  Json sale = to_json(SaleTransaction{"tx", "sku", 1, 0});
  sale["quantity"] = 0;
  Json obs = to_json(ShelfObservation{"z", "sku", 1, 0});
  obs["observed_count"] = -1;
  Json product = to_json(ProductRecord{"sku", "z", "n", 1});
  product["expected_count"] = -3;
  Json fb = to_json(StaffFeedback{"A-1", Verdict::Confirmed, std::nullopt, 0, "op"});
  fb["verdict"] = "Maybe";
  Json rec = to_json(make_reconciliation("sku", 8, 7));
  rec["mismatch"] = false;
  Json event = to_json(sample_event());
  event["timestamp"] = 1.5;

  const std::vector<std::pair<std::string, std::function<void()>>> cases = {
      {"quantity", [&] { decode<SaleTransaction>(sale); }},
      {"observed_count", [&] { decode<ShelfObservation>(obs); }},
      {"expected_count", [&] { decode<ProductRecord>(product); }},
      {"verdict", [&] { decode<StaffFeedback>(fb); }},
      {"mismatch", [&] { decode<ReconciliationResult>(rec); }},
      {"timestamp", [&] { decode<SuspicionEvent>(event); }},
  };
  for (const auto& [field, decode] : cases) {
    try {
      decode();
      ADD_FAILURE() << field << " accepted";
    } catch (const DecodeError& e) {
      EXPECT_EQ(e.field(), field);
    }
  }
}

TEST(Codec, MalformedJsonIsADecodeError) {
  EXPECT_THROW(deserialize<SuspicionEvent>("{not json"), DecodeError);
  EXPECT_THROW(deserialize<SuspicionEvent>("[1,2]"), DecodeError);
}

TEST(Codec, ReconciliationHelperKeepsInvariants) {
  for (std::int64_t expected = 0; expected < 6; ++expected) {
    for (std::int64_t observed = 0; observed < 6; ++observed) {
      const auto r = make_reconciliation("p", expected, observed);
      EXPECT_EQ(r.mismatch, expected - observed > 0);
      EXPECT_EQ(r.deficit, std::max<std::int64_t>(0, expected - observed));
    }
  }
}

}  // namespace
}  // namespace shoplift
