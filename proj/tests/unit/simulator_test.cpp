#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "shoplift/features.hpp"
#include "shoplift/pose_templates.hpp"
#include "shoplift/simulator.hpp"
#include "support/temp_dir.hpp"

namespace shoplift {
namespace {

const std::filesystem::path kScenarios = SHOPLIFT_SCENARIO_DIR;

Scenario scenario(const std::string& name) { return load_scenario(kScenarios / (name + ".json")); }

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// A small two-product scenario; fast enough to run many times.
Scenario tiny() {
  Scenario s;
  s.name = "tiny";
  s.seed = 7;
  s.duration_ticks = 200;
  s.lof.warmup_min = 128;
  s.zones = {{"z1", "cam-1"}};
  s.products = {{"soap", "z1", "Soap", 20}, {"gum", "z1", "Gum", 20}};
  CustomerScript c;
  c.customer_id = "c1";
  c.zone_id = "z1";
  c.enter_tick = 0;
  c.leave_tick = 200;
  c.actions = {{50, ActionType::Purchase, "soap", 2, 0}, {150, ActionType::Steal, "gum", 1, 1}};
  s.customers = {c};
  return s;
}

TEST(Scenario, RoundTripsThroughJson) {
  for (const char* name : {"clean-retail", "single-theft", "anomaly-without-theft", "theft-without-anomaly"}) {
    const Scenario s = scenario(name);
    EXPECT_EQ(to_json(scenario_from_json(to_json(s))), to_json(s)) << name;
  }
}

TEST(Scenario, ValidationRejectsBrokenScripts) {
  auto expect_invalid = [](auto mutate) {
    Scenario s = tiny();
    mutate(s);
    EXPECT_THROW(s.validate(), ConfigError);
  };
  expect_invalid([](Scenario& s) { s.duration_ticks = 0; });
  expect_invalid([](Scenario& s) { s.tick_ms = 0; });
  expect_invalid([](Scenario& s) { s.customers[0].zone_id = "nowhere"; });
  expect_invalid([](Scenario& s) { s.customers[0].actions[0].product_id = "caviar"; });
  expect_invalid([](Scenario& s) { s.customers[0].actions[0].tick = 500; });
  expect_invalid([](Scenario& s) { s.customers[0].actions[0].quantity = 0; });
  expect_invalid([](Scenario& s) { s.sigma_px = -1.0; });
  expect_invalid([](Scenario& s) { s.zones.push_back({"z2", "cam-1"}); });
  EXPECT_NO_THROW(tiny().validate());
  EXPECT_THROW(scenario_from_json(Json{{"name", "x"}}), ConfigError);
}

TEST(Timeline, IsDeterministicPerSeed) {
  const Scenario s = tiny();
  const Timeline a = build_timeline(s);
  const Timeline b = build_timeline(s);
  ASSERT_EQ(a.items.size(), b.items.size());
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    EXPECT_EQ(a.items[i].what, b.items[i].what) << i;
  }
  Scenario other = s;
  other.seed = 8;
  const Timeline c = build_timeline(other);
  EXPECT_NE(std::get<LandmarkFrame>(a.items.back().what), std::get<LandmarkFrame>(c.items.back().what));
}

TEST(Timeline, AddingACustomerLeavesOthersUnchanged) {
  Scenario s = tiny();
  const Timeline before = build_timeline(s);
  CustomerScript extra;
  extra.customer_id = "c2";
  extra.zone_id = "z1";
  extra.enter_tick = 10;
  extra.leave_tick = 100;
  s.customers.push_back(extra);
  const Timeline after = build_timeline(s);

  auto frames_of = [](const Timeline& t, const std::string& customer) {
    std::vector<LandmarkFrame> out;
    for (const auto& item : t.items) {
      if (const auto* f = std::get_if<LandmarkFrame>(&item.what); f && f->frame_ref.ends_with("/" + customer)) {
        out.push_back(*f);
      }
    }
    return out;
  };
  EXPECT_EQ(frames_of(before, "c1"), frames_of(after, "c1"));
  EXPECT_EQ(frames_of(after, "c2").size(), 90U);
}

TEST(Timeline, OrdersItemsWithinATick) {
  const Timeline t = build_timeline(tiny());
  std::int64_t tick = -1;
  int stage = 0;
  for (const auto& item : t.items) {
    if (item.tick != tick) {
      ASSERT_GT(item.tick, tick);
      tick = item.tick;
      stage = 0;
    }
    const int s = static_cast<int>(item.what.index());
    EXPECT_GE(s, stage) << "tick " << tick;
    stage = s;
  }
  ASSERT_EQ(t.thefts.size(), 1U);
  EXPECT_EQ(t.thefts[0].product_id, "gum");
  EXPECT_EQ(t.anomalous_frames, 1U);
}

TEST(Timeline, RejectsTakingMoreThanTheShelfHolds) {
  Scenario s = tiny();
  s.customers[0].actions[0].quantity = 21;
  EXPECT_THROW(build_timeline(s), ConfigError);
}

TEST(Timeline, StreamFilesAreByteIdenticalAcrossRuns) {
  const Scenario s = scenario("single-theft");
  testing::TempDir a;
  testing::TempDir b;
  write_timeline(s, build_timeline(s), a.path());
  write_timeline(s, build_timeline(s), b.path());
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
    const auto name = entry.path().filename();
    EXPECT_EQ(slurp(entry.path()), slurp(b.path() / name)) << name;
    ++files;
  }
  EXPECT_EQ(files, 5U);  // two cameras, sales, observations, catalog
}

TEST(PoseDataset, IsBalancedAndDeterministic) {
  PoseDatasetParams params;
  params.sigma_px = kBenchmarkSigmaPx;
  const auto a = generate_pose_dataset(params, kBenchmarkSamples, kBenchmarkSeed);
  const auto b = generate_pose_dataset(params, kBenchmarkSamples, kBenchmarkSeed);
  EXPECT_EQ(a, b);
  std::map<PoseLabel, std::size_t> counts;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(index_of(a[i].label), i % kPoseClassCount);
    ++counts[a[i].label];
  }
  std::vector<std::size_t> sizes;
  for (const auto& [label, n] : counts) {
    sizes.push_back(n);
  }
  EXPECT_EQ(sizes, (std::vector<std::size_t>{276, 276, 276, 275}));
}

TEST(PoseDataset, ZeroJitterReproducesTemplates) {
  const auto samples = generate_pose_dataset(PoseDatasetParams{}, 8, 1);
  const PoseTemplates templates = PoseTemplates::standard();
  for (const auto& sample : samples) {
    LandmarkFrame frame;
    frame.face_size = {kDatasetFaceSize, kDatasetFaceSize};
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
      frame.points[i] = {templates[sample.label][i].x * kDatasetFaceSize, templates[sample.label][i].y * kDatasetFaceSize};
    }
    const FeatureVector expected = normalize(frame);
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
      EXPECT_NEAR(sample.features.values[d], expected.values[d], 1e-12);
    }
  }
}

TEST(Scoring, MatchesAlertsToThefts) {
  RunReport r;
  Alert hit;
  hit.event.zone_id = "z1";
  hit.product_id = "gum";
  hit.created_at = 1'000;
  Alert stray = hit;
  stray.product_id = "soap";
  Alert late = hit;
  late.created_at = 1'000'000;
  r.alerts = {hit, stray, late};
  const std::vector<Theft> thefts = {{"c1", "z1", "gum", 1, 900}, {"c2", "z1", "gum", 1, 990'000}, {"c3", "z2", "pen", 1, 5}};
  score_alerts(r, thefts, 120'000);
  EXPECT_EQ(r.true_positives, 2U);
  EXPECT_EQ(r.false_positives, 1U);
  EXPECT_EQ(r.misses, 1U);
  EXPECT_EQ(r.true_positives + r.misses, thefts.size());
  EXPECT_DOUBLE_EQ(r.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.recall, 2.0 / 3.0);

  RunReport empty;
  score_alerts(empty, {}, 120'000);
  EXPECT_EQ(empty.precision, 1.0);
  EXPECT_EQ(empty.recall, 1.0);
}

TEST(Scoring, InventoryLogMustShowEachTheft) {
  const Scenario s = tiny();
  const Timeline t = build_timeline(s);
  Inventory inventory(s.products);
  for (const auto& item : t.items) {
    if (const auto* tx = std::get_if<SaleTransaction>(&item.what)) {
      inventory.apply_sale(*tx);
    } else if (const auto* obs = std::get_if<ShelfObservation>(&item.what)) {
      inventory.record_observation(*obs);
    }
  }
  const auto log = inventory.audit_log();
  EXPECT_TRUE(thefts_match_inventory_log(log, t.thefts));
  std::vector<Theft> wrong = t.thefts;
  wrong[0].quantity = 2;
  EXPECT_FALSE(thefts_match_inventory_log(log, wrong));
  EXPECT_FALSE(thefts_match_inventory_log(log, {}));
}

TEST(RunScenario, ReportIsDeterministic) {
  const Scenario s = scenario("single-theft");
  const RunReport a = run_scenario(s);
  const RunReport b = run_scenario(s);
  ASSERT_FALSE(a.failed) << a.error;
  EXPECT_EQ(to_json(a, false), to_json(b, false));
}

struct Expected {
  const char* name;
  std::size_t alerts;
  const char* product;
};

class ScenarioOutcome : public ::testing::TestWithParam<Expected> {};

TEST_P(ScenarioOutcome, AlertsOnlyWhenBothSignalsAgree) {
  const Expected e = GetParam();
  const RunReport r = run_scenario(scenario(e.name));
  ASSERT_FALSE(r.failed) << r.error;
  EXPECT_EQ(r.alerts.size(), e.alerts);
  if (e.product) {
    ASSERT_FALSE(r.alerts.empty());
    EXPECT_EQ(r.alerts[0].product_id, e.product);
    EXPECT_EQ(r.true_positives, 1U);
  }
  EXPECT_EQ(r.false_positives, 0U);
  EXPECT_TRUE(r.audit_violations.empty()) << r.audit_violations.front();
  EXPECT_TRUE(r.ground_truth_consistent);
  EXPECT_EQ(r.true_positives + r.misses, r.scripted_thefts);
}

INSTANTIATE_TEST_SUITE_P(Scenarios, ScenarioOutcome,
                         ::testing::Values(Expected{"clean-retail", 0, nullptr},
                                           Expected{"single-theft", 1, "lipstick"},
                                           Expected{"anomaly-without-theft", 0, nullptr},
                                           Expected{"theft-without-anomaly", 0, nullptr}),
                         [](const auto& info) {
                           std::string n = info.param.name;
                           std::erase(n, '-');
                           return n;
                         });

}  // namespace
}  // namespace shoplift
