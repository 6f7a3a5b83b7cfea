#include <gtest/gtest.h>

#include <future>
#include <thread>

#include "shoplift/cloud_service.hpp"
#include "support/cloud_fixtures.hpp"
#include "support/temp_dir.hpp"

namespace shoplift {
namespace {

using testing::FlakyInventory;
using testing::ScriptedLink;
using testing::suspicion;
using testing::TempDir;
using testing::verdict;

constexpr TimestampMs kT0 = 1'000'000;

struct OptionsBuilder {
  CloudOptions o;
  OptionsBuilder& window(TimestampMs ms) { o.dedup_window_ms = ms; return *this; }
  OptionsBuilder& token(std::string t) { o.control_token = std::move(t); return *this; }
  OptionsBuilder& log(std::filesystem::path p) { o.log_path = std::move(p); return *this; }
  OptionsBuilder& snapshot(std::filesystem::path p) { o.snapshot_path = std::move(p); return *this; }
  operator CloudOptions() const { return o; }
};

class CloudServiceTest : public ::testing::Test {
 protected:
  std::vector<ProductRecord> catalog{{"soap", "z1", "Soap", 10}, {"gum", "z1", "Gum", 5}, {"pen", "z2", "Pen", 4}};
  Inventory inventory{catalog};

  void observe_all(TimestampMs ts) {
    for (const auto& p : catalog) {
      inventory.record_observation({p.zone_id, p.product_id, inventory.get_product(p.product_id).expected_count, ts});
    }
  }
  void steal(const std::string& product, std::int64_t qty, TimestampMs ts) {
    const auto obs = inventory.latest_observation(product);
    const auto zone = inventory.get_product(product).zone_id;
    inventory.record_observation({zone, product, obs->observed_count - qty, ts});
  }
};

TEST_F(CloudServiceTest, SuspicionWithDeficitRaisesOneAlert) {
  CloudService cloud(inventory);
  observe_all(kT0);
  steal("soap", 1, kT0 + 10);
  const auto r = cloud.on_suspicion(suspicion("e1", "z1", kT0 + 20));
  EXPECT_EQ(r.outcome, EventOutcome::Alerted);
  ASSERT_EQ(r.alerts.size(), 1U);
  const Alert& a = r.alerts[0];
  EXPECT_EQ(a.alert_id, "A-1");
  EXPECT_EQ(a.product_id, "soap");
  EXPECT_EQ(a.deficit, 1);
  EXPECT_EQ(a.expected_count, 10);
  EXPECT_EQ(a.observed_count, 9);
  EXPECT_EQ(a.created_at, kT0 + 20);
  EXPECT_EQ(a.status, AlertStatus::Open);
  EXPECT_EQ(cloud.alert("A-1"), a);
}

TEST_F(CloudServiceTest, SuspicionWithoutDeficitIsUncorroborated) {
  CloudService cloud(inventory);
  observe_all(kT0);
  const auto r = cloud.on_suspicion(suspicion("e1", "z1", kT0 + 20));
  EXPECT_EQ(r.outcome, EventOutcome::Uncorroborated);
  EXPECT_TRUE(r.alerts.empty());
  const ZoneStatus z = cloud.zone_status("z1");
  EXPECT_EQ(z.events, 1U);
  EXPECT_EQ(z.uncorroborated, 1U);
  EXPECT_EQ(z.open_alerts, 0U);
}

TEST_F(CloudServiceTest, DeficitAloneNeverAlerts) {
  CloudService cloud(inventory);
  observe_all(kT0);
  steal("soap", 3, kT0 + 10);
  EXPECT_TRUE(cloud.alerts_since(0).empty());
  // A suspicion in a different zone does not corroborate it either.
  EXPECT_EQ(cloud.on_suspicion(suspicion("e1", "z2", kT0 + 20, "cam-2")).outcome, EventOutcome::Uncorroborated);
  EXPECT_TRUE(cloud.alerts_since(0).empty());
}

TEST_F(CloudServiceTest, StaleObservationsNeverAlert) {
  CloudService cloud(inventory);
  observe_all(kT0);
  steal("soap", 1, kT0);
  const auto r = cloud.on_suspicion(suspicion("e1", "z1", kT0 + kDefaultStalenessMs + 1));
  EXPECT_EQ(r.outcome, EventOutcome::Uncorroborated);
  EXPECT_TRUE(r.alerts.empty());
}

TEST_F(CloudServiceTest, OneAlertPerMismatchedProduct) {
  CloudService cloud(inventory);
  observe_all(kT0);
  steal("soap", 1, kT0 + 1);
  steal("gum", 2, kT0 + 1);
  const auto r = cloud.on_suspicion(suspicion("e1", "z1", kT0 + 2));
  ASSERT_EQ(r.alerts.size(), 2U);
  EXPECT_EQ(r.alerts[0].product_id, "soap");
  EXPECT_EQ(r.alerts[1].product_id, "gum");
  EXPECT_EQ(r.alerts[1].alert_id, "A-2");
}

TEST_F(CloudServiceTest, DedupWindowSuppressesRepeatsForSameProduct) {
  CloudService cloud(inventory, OptionsBuilder().window(1000));
  observe_all(kT0);
  steal("soap", 1, kT0);
  EXPECT_EQ(cloud.on_suspicion(suspicion("e1", "z1", kT0)).outcome, EventOutcome::Alerted);
  EXPECT_EQ(cloud.on_suspicion(suspicion("e2", "z1", kT0 + 999)).outcome, EventOutcome::Suppressed);
  // A new product mismatch inside the window still alerts.
  steal("gum", 1, kT0 + 999);
  const auto r = cloud.on_suspicion(suspicion("e3", "z1", kT0 + 999));
  ASSERT_EQ(r.alerts.size(), 1U);
  EXPECT_EQ(r.alerts[0].product_id, "gum");
  // The window is exclusive at its edge.
  const auto later = cloud.on_suspicion(suspicion("e4", "z1", kT0 + 1000));
  ASSERT_EQ(later.alerts.size(), 1U);
  EXPECT_EQ(later.alerts[0].product_id, "soap");
}

TEST_F(CloudServiceTest, ReplayedEventIsNoOp) {
  CloudService cloud(inventory);
  observe_all(kT0);
  steal("soap", 1, kT0);
  const auto event = suspicion("e1", "z1", kT0 + 5);
  EXPECT_EQ(cloud.on_suspicion(event).outcome, EventOutcome::Alerted);
  EXPECT_EQ(cloud.on_suspicion(event).outcome, EventOutcome::Duplicate);
  EXPECT_EQ(cloud.alerts_since(0).size(), 1U);
  EXPECT_EQ(cloud.received_events().size(), 1U);
  EXPECT_EQ(cloud.zone_status("z1").events, 1U);
}

TEST_F(CloudServiceTest, ConcurrentReplaysProduceOneAlert) {
  CloudService cloud(inventory);
  observe_all(kT0);
  steal("soap", 1, kT0);
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 20; ++i) {
        cloud.on_suspicion(suspicion("e" + std::to_string(i), "z1", kT0 + i));
      }
    });
  }
  for (auto& t : threads) {
    t.join();
  }
  EXPECT_EQ(cloud.alerts_since(0).size(), 1U);
  EXPECT_EQ(cloud.received_events().size(), 20U);
}

TEST_F(CloudServiceTest, InvalidEventIsRejected) {
  CloudService cloud(inventory);
  EXPECT_THROW(cloud.on_suspicion(suspicion("", "z1", kT0)), ServiceError);
  EXPECT_THROW(cloud.on_suspicion(suspicion("e1", "z1", kT0, "cam-1", -1.0)), ServiceError);
}

TEST_F(CloudServiceTest, FeedbackStateMachine) {
  CloudService cloud(inventory);
  observe_all(kT0);
  steal("soap", 1, kT0);
  steal("gum", 1, kT0);
  cloud.on_suspicion(suspicion("e1", "z1", kT0));

  EXPECT_EQ(cloud.record_feedback(verdict("A-1", Verdict::Confirmed)).status, AlertStatus::Confirmed);
  EXPECT_EQ(cloud.record_feedback(verdict("A-2", Verdict::Dismissed)).status, AlertStatus::Dismissed);
  EXPECT_EQ(cloud.zone_status("z1").false_positives, 1U);
  EXPECT_EQ(cloud.zone_status("z1").confirmed, 1U);
  EXPECT_EQ(cloud.zone_status("z1").open_alerts, 0U);

  // Identical resubmission is idempotent; a different verdict conflicts.
  EXPECT_EQ(cloud.record_feedback(verdict("A-2", Verdict::Dismissed)).status, AlertStatus::Dismissed);
  EXPECT_EQ(cloud.zone_status("z1").false_positives, 1U);
  try {
    cloud.record_feedback(verdict("A-2", Verdict::Confirmed));
    FAIL() << "expected a conflict";
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.code(), ServiceError::Code::Conflict);
  }
  EXPECT_EQ(cloud.alert("A-2")->status, AlertStatus::Dismissed);
  try {
    cloud.record_feedback(verdict("A-9", Verdict::Confirmed));
    FAIL() << "expected unknown alert";
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.code(), ServiceError::Code::UnknownAlert);
  }
}

TEST_F(CloudServiceTest, UnreachableInventoryParksAndRetries) {
  FlakyInventory flaky(inventory);
  CloudService cloud(flaky);
  observe_all(kT0);
  steal("soap", 1, kT0);
  flaky.down = true;
  EXPECT_EQ(cloud.on_suspicion(suspicion("e1", "z1", kT0 + 5)).outcome, EventOutcome::Parked);
  EXPECT_EQ(cloud.on_suspicion(suspicion("e1", "z1", kT0 + 5)).outcome, EventOutcome::Duplicate);
  EXPECT_EQ(cloud.parked_count(), 1U);
  EXPECT_EQ(cloud.retry_parked(), 0U);
  flaky.down = false;
  EXPECT_EQ(cloud.retry_parked(), 1U);
  EXPECT_EQ(cloud.parked_count(), 0U);
  ASSERT_EQ(cloud.alerts_since(0).size(), 1U);
  // Decided at the event's own timestamp, not at retry time.
  EXPECT_EQ(cloud.alerts_since(0)[0].alert.created_at, kT0 + 5);
}

TEST_F(CloudServiceTest, ControlPendingUntilAgentAcknowledges) {
  CloudService cloud(inventory, OptionsBuilder().token("tok"));
  EXPECT_THROW(cloud.set_threshold("cam-1", 2.0), ServiceError);
  cloud.register_agent("cam-1", "z1");
  EXPECT_THROW(cloud.set_threshold("cam-1", -1.0), ServiceError);
  EXPECT_THROW(cloud.set_threshold("cam-1", 0.0), ServiceError);

  const ControlReceipt r = cloud.set_threshold("cam-1", 2.0);
  EXPECT_EQ(r.status, ControlStatus::Pending);
  EXPECT_EQ(r.version, 1U);
  const auto pending = cloud.pending_control("cam-1");
  ASSERT_TRUE(pending);
  EXPECT_EQ(pending->token, "tok");
  EXPECT_EQ(pending->threshold, 2.0);

  cloud.acknowledge({"cam-1", 1, true, std::nullopt});
  EXPECT_FALSE(cloud.pending_control("cam-1"));
  EXPECT_EQ(cloud.control_state("cam-1")->status, ControlStatus::Applied);
  EXPECT_THROW(cloud.acknowledge({"cam-1", 7, true, std::nullopt}), ServiceError);
}

TEST_F(CloudServiceTest, LiveLinkAppliesImmediatelyAndOfflineLinkStaysPending) {
  CloudService cloud(inventory, OptionsBuilder().token("tok"));
  cloud.register_agent("cam-1", "z1");
  auto link = std::make_shared<ScriptedLink>();
  link->expected_token = "tok";
  cloud.attach_agent_link("cam-1", link);

  EXPECT_EQ(cloud.set_threshold("cam-1", 2.0).status, ControlStatus::Applied);
  link->online = false;
  const auto r = cloud.set_threshold("cam-1", 2.5);
  EXPECT_EQ(r.status, ControlStatus::Pending);
  EXPECT_EQ(cloud.pending_control("cam-1")->version, 2U);
  link->online = true;
  link->expected_token = "other";
  const auto rejected = cloud.set_threshold("cam-1", 3.0);
  EXPECT_EQ(rejected.status, ControlStatus::Rejected);
  EXPECT_EQ(rejected.reason, "bad token");
}

TEST_F(CloudServiceTest, ControlTokenNeverReachesTheLog) {
  TempDir dir;
  CloudService cloud(inventory, OptionsBuilder().token("s3cret").log(dir / "d.ndjson"));
  cloud.register_agent("cam-1", "z1");
  cloud.set_threshold("cam-1", 2.0);
  for (const Json& record : read_ndjson_file(dir / "d.ndjson")) {
    EXPECT_EQ(record.dump().find("s3cret"), std::string::npos) << record.dump();
  }
}

TEST_F(CloudServiceTest, RestartFromLogRestoresState) {
  TempDir dir;
  CloudOptions options = OptionsBuilder().log(dir / "d.ndjson");
  observe_all(kT0);
  steal("soap", 1, kT0);
  {
    CloudService cloud(inventory, options);
    cloud.register_agent("cam-1", "z1");
    cloud.on_suspicion(suspicion("e1", "z1", kT0 + 1));
    cloud.on_suspicion(suspicion("e2", "z1", kT0 + 2));
    cloud.record_feedback(verdict("A-1", Verdict::Dismissed));
    cloud.set_threshold("cam-1", 2.0);
  }
  CloudService cloud(inventory, options);
  ASSERT_EQ(cloud.alerts_since(0).size(), 1U);
  EXPECT_EQ(cloud.alert("A-1")->status, AlertStatus::Dismissed);
  EXPECT_EQ(cloud.zone_status("z1").false_positives, 1U);
  EXPECT_EQ(cloud.received_events().size(), 2U);
  EXPECT_EQ(cloud.on_suspicion(suspicion("e1", "z1", kT0 + 1)).outcome, EventOutcome::Duplicate);
  // Dedup state survives too.
  EXPECT_EQ(cloud.on_suspicion(suspicion("e3", "z1", kT0 + 3)).outcome, EventOutcome::Suppressed);
  EXPECT_EQ(cloud.pending_control("cam-1")->version, 1U);
  EXPECT_EQ(cloud.set_threshold("cam-1", 2.5).version, 2U);
}

TEST_F(CloudServiceTest, SnapshotPlusLogTailRestoresState) {
  TempDir dir;
  CloudOptions options = OptionsBuilder().log(dir / "d.ndjson").snapshot(dir / "snap.json");
  observe_all(kT0);
  steal("soap", 1, kT0);
  steal("pen", 1, kT0);
  {
    CloudService cloud(inventory, options);
    cloud.on_suspicion(suspicion("e1", "z1", kT0 + 1));
    cloud.write_snapshot();
    cloud.on_suspicion(suspicion("e2", "z2", kT0 + 2, "cam-2"));
    cloud.record_feedback(verdict("A-1", Verdict::Confirmed));
  }
  CloudService cloud(inventory, options);
  ASSERT_EQ(cloud.alerts_since(0).size(), 2U);
  EXPECT_EQ(cloud.alert("A-1")->status, AlertStatus::Confirmed);
  EXPECT_EQ(cloud.alert("A-2")->product_id, "pen");
  EXPECT_EQ(cloud.received_events().size(), 2U);
  // The log is kept whole for audits.
  EXPECT_EQ(read_ndjson_file(dir / "d.ndjson").size(), 3U);
  EXPECT_TRUE(audit_decision_log(read_ndjson_file(dir / "d.ndjson"), options.dedup_window_ms).empty());
}

TEST_F(CloudServiceTest, FeedCursorAndWaiters) {
  CloudService cloud(inventory);
  observe_all(kT0);
  steal("soap", 1, kT0);
  auto waiter = std::async(std::launch::async, [&] { return cloud.wait_for_alerts(0, std::chrono::seconds(5)); });
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  cloud.on_suspicion(suspicion("e1", "z1", kT0));
  const auto got = waiter.get();
  ASSERT_EQ(got.size(), 1U);
  EXPECT_EQ(got[0].seq, 1U);
  EXPECT_EQ(cloud.feed_head(), 1U);
  EXPECT_TRUE(cloud.alerts_since(1).empty());
  EXPECT_TRUE(cloud.wait_for_alerts(1, std::chrono::milliseconds(20)).empty());
  {
    CloudService::Subscription a(cloud);
    CloudService::Subscription b(cloud);
    EXPECT_EQ(cloud.live_subscribers(), 2U);
  }
  EXPECT_EQ(cloud.live_subscribers(), 0U);
}

TEST_F(CloudServiceTest, AuditAcceptsGenuineLogAndFlagsTampering) {
  TempDir dir;
  CloudOptions options = OptionsBuilder().window(1000).log(dir / "d.ndjson");
  observe_all(kT0);
  {
    CloudService cloud(inventory, options);
    cloud.on_suspicion(suspicion("e0", "z1", kT0));
    steal("soap", 1, kT0 + 1);
    cloud.on_suspicion(suspicion("e1", "z1", kT0 + 2));
    cloud.on_suspicion(suspicion("e2", "z1", kT0 + 3));
    cloud.record_feedback(verdict("A-1", Verdict::Confirmed));
  }
  auto records = read_ndjson_file(dir / "d.ndjson");
  ASSERT_TRUE(audit_decision_log(records, 1000).empty());

  auto drop_alert = records;
  drop_alert[1]["alerts"] = Json::array();
  drop_alert[1]["outcome"] = "Uncorroborated";
  EXPECT_FALSE(audit_decision_log(drop_alert, 1000).empty());

  auto spurious = records;
  spurious[0]["alerts"] = records[1]["alerts"];
  spurious[0]["outcome"] = "Alerted";
  EXPECT_FALSE(audit_decision_log(spurious, 1000).empty());

  auto unsuppressed = records;
  unsuppressed[2]["suppressed"] = Json::array();
  EXPECT_FALSE(audit_decision_log(unsuppressed, 1000).empty());

  auto reopened = records;
  reopened.push_back(reopened.back());
  reopened.back()["feedback"]["verdict"] = "Dismissed";
  EXPECT_FALSE(audit_decision_log(reopened, 1000).empty());
}

}  // namespace
}  // namespace shoplift
