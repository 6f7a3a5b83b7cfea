#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shoplift/anomaly.hpp"
#include "shoplift/cloud_service.hpp"
#include "shoplift/inventory.hpp"
#include "shoplift/json_fields.hpp"
#include "shoplift/model.hpp"

namespace shoplift {

enum class ActionType : std::uint8_t { Browse, Purchase, Steal, ActSuspicious };

std::string_view to_string(ActionType type);

struct CustomerAction {
  std::int64_t tick = 0;
  ActionType type = ActionType::Browse;
  std::string product_id;
  std::int64_t quantity = 1;
  // Frames from this tick on that are drawn from the anomalous template.
  std::int64_t anomaly_frames = 0;
};

struct CustomerScript {
  std::string customer_id;
  std::string zone_id;
  // Present for enter_tick <= tick < leave_tick; one frame per tick.
  std::int64_t enter_tick = 0;
  std::int64_t leave_tick = 0;
  std::vector<CustomerAction> actions;
};

struct ZoneSpec {
  std::string zone_id;
  std::string camera_id;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  std::int64_t duration_ticks = 0;
  TimestampMs tick_ms = 100;
  TimestampMs start_ms = 1'700'000'000'000;
  std::int64_t observation_every = 10;
  // Landmark jitter in pixels and the face box size range of generated frames.
  double sigma_px = 1.5;
  double face_size_px = 160.0;
  double face_size_spread_px = 8.0;
  LofConfig lof;
  TimestampMs staleness_ms = kDefaultStalenessMs;
  TimestampMs dedup_window_ms = kDefaultDedupWindowMs;
  std::vector<ZoneSpec> zones;
  std::vector<ProductRecord> products;
  std::vector<CustomerScript> customers;

  // Throws ConfigError.
  void validate() const;
  TimestampMs time_of(std::int64_t tick) const { return start_ms + tick * tick_ms; }
};

Scenario scenario_from_json(const Json& j);
Json to_json(const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);

// One scripted theft, the ground truth alerts are scored against.
struct Theft {
  std::string customer_id;
  std::string zone_id;
  std::string product_id;
  std::int64_t quantity = 0;
  TimestampMs at = 0;
};

struct TimelineItem {
  std::int64_t tick = 0;
  std::variant<SaleTransaction, ShelfObservation, LandmarkFrame> what;
};

// Everything a scenario feeds into the system, in delivery order. Within a
// tick: sales, then shelf observations (taken after the tick's shelf
// changes), then frames.
struct Timeline {
  std::vector<TimelineItem> items;
  std::vector<Theft> thefts;
  std::size_t anomalous_frames = 0;
};

// Deterministic in (scenario, seed). Each customer draws from its own random
// stream, so adding a customer leaves the others' frames unchanged.
Timeline build_timeline(const Scenario& scenario);

// Writes <dir>/frames-<camera_id>.ndjson, sales.ndjson, observations.ndjson
// and catalog.json.
void write_timeline(const Scenario& scenario, const Timeline& timeline, const std::filesystem::path& dir);

struct StageLatency {
  std::size_t samples = 0;
  double mean_us = 0.0;
  double max_us = 0.0;

  void add(double us);
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;

  std::uint64_t frames = 0;
  std::uint64_t events = 0;
  std::uint64_t uncorroborated = 0;
  std::uint64_t suppressed = 0;
  std::vector<Alert> alerts;
  std::uint64_t scripted_thefts = 0;
  std::uint64_t true_positives = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t misses = 0;
  double precision = 1.0;
  double recall = 1.0;

  // Conjunction-law and state-machine audit of the decision log.
  std::vector<std::string> audit_violations;
  // Every theft shows up as a deficit of its quantity in the inventory log.
  bool ground_truth_consistent = true;

  StageLatency frame_latency;
  StageLatency decision_latency;
};

// Latency fields are wall-clock measurements; everything else is
// deterministic per (scenario, seed).
Json to_json(const RunReport& report, bool include_latency = true);
std::string format_report(const RunReport& report);

struct RunOptions {
  // Where decision and inventory logs are written; a fresh temporary
  // directory is used (and removed) when empty.
  std::optional<std::filesystem::path> work_dir;
};

// Runs every component in-process on one thread: inventory, decision
// service and one edge agent per zone, fed from the timeline.
RunReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

// Scores alerts against thefts: an alert is a true positive when it names
// the zone and product of an unmatched theft that happened at or before the
// alert and no longer ago than the dedup window.
void score_alerts(RunReport& report, const std::vector<Theft>& thefts, TimestampMs window_ms);

// Checks the inventory log against the thefts: between consecutive
// observations of a product the deficit grows by exactly the stolen quantity.
bool thefts_match_inventory_log(const std::vector<InventoryLogEntry>& log, const std::vector<Theft>& thefts);

}  // namespace shoplift
