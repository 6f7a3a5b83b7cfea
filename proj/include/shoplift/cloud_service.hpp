#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "shoplift/control.hpp"
#include "shoplift/inventory.hpp"
#include "shoplift/model.hpp"
#include "shoplift/ndjson_log.hpp"

namespace shoplift {

inline constexpr TimestampMs kDefaultDedupWindowMs = 120'000;

struct CloudOptions {
  // Alerts for one (zone, product) closer together than this are suppressed.
  TimestampMs dedup_window_ms = kDefaultDedupWindowMs;
  // Shared secret carried in control messages and required by the control API.
  std::string control_token;
  std::optional<std::filesystem::path> log_path;
  std::optional<std::filesystem::path> snapshot_path;
  // Creates a push link for an agent that registered a control endpoint.
  std::function<std::shared_ptr<AgentControlLink>(const std::string& endpoint)> link_factory;
};

enum class EventOutcome : std::uint8_t { Alerted, Suppressed, Uncorroborated, Parked, Duplicate };

std::string_view to_string(EventOutcome outcome);

struct SuspicionResult {
  EventOutcome outcome = EventOutcome::Uncorroborated;
  std::vector<Alert> alerts;
};

// Position of an alert in the staff feed. seq starts at 1 and is the cursor
// consoles resume from.
struct FeedEntry {
  std::uint64_t seq = 0;
  Alert alert;
};

Json to_json(const FeedEntry& entry);

enum class ControlStatus : std::uint8_t { Applied, Pending, Rejected };

std::string_view to_string(ControlStatus status);

struct ControlReceipt {
  std::string camera_id;
  std::uint64_t version = 0;
  ControlStatus status = ControlStatus::Pending;
  std::optional<std::string> reason;
};

Json to_json(const ControlReceipt& receipt);

struct ZoneStatus {
  std::string zone_id;
  std::vector<std::string> products;
  std::uint64_t events = 0;
  std::uint64_t uncorroborated = 0;
  std::uint64_t open_alerts = 0;
  std::uint64_t confirmed = 0;
  std::uint64_t false_positives = 0;
};

Json to_json(const ZoneStatus& status);

// The decision service. Alerts only when a suspicion event for a zone meets a
// fresh stock deficit for a product in that zone.
//
// Every state change is first appended to the log and then applied, so a
// restarted service replays the log into the same state. The optional
// snapshot stores the applied state plus the number of log records it covers.
class CloudService {
 public:
  explicit CloudService(const InventoryPort& inventory, CloudOptions options = {});
  ~CloudService();

  CloudService(const CloudService&) = delete;
  CloudService& operator=(const CloudService&) = delete;

  // Reconciles every product in event.zone_id at event.timestamp and creates
  // one Open alert per mismatched product outside the dedup window. A repeated
  // event_id is a no-op. When the inventory is unreachable the event is
  // parked and decided later by retry_parked().
  SuspicionResult on_suspicion(const SuspicionEvent& event);
  // Returns how many parked events were decided.
  std::size_t retry_parked();
  std::size_t parked_count() const;

  // Open -> Confirmed or Open -> Dismissed. Resubmitting the feedback that
  // closed an alert is a no-op; any other feedback on a closed alert throws
  // ServiceError Conflict.
  Alert record_feedback(const StaffFeedback& feedback);

  // Agents must be known before control messages can target them. A camera
  // also becomes known when its first event arrives.
  void register_agent(const std::string& camera_id, const std::string& zone_id,
                      std::optional<std::string> control_endpoint = std::nullopt);
  // Attaches an in-process link; not persisted.
  void attach_agent_link(const std::string& camera_id, std::shared_ptr<AgentControlLink> link);

  // Issues a new control version for the camera. The message is pushed to a
  // live link when one is attached; otherwise it waits for the agent to poll.
  ControlReceipt set_threshold(const std::string& camera_id, double threshold);
  ControlReceipt push_model(const std::string& camera_id, const Json& model);
  // Latest control message not yet acknowledged by the agent.
  std::optional<ControlMessage> pending_control(const std::string& camera_id) const;
  void acknowledge(const ControlAck& ack);
  std::optional<ControlReceipt> control_state(const std::string& camera_id) const;

  std::vector<FeedEntry> alerts_since(std::uint64_t cursor) const;
  // Blocks until an alert newer than cursor exists, the timeout passes or the
  // service stops waiters.
  std::vector<FeedEntry> wait_for_alerts(std::uint64_t cursor, std::chrono::milliseconds timeout) const;
  void stop_waiters();
  std::uint64_t feed_head() const;

  // Live console connections are counted while a Subscription is held.
  class Subscription {
   public:
    explicit Subscription(const CloudService& service);
    ~Subscription();
    Subscription(const Subscription&) = delete;
    Subscription& operator=(const Subscription&) = delete;

   private:
    const CloudService& service_;
  };
  std::size_t live_subscribers() const;

  std::optional<Alert> alert(const std::string& alert_id) const;
  ZoneStatus zone_status(const std::string& zone_id) const;
  // Distinct events in arrival order.
  std::vector<SuspicionEvent> received_events() const;

  void write_snapshot() const;
  const CloudOptions& options() const { return options_; }

 private:
  struct AlertState {
    Alert alert;
    std::optional<StaffFeedback> feedback;
  };
  struct CameraState {
    std::string zone_id;
    std::optional<std::string> control_endpoint;
    std::shared_ptr<AgentControlLink> link;
    std::uint64_t version = 0;
    std::uint64_t applied_version = 0;
    std::optional<ControlMessage> latest;
    std::optional<std::string> rejected_reason;
  };
  struct ZoneCounters {
    std::uint64_t events = 0;
    std::uint64_t uncorroborated = 0;
    std::uint64_t false_positives = 0;
  };

  std::mutex& zone_mutex(const std::string& zone_id);
  // Decides an event whose id is already reserved; caller holds the zone lock.
  SuspicionResult decide(const SuspicionEvent& event, bool from_parking);
  ControlReceipt send_control(const std::string& camera_id, std::optional<double> threshold,
                              std::optional<Json> model);

  // Appends a record and applies it; caller holds state_mutex_ exclusively.
  void commit(const Json& record);
  void apply(const Json& record);
  Json state_json() const;
  void load_state(const Json& snapshot);

  const InventoryPort& inventory_;
  CloudOptions options_;

  mutable std::shared_mutex state_mutex_;
  std::uint64_t records_applied_ = 0;
  std::set<std::string, std::less<>> seen_events_;
  std::vector<SuspicionEvent> events_;
  std::vector<SuspicionEvent> parked_;
  std::vector<AlertState> alerts_;
  std::map<std::string, std::size_t, std::less<>> alert_index_;
  std::map<std::pair<std::string, std::string>, TimestampMs> last_alert_at_;
  std::map<std::string, ZoneCounters, std::less<>> zones_;
  std::map<std::string, CameraState, std::less<>> cameras_;

  std::mutex zone_locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>, std::less<>> zone_locks_;

  mutable std::mutex feed_mutex_;
  mutable std::condition_variable feed_cv_;
  std::uint64_t feed_head_ = 0;
  bool waiters_stopped_ = false;
  mutable std::size_t subscribers_ = 0;

  std::unique_ptr<NdjsonLog> log_;
};

// Re-checks a decision log: every alert is backed by a suspicion event and a
// recorded deficit for its product, every recorded deficit under a suspicion
// event produced an alert unless one for the same zone and product was inside
// the dedup window, alert ids are unique, and feedback follows
// Open -> {Confirmed, Dismissed}. Returns one message per violation.
std::vector<std::string> audit_decision_log(const std::vector<Json>& records, TimestampMs dedup_window_ms);
std::vector<Json> read_ndjson_file(const std::filesystem::path& path);

}  // namespace shoplift
