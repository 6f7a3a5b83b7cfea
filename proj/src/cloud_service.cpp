#include "shoplift/cloud_service.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "shoplift/codec.hpp"

namespace shoplift {

namespace {

bool within_window(TimestampMs a, TimestampMs b, TimestampMs window) { return std::llabs(a - b) < window; }

std::optional<EventOutcome> parse_outcome(std::string_view text) {
  for (auto o : {EventOutcome::Alerted, EventOutcome::Suppressed, EventOutcome::Uncorroborated, EventOutcome::Parked,
                 EventOutcome::Duplicate}) {
    if (to_string(o) == text) {
      return o;
    }
  }
  return std::nullopt;
}

Json strings_json(const std::vector<std::string>& items) { return Json(items); }

}  // namespace

std::string_view to_string(EventOutcome outcome) {
  switch (outcome) {
    case EventOutcome::Alerted:
      return "Alerted";
    case EventOutcome::Suppressed:
      return "Suppressed";
    case EventOutcome::Uncorroborated:
      return "Uncorroborated";
    case EventOutcome::Parked:
      return "Parked";
    case EventOutcome::Duplicate:
      return "Duplicate";
  }
  return "?";
}

std::string_view to_string(ControlStatus status) {
  switch (status) {
    case ControlStatus::Applied:
      return "applied";
    case ControlStatus::Pending:
      return "pending";
    case ControlStatus::Rejected:
      return "rejected";
  }
  return "?";
}

Json to_json(const FeedEntry& entry) { return {{"seq", entry.seq}, {"alert", to_json(entry.alert)}}; }

Json to_json(const ControlReceipt& receipt) {
  Json j = {{"camera_id", receipt.camera_id},
            {"version", receipt.version},
            {"status", std::string(to_string(receipt.status))}};
  j["reason"] = receipt.reason ? Json(*receipt.reason) : Json(nullptr);
  return j;
}

Json to_json(const ZoneStatus& status) {
  return {{"zone_id", status.zone_id},
          {"products", status.products},
          {"events", status.events},
          {"uncorroborated", status.uncorroborated},
          {"open_alerts", status.open_alerts},
          {"confirmed", status.confirmed},
          {"false_positives", status.false_positives}};
}

CloudService::CloudService(const InventoryPort& inventory, CloudOptions options)
    : inventory_(inventory), options_(std::move(options)) {
  if (options_.dedup_window_ms < 0) {
    throw ConfigError("dedup window must be >= 0");
  }
  std::unique_lock lock(state_mutex_);
  if (options_.snapshot_path && std::filesystem::exists(*options_.snapshot_path)) {
    load_state(read_ndjson_file(*options_.snapshot_path).at(0));
  }
  if (options_.log_path) {
    log_ = std::make_unique<NdjsonLog>(*options_.log_path);
    const auto& records = log_->recovered();
    if (records.size() < records_applied_) {
      throw Error("snapshot covers " + std::to_string(records_applied_) + " records but the log holds " +
                  std::to_string(records.size()));
    }
    for (std::size_t i = records_applied_; i < records.size(); ++i) {
      apply(records[i]);
    }
    log_->release_recovered();
  }
}

CloudService::~CloudService() { stop_waiters(); }

std::mutex& CloudService::zone_mutex(const std::string& zone_id) {
  std::lock_guard lock(zone_locks_mutex_);
  auto& slot = zone_locks_[zone_id];
  if (!slot) {
    slot = std::make_unique<std::mutex>();
  }
  return *slot;
}

void CloudService::commit(const Json& record) {
  if (log_) {
    log_->append(record);
  }
  apply(record);
}

void CloudService::apply(const Json& record) {
  FieldReader r(record);
  const std::string type = r.string("type");
  if (type == "event" || type == "parked") {
    const SuspicionEvent event = decode<SuspicionEvent>(r.at("event"), "event");
    auto cam = cameras_.try_emplace(event.camera_id).first;
    if (cam->second.zone_id.empty()) {
      cam->second.zone_id = event.zone_id;
    }
    if (type == "parked") {
      seen_events_.insert(event.event_id);
      parked_.push_back(event);
    } else {
      std::erase_if(parked_, [&](const SuspicionEvent& p) { return p.event_id == event.event_id; });
      seen_events_.insert(event.event_id);
      events_.push_back(event);
      ZoneCounters& zone = zones_[event.zone_id];
      ++zone.events;
      if (r.string("outcome") == to_string(EventOutcome::Uncorroborated)) {
        ++zone.uncorroborated;
      }
      const Json& created = r.array("alerts");
      for (std::size_t i = 0; i < created.size(); ++i) {
        Alert alert = decode<Alert>(created[i], "alerts[" + std::to_string(i) + "]");
        alert_index_[alert.alert_id] = alerts_.size();
        last_alert_at_[{alert.event.zone_id, alert.product_id}] = alert.created_at;
        alerts_.push_back({std::move(alert), std::nullopt});
      }
      if (!created.empty()) {
        std::lock_guard feed(feed_mutex_);
        feed_head_ = alerts_.size();
        feed_cv_.notify_all();
      }
    }
  } else if (type == "feedback") {
    const StaffFeedback fb = decode<StaffFeedback>(r.at("feedback"), "feedback");
    AlertState& state = alerts_.at(alert_index_.at(fb.alert_id));
    state.alert.status = fb.verdict == Verdict::Confirmed ? AlertStatus::Confirmed : AlertStatus::Dismissed;
    state.feedback = fb;
    if (fb.verdict == Verdict::Dismissed) {
      ++zones_[state.alert.event.zone_id].false_positives;
    }
  } else if (type == "agent") {
    CameraState& cam = cameras_[r.non_empty_string("camera_id")];
    cam.zone_id = r.string("zone_id");
    cam.control_endpoint = r.optional_string("control_endpoint");
    if (cam.control_endpoint && options_.link_factory) {
      cam.link = options_.link_factory(*cam.control_endpoint);
    }
  } else if (type == "control") {
    ControlMessage message = control_message_from_json(r.at("message"));
    CameraState& cam = cameras_[message.camera_id];
    cam.version = message.version;
    cam.rejected_reason.reset();
    cam.latest = std::move(message);
  } else if (type == "ack") {
    const ControlAck ack = control_ack_from_json(r.at("ack"));
    CameraState& cam = cameras_[ack.camera_id];
    if (ack.accepted) {
      cam.applied_version = std::max(cam.applied_version, ack.version);
    } else if (ack.version == cam.version) {
      cam.rejected_reason = ack.reason.value_or("rejected");
    }
  } else {
    throw DecodeError("type", "unknown record type '" + type + "'");
  }
  ++records_applied_;
}

SuspicionResult CloudService::on_suspicion(const SuspicionEvent& event) {
  if (event.event_id.empty() || !(event.anomaly_score >= 0.0)) {
    throw ServiceError(ServiceError::Code::Validation, "event needs an id and a non-negative score");
  }
  std::lock_guard zone_lock(zone_mutex(event.zone_id));
  {
    std::shared_lock read(state_mutex_);
    if (seen_events_.contains(event.event_id)) {
      return {EventOutcome::Duplicate, {}};
    }
  }
  return decide(event, false);
}

SuspicionResult CloudService::decide(const SuspicionEvent& event, bool from_parking) {
  std::vector<ReconciliationResult> reconciliations;
  std::vector<std::string> stale;
  try {
    for (const std::string& product : inventory_.products_in_zone(event.zone_id)) {
      try {
        reconciliations.push_back(inventory_.reconcile(product, event.timestamp));
      } catch (const InventoryError& e) {
        if (e.code() == InventoryError::Code::Unavailable) {
          throw;
        }
        stale.push_back(product);
      }
    }
  } catch (const InventoryError& e) {
    if (e.code() != InventoryError::Code::Unavailable) {
      throw;
    }
    if (!from_parking) {
      std::unique_lock write(state_mutex_);
      commit({{"type", "parked"}, {"event", to_json(event)}, {"reason", e.what()}});
    }
    return {EventOutcome::Parked, {}};
  }

  std::unique_lock write(state_mutex_);
  SuspicionResult result;
  std::vector<std::string> suppressed;
  bool any_mismatch = false;
  for (const ReconciliationResult& rec : reconciliations) {
    if (!rec.mismatch) {
      continue;
    }
    any_mismatch = true;
    auto last = last_alert_at_.find({event.zone_id, rec.product_id});
    if (last != last_alert_at_.end() && within_window(event.timestamp, last->second, options_.dedup_window_ms)) {
      suppressed.push_back(rec.product_id);
      continue;
    }
    Alert alert;
    alert.alert_id = "A-" + std::to_string(alerts_.size() + result.alerts.size() + 1);
    alert.event = event;
    alert.product_id = rec.product_id;
    alert.expected_count = rec.expected_count;
    alert.observed_count = rec.observed_count;
    alert.deficit = rec.deficit;
    alert.created_at = event.timestamp;
    alert.status = AlertStatus::Open;
    result.alerts.push_back(std::move(alert));
  }
  result.outcome = !result.alerts.empty() ? EventOutcome::Alerted
                   : any_mismatch         ? EventOutcome::Suppressed
                                          : EventOutcome::Uncorroborated;
  Json recs = Json::array();
  for (const auto& rec : reconciliations) {
    recs.push_back(to_json(rec));
  }
  Json alerts = Json::array();
  for (const auto& a : result.alerts) {
    alerts.push_back(to_json(a));
  }
  commit({{"type", "event"},
          {"event", to_json(event)},
          {"outcome", std::string(to_string(result.outcome))},
          {"reconciliations", std::move(recs)},
          {"stale", strings_json(stale)},
          {"suppressed", strings_json(suppressed)},
          {"alerts", std::move(alerts)}});
  return result;
}

std::size_t CloudService::retry_parked() {
  std::vector<SuspicionEvent> parked;
  {
    std::shared_lock read(state_mutex_);
    parked = parked_;
  }
  std::size_t decided = 0;
  for (const SuspicionEvent& event : parked) {
    std::lock_guard zone_lock(zone_mutex(event.zone_id));
    {
      std::shared_lock read(state_mutex_);
      if (std::none_of(parked_.begin(), parked_.end(),
                       [&](const SuspicionEvent& p) { return p.event_id == event.event_id; })) {
        continue;
      }
    }
    if (decide(event, true).outcome == EventOutcome::Parked) {
      break;
    }
    ++decided;
  }
  return decided;
}

std::size_t CloudService::parked_count() const {
  std::shared_lock read(state_mutex_);
  return parked_.size();
}

Alert CloudService::record_feedback(const StaffFeedback& feedback) {
  std::unique_lock write(state_mutex_);
  auto it = alert_index_.find(feedback.alert_id);
  if (it == alert_index_.end()) {
    throw ServiceError(ServiceError::Code::UnknownAlert, "unknown alert " + feedback.alert_id);
  }
  const AlertState& state = alerts_[it->second];
  if (state.alert.status != AlertStatus::Open) {
    if (state.feedback == feedback) {
      return state.alert;
    }
    throw ServiceError(ServiceError::Code::Conflict, "alert " + feedback.alert_id + " is already " +
                                                         std::string(to_string(state.alert.status)));
  }
  commit({{"type", "feedback"}, {"feedback", to_json(feedback)}});
  return alerts_[it->second].alert;
}

void CloudService::register_agent(const std::string& camera_id, const std::string& zone_id,
                                  std::optional<std::string> control_endpoint) {
  if (camera_id.empty()) {
    throw ServiceError(ServiceError::Code::Validation, "camera_id must not be empty");
  }
  std::unique_lock write(state_mutex_);
  Json record = {{"type", "agent"}, {"camera_id", camera_id}, {"zone_id", zone_id}};
  record["control_endpoint"] = control_endpoint ? Json(*control_endpoint) : Json(nullptr);
  commit(record);
}

void CloudService::attach_agent_link(const std::string& camera_id, std::shared_ptr<AgentControlLink> link) {
  std::unique_lock write(state_mutex_);
  auto it = cameras_.find(camera_id);
  if (it == cameras_.end()) {
    throw ServiceError(ServiceError::Code::UnknownCamera, "unknown camera " + camera_id);
  }
  it->second.link = std::move(link);
}

ControlReceipt CloudService::set_threshold(const std::string& camera_id, double threshold) {
  if (!std::isfinite(threshold) || !(threshold > 0.0)) {
    throw ServiceError(ServiceError::Code::Validation, "threshold must be a finite number > 0");
  }
  return send_control(camera_id, threshold, std::nullopt);
}

ControlReceipt CloudService::push_model(const std::string& camera_id, const Json& model) {
  return send_control(camera_id, std::nullopt, model);
}

ControlReceipt CloudService::send_control(const std::string& camera_id, std::optional<double> threshold,
                                          std::optional<Json> model) {
  ControlMessage message;
  std::shared_ptr<AgentControlLink> link;
  {
    std::unique_lock write(state_mutex_);
    auto it = cameras_.find(camera_id);
    if (it == cameras_.end()) {
      throw ServiceError(ServiceError::Code::UnknownCamera, "unknown camera " + camera_id);
    }
    message.camera_id = camera_id;
    message.version = it->second.version + 1;
    message.threshold = threshold;
    message.model = std::move(model);
    // The shared token is not written to the log; it is added on delivery.
    commit({{"type", "control"}, {"message", to_json(message)}});
    link = it->second.link;
  }
  message.token = options_.control_token;
  ControlReceipt receipt{camera_id, message.version, ControlStatus::Pending, std::nullopt};
  if (link) {
    if (auto ack = link->push(message)) {
      acknowledge(*ack);
      receipt.status = ack->accepted ? ControlStatus::Applied : ControlStatus::Rejected;
      receipt.reason = ack->reason;
    }
  }
  return receipt;
}

std::optional<ControlMessage> CloudService::pending_control(const std::string& camera_id) const {
  std::shared_lock read(state_mutex_);
  auto it = cameras_.find(camera_id);
  if (it == cameras_.end()) {
    throw ServiceError(ServiceError::Code::UnknownCamera, "unknown camera " + camera_id);
  }
  const CameraState& cam = it->second;
  if (!cam.latest || cam.applied_version >= cam.latest->version || cam.rejected_reason) {
    return std::nullopt;
  }
  ControlMessage message = *cam.latest;
  message.token = options_.control_token;
  return message;
}

void CloudService::acknowledge(const ControlAck& ack) {
  std::unique_lock write(state_mutex_);
  auto it = cameras_.find(ack.camera_id);
  if (it == cameras_.end()) {
    throw ServiceError(ServiceError::Code::UnknownCamera, "unknown camera " + ack.camera_id);
  }
  if (ack.version > it->second.version) {
    throw ServiceError(ServiceError::Code::Validation, "ack for a version that was never issued");
  }
  if (ack.accepted && ack.version <= it->second.applied_version) {
    return;
  }
  commit({{"type", "ack"}, {"ack", to_json(ack)}});
}

std::optional<ControlReceipt> CloudService::control_state(const std::string& camera_id) const {
  std::shared_lock read(state_mutex_);
  auto it = cameras_.find(camera_id);
  if (it == cameras_.end() || !it->second.latest) {
    return std::nullopt;
  }
  const CameraState& cam = it->second;
  ControlReceipt receipt{camera_id, cam.version, ControlStatus::Pending, cam.rejected_reason};
  if (cam.rejected_reason) {
    receipt.status = ControlStatus::Rejected;
  } else if (cam.applied_version >= cam.version) {
    receipt.status = ControlStatus::Applied;
  }
  return receipt;
}

std::vector<FeedEntry> CloudService::alerts_since(std::uint64_t cursor) const {
  std::shared_lock read(state_mutex_);
  std::vector<FeedEntry> out;
  for (std::size_t i = cursor; i < alerts_.size(); ++i) {
    out.push_back({i + 1, alerts_[i].alert});
  }
  return out;
}

std::vector<FeedEntry> CloudService::wait_for_alerts(std::uint64_t cursor, std::chrono::milliseconds timeout) const {
  {
    std::unique_lock lock(feed_mutex_);
    feed_cv_.wait_for(lock, timeout, [&] { return feed_head_ > cursor || waiters_stopped_; });
  }
  return alerts_since(cursor);
}

void CloudService::stop_waiters() {
  std::lock_guard lock(feed_mutex_);
  waiters_stopped_ = true;
  feed_cv_.notify_all();
}

std::uint64_t CloudService::feed_head() const {
  std::lock_guard lock(feed_mutex_);
  return feed_head_;
}

CloudService::Subscription::Subscription(const CloudService& service) : service_(service) {
  std::lock_guard lock(service_.feed_mutex_);
  ++service_.subscribers_;
}

CloudService::Subscription::~Subscription() {
  std::lock_guard lock(service_.feed_mutex_);
  --service_.subscribers_;
}

std::size_t CloudService::live_subscribers() const {
  std::lock_guard lock(feed_mutex_);
  return subscribers_;
}

std::optional<Alert> CloudService::alert(const std::string& alert_id) const {
  std::shared_lock read(state_mutex_);
  auto it = alert_index_.find(alert_id);
  if (it == alert_index_.end()) {
    return std::nullopt;
  }
  return alerts_[it->second].alert;
}

ZoneStatus CloudService::zone_status(const std::string& zone_id) const {
  ZoneStatus status;
  status.zone_id = zone_id;
  status.products = inventory_.products_in_zone(zone_id);
  std::shared_lock read(state_mutex_);
  if (auto it = zones_.find(zone_id); it != zones_.end()) {
    status.events = it->second.events;
    status.uncorroborated = it->second.uncorroborated;
    status.false_positives = it->second.false_positives;
  }
  for (const AlertState& a : alerts_) {
    if (a.alert.event.zone_id != zone_id) {
      continue;
    }
    status.open_alerts += a.alert.status == AlertStatus::Open;
    status.confirmed += a.alert.status == AlertStatus::Confirmed;
  }
  return status;
}

std::vector<SuspicionEvent> CloudService::received_events() const {
  std::shared_lock read(state_mutex_);
  std::vector<SuspicionEvent> out = events_;
  out.insert(out.end(), parked_.begin(), parked_.end());
  return out;
}

// --- snapshot -------------------------------------------------------------

Json CloudService::state_json() const {
  Json events = Json::array();
  for (const auto& e : events_) {
    events.push_back(to_json(e));
  }
  Json parked = Json::array();
  for (const auto& e : parked_) {
    parked.push_back(to_json(e));
  }
  Json alerts = Json::array();
  for (const auto& a : alerts_) {
    Json entry = {{"alert", to_json(a.alert)}};
    entry["feedback"] = a.feedback ? to_json(*a.feedback) : Json(nullptr);
    alerts.push_back(std::move(entry));
  }
  Json last = Json::array();
  for (const auto& [key, at] : last_alert_at_) {
    last.push_back({{"zone_id", key.first}, {"product_id", key.second}, {"at", at}});
  }
  Json zones = Json::object();
  for (const auto& [id, z] : zones_) {
    zones[id] = {{"events", z.events}, {"uncorroborated", z.uncorroborated}, {"false_positives", z.false_positives}};
  }
  Json cameras = Json::object();
  for (const auto& [id, c] : cameras_) {
    Json cam = {{"zone_id", c.zone_id}, {"version", c.version}, {"applied_version", c.applied_version}};
    cam["control_endpoint"] = c.control_endpoint ? Json(*c.control_endpoint) : Json(nullptr);
    cam["latest"] = c.latest ? to_json(*c.latest) : Json(nullptr);
    cam["rejected_reason"] = c.rejected_reason ? Json(*c.rejected_reason) : Json(nullptr);
    cameras[id] = std::move(cam);
  }
  return {{"records", records_applied_}, {"events", std::move(events)}, {"parked", std::move(parked)},
          {"alerts", std::move(alerts)},  {"last_alert_at", std::move(last)}, {"zones", std::move(zones)},
          {"cameras", std::move(cameras)}};
}

void CloudService::load_state(const Json& snapshot) {
  FieldReader r(snapshot, "snapshot");
  records_applied_ = r.unsigned_integer("records");
  for (const Json& e : r.array("events")) {
    events_.push_back(decode<SuspicionEvent>(e, "snapshot.events"));
    seen_events_.insert(events_.back().event_id);
  }
  for (const Json& e : r.array("parked")) {
    parked_.push_back(decode<SuspicionEvent>(e, "snapshot.parked"));
    seen_events_.insert(parked_.back().event_id);
  }
  for (const Json& a : r.array("alerts")) {
    FieldReader ar(a, "snapshot.alerts");
    AlertState state{decode<Alert>(ar.at("alert"), ar.path("alert")), std::nullopt};
    if (ar.has("feedback")) {
      state.feedback = decode<StaffFeedback>(ar.at("feedback"), ar.path("feedback"));
    }
    alert_index_[state.alert.alert_id] = alerts_.size();
    alerts_.push_back(std::move(state));
  }
  for (const Json& l : r.array("last_alert_at")) {
    FieldReader lr(l, "snapshot.last_alert_at");
    last_alert_at_[{lr.string("zone_id"), lr.string("product_id")}] = lr.integer("at");
  }
  for (const auto& [id, z] : r.at("zones").items()) {
    FieldReader zr(z, "snapshot.zones." + id);
    zones_[id] = {zr.unsigned_integer("events"), zr.unsigned_integer("uncorroborated"),
                  zr.unsigned_integer("false_positives")};
  }
  for (const auto& [id, c] : r.at("cameras").items()) {
    FieldReader cr(c, "snapshot.cameras." + id);
    CameraState& cam = cameras_[id];
    cam.zone_id = cr.string("zone_id");
    cam.version = cr.unsigned_integer("version");
    cam.applied_version = cr.unsigned_integer("applied_version");
    cam.control_endpoint = cr.optional_string("control_endpoint");
    if (cr.has("latest")) {
      cam.latest = control_message_from_json(cr.at("latest"));
    }
    cam.rejected_reason = cr.optional_string("rejected_reason");
    if (cam.control_endpoint && options_.link_factory) {
      cam.link = options_.link_factory(*cam.control_endpoint);
    }
  }
  std::lock_guard feed(feed_mutex_);
  feed_head_ = alerts_.size();
}

void CloudService::write_snapshot() const {
  if (!options_.snapshot_path) {
    return;
  }
  std::shared_lock read(state_mutex_);
  std::filesystem::path tmp = *options_.snapshot_path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << state_json().dump() << '\n';
    if (!out.flush()) {
      throw Error("cannot write snapshot " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, *options_.snapshot_path);
}

// --- audit ----------------------------------------------------------------

std::vector<Json> read_ndjson_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot read " + path.string());
  }
  std::vector<Json> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      records.push_back(parse_json(line));
    }
  }
  return records;
}

std::vector<std::string> audit_decision_log(const std::vector<Json>& records, TimestampMs dedup_window_ms) {
  std::vector<std::string> violations;
  std::set<std::string> decided;
  std::map<std::string, AlertStatus> status;
  std::map<std::pair<std::string, std::string>, TimestampMs> last_alert_at;
  auto fail = [&](std::size_t i, const std::string& what) {
    violations.push_back("record " + std::to_string(i + 1) + ": " + what);
  };

  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      FieldReader r(records[i]);
      const std::string type = r.string("type");
      if (type == "event") {
        const SuspicionEvent event = decode<SuspicionEvent>(r.at("event"), "event");
        if (!decided.insert(event.event_id).second) {
          fail(i, "event " + event.event_id + " decided twice");
        }
        std::map<std::string, ReconciliationResult> deficits;
        for (const Json& rec : r.array("reconciliations")) {
          ReconciliationResult result = decode<ReconciliationResult>(rec, "reconciliations");
          if (result.mismatch) {
            deficits.emplace(result.product_id, result);
          }
        }
        std::set<std::string> suppressed;
        for (const Json& p : r.array("suppressed")) {
          suppressed.insert(p.get<std::string>());
        }
        std::set<std::string> alerted;
        const Json& alerts = r.array("alerts");
        for (const Json& a : alerts) {
          const Alert alert = decode<Alert>(a, "alerts");
          if (alert.event != event) {
            fail(i, "alert " + alert.alert_id + " carries a different event");
          }
          auto d = deficits.find(alert.product_id);
          if (d == deficits.end()) {
            fail(i, "alert " + alert.alert_id + " has no recorded deficit for " + alert.product_id);
          } else if (d->second.deficit != alert.deficit || d->second.expected_count != alert.expected_count ||
                     d->second.observed_count != alert.observed_count) {
            fail(i, "alert " + alert.alert_id + " disagrees with its reconciliation");
          }
          if (alert.status != AlertStatus::Open) {
            fail(i, "alert " + alert.alert_id + " was not created Open");
          }
          if (!status.emplace(alert.alert_id, AlertStatus::Open).second) {
            fail(i, "alert id " + alert.alert_id + " reused");
          }
          auto last = last_alert_at.find({event.zone_id, alert.product_id});
          if (last != last_alert_at.end() && within_window(event.timestamp, last->second, dedup_window_ms)) {
            fail(i, "alert " + alert.alert_id + " inside the dedup window of an earlier alert");
          }
          alerted.insert(alert.product_id);
        }
        for (const auto& [product, rec] : deficits) {
          if (alerted.contains(product)) {
            continue;
          }
          auto last = last_alert_at.find({event.zone_id, product});
          const bool in_window =
              last != last_alert_at.end() && within_window(event.timestamp, last->second, dedup_window_ms);
          if (!suppressed.contains(product) || !in_window) {
            fail(i, "deficit for " + product + " under event " + event.event_id + " raised no alert");
          }
        }
        for (const std::string& product : alerted) {
          last_alert_at[{event.zone_id, product}] = event.timestamp;
        }
        const auto outcome = parse_outcome(r.string("outcome"));
        const EventOutcome expected = !alerts.empty()     ? EventOutcome::Alerted
                                      : !deficits.empty() ? EventOutcome::Suppressed
                                                          : EventOutcome::Uncorroborated;
        if (outcome != expected) {
          fail(i, "event " + event.event_id + " has outcome " + r.string("outcome"));
        }
      } else if (type == "feedback") {
        const StaffFeedback fb = decode<StaffFeedback>(r.at("feedback"), "feedback");
        auto it = status.find(fb.alert_id);
        if (it == status.end()) {
          fail(i, "feedback for unknown alert " + fb.alert_id);
        } else if (it->second != AlertStatus::Open) {
          fail(i, "feedback on closed alert " + fb.alert_id);
        } else {
          it->second = fb.verdict == Verdict::Confirmed ? AlertStatus::Confirmed : AlertStatus::Dismissed;
        }
      }
    } catch (const Error& e) {
      fail(i, e.what());
    }
  }
  return violations;
}

}  // namespace shoplift
