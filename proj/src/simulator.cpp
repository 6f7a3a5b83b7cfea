#include "shoplift/simulator.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "shoplift/codec.hpp"
#include "shoplift/edge_agent.hpp"
#include "shoplift/features.hpp"
#include "shoplift/pose_templates.hpp"
#include "shoplift/rng.hpp"

namespace shoplift {

namespace {

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

std::optional<ActionType> parse_action_type(std::string_view text) {
  for (auto t : {ActionType::Browse, ActionType::Purchase, ActionType::Steal, ActionType::ActSuspicious}) {
    if (to_string(t) == text) {
      return t;
    }
  }
  return std::nullopt;
}

class DirectPublisher final : public EventPublisher {
 public:
  DirectPublisher(CloudService& cloud, RunReport& report) : cloud_(cloud), report_(report) {}

  PublishStatus publish(const SuspicionEvent& event) override {
    const auto start = Clock::now();
    const SuspicionResult result = cloud_.on_suspicion(event);
    report_.decision_latency.add(micros_since(start));
    switch (result.outcome) {
      case EventOutcome::Uncorroborated:
        ++report_.uncorroborated;
        break;
      case EventOutcome::Suppressed:
        ++report_.suppressed;
        break;
      default:
        break;
    }
    return PublishStatus::Delivered;
  }

 private:
  CloudService& cloud_;
  RunReport& report_;
};

class TempDir {
 public:
  explicit TempDir(const std::string& stem) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (stem + "-" + std::to_string(rd()) + "-" + std::to_string(Clock::now().time_since_epoch().count()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace

std::string_view to_string(ActionType type) {
  switch (type) {
    case ActionType::Browse:
      return "browse";
    case ActionType::Purchase:
      return "purchase";
    case ActionType::Steal:
      return "steal";
    case ActionType::ActSuspicious:
      return "act_suspicious";
  }
  return "?";
}

// --- scenario files --------------------------------------------------------

void Scenario::validate() const {
  auto fail = [&](const std::string& what) { throw ConfigError("scenario " + name + ": " + what); };
  if (name.empty()) {
    throw ConfigError("scenario needs a name");
  }
  if (duration_ticks <= 0 || tick_ms <= 0 || observation_every <= 0) {
    fail("duration_ticks, tick_ms and observation_every must be > 0");
  }
  if (!(sigma_px >= 0.0) || !(face_size_spread_px >= 0.0) || !(face_size_px > face_size_spread_px)) {
    fail("need sigma_px >= 0 and face_size_px > face_size_spread_px >= 0");
  }
  lof.validate();
  std::set<std::string> zone_ids;
  std::set<std::string> cameras;
  for (const ZoneSpec& z : zones) {
    if (z.zone_id.empty() || z.camera_id.empty() || !zone_ids.insert(z.zone_id).second ||
        !cameras.insert(z.camera_id).second) {
      fail("zones need unique, non-empty zone_id and camera_id");
    }
  }
  std::map<std::string, std::string> product_zone;
  for (const ProductRecord& p : products) {
    if (!zone_ids.contains(p.zone_id)) {
      fail("product " + p.product_id + " is in unknown zone " + p.zone_id);
    }
    if (!product_zone.emplace(p.product_id, p.zone_id).second) {
      fail("duplicate product " + p.product_id);
    }
  }
  std::set<std::string> customer_ids;
  for (const CustomerScript& c : customers) {
    if (!customer_ids.insert(c.customer_id).second || c.customer_id.empty()) {
      fail("customers need unique, non-empty ids");
    }
    if (!zone_ids.contains(c.zone_id)) {
      fail("customer " + c.customer_id + " is in unknown zone " + c.zone_id);
    }
    if (c.enter_tick < 0 || c.enter_tick >= c.leave_tick || c.leave_tick > duration_ticks) {
      fail("customer " + c.customer_id + " needs 0 <= enter_tick < leave_tick <= duration_ticks");
    }
    for (const CustomerAction& a : c.actions) {
      if (a.tick < c.enter_tick || a.tick >= c.leave_tick) {
        fail("customer " + c.customer_id + " acts at tick " + std::to_string(a.tick) + " while absent");
      }
      if (a.anomaly_frames < 0 || a.tick + a.anomaly_frames > c.leave_tick) {
        fail("customer " + c.customer_id + " has anomaly frames outside the visit");
      }
      if (a.type == ActionType::Purchase || a.type == ActionType::Steal) {
        auto it = product_zone.find(a.product_id);
        if (it == product_zone.end() || it->second != c.zone_id) {
          fail("customer " + c.customer_id + " handles product " + a.product_id + " outside zone " + c.zone_id);
        }
        if (a.quantity < 1) {
          fail("quantities must be >= 1");
        }
      }
    }
  }
}

Scenario scenario_from_json(const Json& j) {
  Scenario s;
  try {
    FieldReader r(j);
    s.name = r.non_empty_string("name");
    s.seed = r.unsigned_integer("seed");
    s.duration_ticks = r.integer("duration_ticks");
    if (r.has("tick_ms")) s.tick_ms = r.integer("tick_ms");
    if (r.has("start_ms")) s.start_ms = r.integer("start_ms");
    if (r.has("observation_every")) s.observation_every = r.integer("observation_every");
    if (r.has("sigma_px")) s.sigma_px = r.number("sigma_px");
    if (r.has("face_size_px")) s.face_size_px = r.number("face_size_px");
    if (r.has("face_size_spread_px")) s.face_size_spread_px = r.number("face_size_spread_px");
    if (r.has("staleness_ms")) s.staleness_ms = r.integer("staleness_ms");
    if (r.has("dedup_window_ms")) s.dedup_window_ms = r.integer("dedup_window_ms");
    if (r.has("lof")) {
      FieldReader l = r.object("lof");
      if (l.has("neighbor_count")) s.lof.neighbor_count = l.unsigned_integer("neighbor_count");
      if (l.has("threshold")) s.lof.threshold = l.number("threshold");
      if (l.has("window_capacity")) s.lof.window_capacity = l.unsigned_integer("window_capacity");
      if (l.has("warmup_min")) s.lof.warmup_min = l.unsigned_integer("warmup_min");
    }
    const Json& zones = r.array("zones");
    for (std::size_t i = 0; i < zones.size(); ++i) {
      FieldReader z(zones[i], "zones[" + std::to_string(i) + "]");
      s.zones.push_back({z.non_empty_string("zone_id"), z.non_empty_string("camera_id")});
    }
    const Json& products = r.array("products");
    for (std::size_t i = 0; i < products.size(); ++i) {
      s.products.push_back(decode<ProductRecord>(products[i], "products[" + std::to_string(i) + "]"));
    }
    const Json& customers = r.array("customers");
    for (std::size_t i = 0; i < customers.size(); ++i) {
      const std::string where = "customers[" + std::to_string(i) + "]";
      FieldReader c(customers[i], where);
      CustomerScript script;
      script.customer_id = c.non_empty_string("customer_id");
      script.zone_id = c.non_empty_string("zone_id");
      script.enter_tick = c.integer("enter_tick");
      script.leave_tick = c.integer("leave_tick");
      if (c.has("actions")) {
        const Json& actions = c.array("actions");
        for (std::size_t k = 0; k < actions.size(); ++k) {
          FieldReader a(actions[k], where + ".actions[" + std::to_string(k) + "]");
          CustomerAction action;
          action.tick = a.integer("tick");
          const std::string type = a.string("type");
          const auto parsed = parse_action_type(type);
          if (!parsed) {
            throw DecodeError(a.path("type"), "unknown action '" + type + "'");
          }
          action.type = *parsed;
          if (a.has("product_id")) action.product_id = a.string("product_id");
          if (a.has("quantity")) action.quantity = a.integer("quantity");
          if (a.has("anomaly_frames")) action.anomaly_frames = a.integer("anomaly_frames");
          script.actions.push_back(std::move(action));
        }
      }
      s.customers.push_back(std::move(script));
    }
  } catch (const DecodeError& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

Json to_json(const Scenario& s) {
  Json zones = Json::array();
  for (const auto& z : s.zones) {
    zones.push_back({{"zone_id", z.zone_id}, {"camera_id", z.camera_id}});
  }
  Json products = Json::array();
  for (const auto& p : s.products) {
    products.push_back(to_json(p));
  }
  Json customers = Json::array();
  for (const auto& c : s.customers) {
    Json actions = Json::array();
    for (const auto& a : c.actions) {
      actions.push_back({{"tick", a.tick},
                         {"type", std::string(to_string(a.type))},
                         {"product_id", a.product_id},
                         {"quantity", a.quantity},
                         {"anomaly_frames", a.anomaly_frames}});
    }
    customers.push_back({{"customer_id", c.customer_id},
                         {"zone_id", c.zone_id},
                         {"enter_tick", c.enter_tick},
                         {"leave_tick", c.leave_tick},
                         {"actions", std::move(actions)}});
  }
  return {{"name", s.name},
          {"seed", s.seed},
          {"duration_ticks", s.duration_ticks},
          {"tick_ms", s.tick_ms},
          {"start_ms", s.start_ms},
          {"observation_every", s.observation_every},
          {"sigma_px", s.sigma_px},
          {"face_size_px", s.face_size_px},
          {"face_size_spread_px", s.face_size_spread_px},
          {"staleness_ms", s.staleness_ms},
          {"dedup_window_ms", s.dedup_window_ms},
          {"lof",
           {{"neighbor_count", s.lof.neighbor_count},
            {"threshold", s.lof.threshold},
            {"window_capacity", s.lof.window_capacity},
            {"warmup_min", s.lof.warmup_min}}},
          {"zones", std::move(zones)},
          {"products", std::move(products)},
          {"customers", std::move(customers)}};
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read scenario " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return scenario_from_json(parse_json(buffer.str()));
  } catch (const DecodeError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// --- timeline --------------------------------------------------------------

Timeline build_timeline(const Scenario& scenario) {
  scenario.validate();
  Timeline timeline;
  const PoseTemplates templates = PoseTemplates::standard();
  const FaceTemplate anomaly = anomalous_template();

  std::map<std::string, std::string> camera_of;
  for (const ZoneSpec& z : scenario.zones) {
    camera_of[z.zone_id] = z.camera_id;
  }
  std::map<std::string, std::int64_t> shelf;
  for (const ProductRecord& p : scenario.products) {
    shelf[p.product_id] = p.expected_count;
  }

  struct Actor {
    const CustomerScript* script;
    Rng rng;
    std::set<std::int64_t> anomalous_ticks;
  };
  std::vector<Actor> actors;
  for (const CustomerScript& c : scenario.customers) {
    Actor actor{&c, make_rng(scenario.seed, "customer/" + c.customer_id), {}};
    for (const CustomerAction& a : c.actions) {
      for (std::int64_t t = a.tick; t < a.tick + a.anomaly_frames; ++t) {
        actor.anomalous_ticks.insert(t);
      }
    }
    actors.push_back(std::move(actor));
  }

  std::uniform_int_distribution<std::size_t> pose_dist(0, kPoseClassCount - 1);
  std::uniform_real_distribution<double> origin_dist(100.0, 400.0);
  std::uniform_real_distribution<double> size_dist(scenario.face_size_px - scenario.face_size_spread_px,
                                                   scenario.face_size_px + scenario.face_size_spread_px);

  for (std::int64_t tick = 0; tick < scenario.duration_ticks; ++tick) {
    const TimestampMs now = scenario.time_of(tick);
    std::vector<std::pair<std::string, std::int64_t>> shelf_changes;
    std::size_t sale_index = 0;
    for (const Actor& actor : actors) {
      for (const CustomerAction& a : actor.script->actions) {
        if (a.tick != tick) {
          continue;
        }
        if (a.type == ActionType::Purchase) {
          const std::string tx_id = scenario.name + "/" + actor.script->customer_id + "/" + std::to_string(tick) + "/" +
                                    std::to_string(sale_index++);
          timeline.items.push_back({tick, SaleTransaction{tx_id, a.product_id, a.quantity, now}});
          shelf_changes.emplace_back(a.product_id, a.quantity);
        } else if (a.type == ActionType::Steal) {
          shelf_changes.emplace_back(a.product_id, a.quantity);
          timeline.thefts.push_back({actor.script->customer_id, actor.script->zone_id, a.product_id, a.quantity, now});
        }
      }
    }
    for (const auto& [product, quantity] : shelf_changes) {
      if (shelf[product] < quantity) {
        throw ConfigError("scenario " + scenario.name + ": tick " + std::to_string(tick) + " takes more " + product +
                          " than the shelf holds");
      }
      shelf[product] -= quantity;
    }
    if (tick % scenario.observation_every == 0) {
      for (const ProductRecord& p : scenario.products) {
        timeline.items.push_back({tick, ShelfObservation{p.zone_id, p.product_id, shelf[p.product_id], now}});
      }
    }
    for (Actor& actor : actors) {
      const CustomerScript& c = *actor.script;
      if (tick < c.enter_tick || tick >= c.leave_tick) {
        continue;
      }
      const PoseLabel pose = kAllPoseLabels[pose_dist(actor.rng)];
      const bool anomalous = actor.anomalous_ticks.contains(tick);
      LandmarkFrame frame;
      frame.camera_id = camera_of.at(c.zone_id);
      frame.zone_id = c.zone_id;
      frame.timestamp = now;
      frame.face_origin = {origin_dist(actor.rng), origin_dist(actor.rng)};
      const double size = size_dist(actor.rng);
      frame.face_size = {size, size};
      frame.points = place_template(anomalous ? anomaly : templates[pose], frame.face_origin, frame.face_size,
                                    scenario.sigma_px, actor.rng);
      frame.frame_ref = frame.camera_id + "/" + std::to_string(tick) + "/" + c.customer_id;
      timeline.anomalous_frames += anomalous;
      timeline.items.push_back({tick, std::move(frame)});
    }
  }
  return timeline;
}

void write_timeline(const Scenario& scenario, const Timeline& timeline, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::ofstream> frames;
  for (const ZoneSpec& z : scenario.zones) {
    frames[z.camera_id].open(dir / ("frames-" + z.camera_id + ".ndjson"), std::ios::binary | std::ios::trunc);
  }
  std::ofstream sales(dir / "sales.ndjson", std::ios::binary | std::ios::trunc);
  std::ofstream observations(dir / "observations.ndjson", std::ios::binary | std::ios::trunc);
  for (const TimelineItem& item : timeline.items) {
    if (const auto* tx = std::get_if<SaleTransaction>(&item.what)) {
      sales << serialize(*tx) << '\n';
    } else if (const auto* obs = std::get_if<ShelfObservation>(&item.what)) {
      observations << serialize(*obs) << '\n';
    } else {
      const auto& frame = std::get<LandmarkFrame>(item.what);
      frames.at(frame.camera_id) << serialize(frame) << '\n';
    }
  }
  Json catalog = Json::array();
  for (const ProductRecord& p : scenario.products) {
    catalog.push_back(to_json(p));
  }
  std::ofstream(dir / "catalog.json", std::ios::binary | std::ios::trunc) << catalog.dump(2) << '\n';
}

// --- scoring ---------------------------------------------------------------

void StageLatency::add(double us) {
  ++samples;
  mean_us += (us - mean_us) / static_cast<double>(samples);
  max_us = std::max(max_us, us);
}

void score_alerts(RunReport& report, const std::vector<Theft>& thefts, TimestampMs window_ms) {
  std::vector<bool> matched(thefts.size(), false);
  report.scripted_thefts = thefts.size();
  report.true_positives = 0;
  report.false_positives = 0;
  for (const Alert& alert : report.alerts) {
    bool hit = false;
    for (std::size_t i = 0; i < thefts.size() && !hit; ++i) {
      const Theft& t = thefts[i];
      if (!matched[i] && t.zone_id == alert.event.zone_id && t.product_id == alert.product_id &&
          t.at <= alert.created_at && alert.created_at - t.at <= window_ms) {
        matched[i] = true;
        hit = true;
      }
    }
    hit ? ++report.true_positives : ++report.false_positives;
  }
  report.misses = report.scripted_thefts - report.true_positives;
  const auto alerts = report.true_positives + report.false_positives;
  report.precision = alerts == 0 ? 1.0 : static_cast<double>(report.true_positives) / static_cast<double>(alerts);
  report.recall = report.scripted_thefts == 0
                      ? 1.0
                      : static_cast<double>(report.true_positives) / static_cast<double>(report.scripted_thefts);
}

bool thefts_match_inventory_log(const std::vector<InventoryLogEntry>& log, const std::vector<Theft>& thefts) {
  struct Seen {
    TimestampMs at;
    std::int64_t deficit;
  };
  std::map<std::string, Seen> last;
  std::vector<bool> covered(thefts.size(), false);
  for (const InventoryLogEntry& entry : log) {
    const auto* obs = std::get_if<ShelfObservation>(&entry.change);
    if (!obs) {
      continue;
    }
    const std::int64_t deficit = entry.expected_count - obs->observed_count;
    auto prev = last.find(obs->product_id);
    const TimestampMs since = prev == last.end() ? std::numeric_limits<TimestampMs>::min() : prev->second.at;
    const std::int64_t before = prev == last.end() ? 0 : prev->second.deficit;
    std::int64_t stolen = 0;
    for (std::size_t i = 0; i < thefts.size(); ++i) {
      if (thefts[i].product_id == obs->product_id && thefts[i].at > since && thefts[i].at <= obs->timestamp) {
        stolen += thefts[i].quantity;
        covered[i] = true;
      }
    }
    if (deficit - before != stolen) {
      return false;
    }
    last[obs->product_id] = {obs->timestamp, deficit};
  }
  return std::all_of(covered.begin(), covered.end(), [](bool b) { return b; });
}

// --- in-process run --------------------------------------------------------

RunReport run_scenario(const Scenario& scenario, const RunOptions& options) {
  RunReport report;
  report.scenario = scenario.name;
  report.seed = scenario.seed;
  std::optional<TempDir> temp;
  std::filesystem::path dir;
  if (options.work_dir) {
    dir = *options.work_dir;
    std::filesystem::create_directories(dir);
  } else {
    temp.emplace("shoplift-run");
    dir = temp->path();
  }
  const auto decision_log = dir / "decisions.ndjson";
  const auto inventory_log = dir / "inventory.ndjson";
  std::filesystem::remove(decision_log);
  std::filesystem::remove(inventory_log);

  try {
    const Timeline timeline = build_timeline(scenario);
    Inventory inventory(scenario.products, {scenario.staleness_ms, inventory_log});
    CloudOptions cloud_options;
    cloud_options.dedup_window_ms = scenario.dedup_window_ms;
    cloud_options.log_path = decision_log;
    CloudService cloud(inventory, cloud_options);
    auto publisher = std::make_shared<DirectPublisher>(cloud, report);

    std::map<std::string, std::unique_ptr<EdgeAgent>> agents;
    for (const ZoneSpec& z : scenario.zones) {
      AgentConfig config;
      config.camera_id = z.camera_id;
      config.zone_id = z.zone_id;
      config.cloud_endpoint = "in-process";
      config.lof = scenario.lof;
      auto agent = std::make_unique<EdgeAgent>(config, publisher);
      cloud.register_agent(z.camera_id, z.zone_id);
      cloud.attach_agent_link(z.camera_id, std::make_shared<LocalControlLink>(*agent));
      agents.emplace(z.camera_id, std::move(agent));
    }

    for (const TimelineItem& item : timeline.items) {
      if (const auto* tx = std::get_if<SaleTransaction>(&item.what)) {
        inventory.apply_sale(*tx);
      } else if (const auto* obs = std::get_if<ShelfObservation>(&item.what)) {
        inventory.record_observation(*obs);
      } else {
        const auto& frame = std::get<LandmarkFrame>(item.what);
        EdgeAgent& agent = *agents.at(frame.camera_id);
        const auto start = Clock::now();
        if (agent.process_frame(frame)) {
          ++report.events;
        }
        report.frame_latency.add(micros_since(start));
        ++report.frames;
        agent.deliver_now();
      }
    }

    for (const FeedEntry& entry : cloud.alerts_since(0)) {
      report.alerts.push_back(entry.alert);
    }
    score_alerts(report, timeline.thefts, scenario.dedup_window_ms);
    report.audit_violations = audit_decision_log(read_ndjson_file(decision_log), scenario.dedup_window_ms);
    report.ground_truth_consistent = thefts_match_inventory_log(inventory.audit_log(), timeline.thefts);
  } catch (const std::exception& e) {
    report.failed = true;
    report.error = e.what();
  }
  return report;
}

// --- reporting -------------------------------------------------------------

Json to_json(const RunReport& r, bool include_latency) {
  Json alerts = Json::array();
  for (const Alert& a : r.alerts) {
    alerts.push_back(to_json(a));
  }
  Json j = {{"scenario", r.scenario},
            {"seed", r.seed},
            {"failed", r.failed},
            {"error", r.error},
            {"frames", r.frames},
            {"events", r.events},
            {"uncorroborated", r.uncorroborated},
            {"suppressed", r.suppressed},
            {"alerts", std::move(alerts)},
            {"scripted_thefts", r.scripted_thefts},
            {"true_positives", r.true_positives},
            {"false_positives", r.false_positives},
            {"misses", r.misses},
            {"precision", r.precision},
            {"recall", r.recall},
            {"audit_violations", r.audit_violations},
            {"ground_truth_consistent", r.ground_truth_consistent}};
  if (include_latency) {
    auto stage = [](const StageLatency& s) {
      return Json{{"samples", s.samples}, {"mean_us", s.mean_us}, {"max_us", s.max_us}};
    };
    j["latency"] = {{"frame", stage(r.frame_latency)}, {"decision", stage(r.decision_latency)}};
  }
  return j;
}

std::string format_report(const RunReport& r) {
  std::ostringstream out;
  out << "scenario          " << r.scenario << " (seed " << r.seed << ")\n";
  if (r.failed) {
    out << "status            FAILED: " << r.error << '\n';
  }
  out << "frames            " << r.frames << '\n'
      << "suspicion events  " << r.events << " (" << r.uncorroborated << " uncorroborated, " << r.suppressed
      << " suppressed)\n"
      << "alerts            " << r.alerts.size() << '\n'
      << "thefts            " << r.scripted_thefts << '\n'
      << "true positives    " << r.true_positives << '\n'
      << "false positives   " << r.false_positives << '\n'
      << "misses            " << r.misses << '\n'
      << "precision         " << r.precision << '\n'
      << "recall            " << r.recall << '\n'
      << "log audit         " << (r.audit_violations.empty() ? "clean" : "VIOLATIONS") << '\n'
      << "ground truth      " << (r.ground_truth_consistent ? "consistent" : "INCONSISTENT") << '\n'
      << "frame latency     mean " << r.frame_latency.mean_us << " us, max " << r.frame_latency.max_us << " us\n"
      << "decision latency  mean " << r.decision_latency.mean_us << " us, max " << r.decision_latency.max_us
      << " us\n";
  for (const Alert& a : r.alerts) {
    out << "  " << a.alert_id << "  zone " << a.event.zone_id << "  product " << a.product_id << "  deficit "
        << a.deficit << "  score " << a.event.anomaly_score << "  at " << a.created_at << '\n';
  }
  for (const std::string& v : r.audit_violations) {
    out << "  audit: " << v << '\n';
  }
  return out.str();
}

}  // namespace shoplift
