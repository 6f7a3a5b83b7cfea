#include "shoplift/inventory.hpp"

#include <fstream>
#include <sstream>

#include "shoplift/codec.hpp"

namespace shoplift {

Json to_json(const InventoryLogEntry& entry) {
  Json j = {{"seq", entry.seq}, {"expected_count", entry.expected_count}};
  if (const auto* sale = std::get_if<SaleTransaction>(&entry.change)) {
    j["type"] = "sale";
    j["sale"] = to_json(*sale);
  } else {
    j["type"] = "observation";
    j["observation"] = to_json(std::get<ShelfObservation>(entry.change));
  }
  return j;
}

InventoryLogEntry inventory_entry_from_json(const Json& j) {
  FieldReader r(j);
  InventoryLogEntry entry;
  entry.seq = r.unsigned_integer("seq");
  entry.expected_count = r.integer("expected_count");
  const std::string type = r.string("type");
  if (type == "sale") {
    entry.change = decode<SaleTransaction>(r.at("sale"), "sale");
  } else if (type == "observation") {
    entry.change = decode<ShelfObservation>(r.at("observation"), "observation");
  } else {
    throw DecodeError("type", "expected sale or observation, got '" + type + "'");
  }
  return entry;
}

Inventory::Inventory(const std::vector<ProductRecord>& catalog, InventoryOptions options)
    : options_(std::move(options)) {
  if (options_.staleness_ms < 0) {
    throw ConfigError("staleness bound must be >= 0");
  }
  for (const ProductRecord& record : catalog) {
    if (record.expected_count < 0) {
      throw ConfigError("product " + record.product_id + " has a negative expected count");
    }
    auto s = std::make_unique<Slot>();
    s->record = record;
    s->initial_count = record.expected_count;
    if (!slots_.emplace(record.product_id, std::move(s)).second) {
      throw ConfigError("duplicate product " + record.product_id + " in catalog");
    }
    zones_[record.zone_id].push_back(record.product_id);
  }
  if (options_.log_path) {
    wal_ = std::make_unique<NdjsonLog>(*options_.log_path);
    for (const Json& record : wal_->recovered()) {
      replay(record);
    }
    wal_->release_recovered();
  }
}

Inventory::Slot& Inventory::slot(const std::string& product_id, InventoryError::Code missing) {
  auto it = slots_.find(product_id);
  if (it == slots_.end()) {
    throw InventoryError(missing, "unknown product " + product_id);
  }
  return *it->second;
}

const Inventory::Slot& Inventory::slot(const std::string& product_id, InventoryError::Code missing) const {
  return const_cast<Inventory*>(this)->slot(product_id, missing);
}

void Inventory::log_change(InventoryLogEntry entry) {
  std::lock_guard lock(log_mutex_);
  entry.seq = next_seq_;
  if (wal_) {
    wal_->append(to_json(entry));
  }
  ++next_seq_;
  audit_.push_back(std::move(entry));
}

void Inventory::replay(const Json& record) {
  InventoryLogEntry entry = inventory_entry_from_json(record);
  if (const auto* sale = std::get_if<SaleTransaction>(&entry.change)) {
    Slot& s = slot(sale->product_id, InventoryError::Code::UnknownProduct);
    applied_tx_.insert(sale->tx_id);
    s.record.expected_count -= sale->quantity;
  } else {
    const auto& obs = std::get<ShelfObservation>(entry.change);
    Slot& s = slot(obs.product_id, InventoryError::Code::UnknownPairing);
    if (!s.latest || obs.timestamp >= s.latest->timestamp) {
      s.latest = obs;
    }
  }
  next_seq_ = entry.seq + 1;
  audit_.push_back(std::move(entry));
}

ProductRecord Inventory::apply_sale(const SaleTransaction& tx) {
  if (tx.quantity < 1) {
    throw DecodeError("quantity", "must be >= 1");
  }
  Slot& s = slot(tx.product_id, InventoryError::Code::UnknownProduct);
  std::unique_lock write(s.mutex);
  {
    std::lock_guard lock(tx_mutex_);
    if (applied_tx_.contains(tx.tx_id)) {
      return s.record;
    }
    if (tx.quantity > s.record.expected_count) {
      throw InventoryError(InventoryError::Code::Oversell,
                           "sale of " + std::to_string(tx.quantity) + " exceeds expected count " +
                               std::to_string(s.record.expected_count) + " of " + tx.product_id);
    }
    applied_tx_.insert(tx.tx_id);
  }
  try {
    log_change({0, tx, s.record.expected_count - tx.quantity});
  } catch (...) {
    std::lock_guard lock(tx_mutex_);
    applied_tx_.erase(tx.tx_id);
    throw;
  }
  s.record.expected_count -= tx.quantity;
  return s.record;
}

void Inventory::record_observation(const ShelfObservation& obs) {
  if (obs.observed_count < 0) {
    throw DecodeError("observed_count", "must be >= 0");
  }
  Slot& s = slot(obs.product_id, InventoryError::Code::UnknownPairing);
  if (s.record.zone_id != obs.zone_id) {
    throw InventoryError(InventoryError::Code::UnknownPairing,
                         "product " + obs.product_id + " is not stocked in zone " + obs.zone_id);
  }
  std::unique_lock write(s.mutex);
  log_change({0, obs, s.record.expected_count});
  if (!s.latest || obs.timestamp >= s.latest->timestamp) {
    s.latest = obs;
  }
}

ReconciliationResult Inventory::reconcile(const std::string& product_id, TimestampMs now) const {
  const Slot& s = slot(product_id, InventoryError::Code::UnknownProduct);
  std::shared_lock read(s.mutex);
  if (!s.latest || now - s.latest->timestamp > options_.staleness_ms) {
    throw InventoryError(InventoryError::Code::Stale, "no fresh observation of " + product_id);
  }
  return make_reconciliation(product_id, s.record.expected_count, s.latest->observed_count);
}

std::vector<std::string> Inventory::products_in_zone(const std::string& zone_id) const {
  auto it = zones_.find(zone_id);
  return it == zones_.end() ? std::vector<std::string>{} : it->second;
}

ProductRecord Inventory::get_product(const std::string& product_id) const {
  const Slot& s = slot(product_id, InventoryError::Code::UnknownProduct);
  std::shared_lock read(s.mutex);
  return s.record;
}

std::optional<ShelfObservation> Inventory::latest_observation(const std::string& product_id) const {
  const Slot& s = slot(product_id, InventoryError::Code::UnknownProduct);
  std::shared_lock read(s.mutex);
  return s.latest;
}

std::vector<ProductRecord> Inventory::products() const {
  std::vector<ProductRecord> out;
  for (const auto& [id, s] : slots_) {
    std::shared_lock read(s->mutex);
    out.push_back(s->record);
  }
  return out;
}

std::int64_t Inventory::initial_count(const std::string& product_id) const {
  return slot(product_id, InventoryError::Code::UnknownProduct).initial_count;
}

std::vector<InventoryLogEntry> Inventory::audit_log() const {
  std::lock_guard lock(log_mutex_);
  return audit_;
}

std::vector<ProductRecord> catalog_from_json(const Json& j) {
  if (!j.is_array()) {
    throw DecodeError("$", "expected an array of products");
  }
  std::vector<ProductRecord> catalog;
  for (std::size_t i = 0; i < j.size(); ++i) {
    catalog.push_back(decode<ProductRecord>(j[i], "[" + std::to_string(i) + "]"));
  }
  return catalog;
}

std::vector<ProductRecord> load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot read catalog " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return catalog_from_json(parse_json(buffer.str()));
}

}  // namespace shoplift
