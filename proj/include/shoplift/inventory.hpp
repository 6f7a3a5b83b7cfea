#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "shoplift/json_fields.hpp"
#include "shoplift/model.hpp"
#include "shoplift/ndjson_log.hpp"

namespace shoplift {

inline constexpr TimestampMs kDefaultStalenessMs = 60'000;

// The slice of the inventory the decision service depends on. Implemented by
// Inventory itself and by an HTTP client for a remote inventory process.
class InventoryPort {
 public:
  virtual ~InventoryPort() = default;
  virtual std::vector<std::string> products_in_zone(const std::string& zone_id) const = 0;
  // Throws InventoryError: Stale when no fresh observation exists, Unavailable
  // when the inventory cannot be reached.
  virtual ReconciliationResult reconcile(const std::string& product_id, TimestampMs now) const = 0;
};

struct InventoryOptions {
  TimestampMs staleness_ms = kDefaultStalenessMs;
  // Write-ahead log; when set, existing entries are replayed on construction.
  std::optional<std::filesystem::path> log_path;
};

// One accepted change, as written to the audit log. expected_count is the
// product's expected count after the change.
struct InventoryLogEntry {
  std::uint64_t seq = 0;
  std::variant<SaleTransaction, ShelfObservation> change;
  std::int64_t expected_count = 0;

  friend bool operator==(const InventoryLogEntry&, const InventoryLogEntry&) = default;
};

Json to_json(const InventoryLogEntry& entry);
InventoryLogEntry inventory_entry_from_json(const Json& j);

class Inventory final : public InventoryPort {
 public:
  explicit Inventory(const std::vector<ProductRecord>& catalog, InventoryOptions options = {});

  // Decrements expected_count atomically. A tx_id seen before is a no-op that
  // returns the current record. Throws InventoryError UnknownProduct or
  // Oversell, leaving state unchanged.
  ProductRecord apply_sale(const SaleTransaction& tx);

  // Keeps the observation with the latest timestamp per product; on equal
  // timestamps the later arrival wins. Every accepted observation is logged.
  // Throws InventoryError UnknownPairing when the product is unknown or lives
  // in another zone.
  void record_observation(const ShelfObservation& obs);

  // An observation is fresh when now - observation.timestamp <= staleness_ms.
  ReconciliationResult reconcile(const std::string& product_id, TimestampMs now) const override;
  std::vector<std::string> products_in_zone(const std::string& zone_id) const override;

  ProductRecord get_product(const std::string& product_id) const;
  std::optional<ShelfObservation> latest_observation(const std::string& product_id) const;
  std::vector<ProductRecord> products() const;
  std::int64_t initial_count(const std::string& product_id) const;
  std::vector<InventoryLogEntry> audit_log() const;

  TimestampMs staleness_ms() const { return options_.staleness_ms; }

 private:
  struct Slot {
    mutable std::shared_mutex mutex;
    ProductRecord record;
    std::int64_t initial_count = 0;
    std::optional<ShelfObservation> latest;
  };

  Slot& slot(const std::string& product_id, InventoryError::Code missing);
  const Slot& slot(const std::string& product_id, InventoryError::Code missing) const;
  // Caller holds the product's write lock.
  void log_change(InventoryLogEntry entry);
  void replay(const Json& record);

  InventoryOptions options_;
  std::map<std::string, std::unique_ptr<Slot>, std::less<>> slots_;
  std::map<std::string, std::vector<std::string>, std::less<>> zones_;

  std::mutex tx_mutex_;
  std::unordered_set<std::string> applied_tx_;

  mutable std::mutex log_mutex_;
  std::uint64_t next_seq_ = 1;
  std::vector<InventoryLogEntry> audit_;
  std::unique_ptr<NdjsonLog> wal_;
};

// Catalog file: a JSON array of ProductRecord objects.
std::vector<ProductRecord> load_catalog(const std::filesystem::path& path);
std::vector<ProductRecord> catalog_from_json(const Json& j);

}  // namespace shoplift
