#pragma once

// Inventory over HTTP.
//
//   POST /inventory/sales                         SaleTransaction -> ProductRecord
//   POST /inventory/observations                  ShelfObservation -> {"ok": true}
//   GET  /inventory/products/<id>                 -> ProductRecord
//   GET  /inventory/products/<id>/reconcile?now=  -> ReconciliationResult
//   GET  /inventory/zones/<zone>/products         -> ["product_id", ...]

#include <memory>
#include <mutex>

#include "shoplift/http_util.hpp"
#include "shoplift/inventory.hpp"

namespace shoplift {

void mount_inventory_routes(httplib::Server& server, Inventory& inventory);

class HttpInventoryClient final : public InventoryPort {
 public:
  explicit HttpInventoryClient(http::Endpoint endpoint);

  ProductRecord apply_sale(const SaleTransaction& tx);
  void record_observation(const ShelfObservation& obs);
  ProductRecord get_product(const std::string& product_id) const;

  // Connection failures surface as InventoryError with code Unavailable.
  ReconciliationResult reconcile(const std::string& product_id, TimestampMs now) const override;
  std::vector<std::string> products_in_zone(const std::string& zone_id) const override;

 private:
  Json call(const std::function<httplib::Result(httplib::Client&)>& request) const;

  mutable std::mutex mutex_;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace shoplift
