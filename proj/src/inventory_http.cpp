#include "shoplift/inventory_http.hpp"

#include "shoplift/codec.hpp"

namespace shoplift {

void mount_inventory_routes(httplib::Server& server, Inventory& inventory) {
  using http::guarded;
  using http::send_json;

  server.Post("/inventory/sales", guarded([&](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, to_json(inventory.apply_sale(decode<SaleTransaction>(http::body_json(req)))));
              }));
  server.Post("/inventory/observations", guarded([&](const httplib::Request& req, httplib::Response& res) {
                inventory.record_observation(decode<ShelfObservation>(http::body_json(req)));
                send_json(res, 200, {{"ok", true}});
              }));
  server.Get(R"(/inventory/products/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, to_json(inventory.get_product(req.matches[1])));
             }));
  server.Get(R"(/inventory/products/([^/]+)/reconcile)",
             guarded([&](const httplib::Request& req, httplib::Response& res) {
               if (!req.has_param("now")) {
                 throw DecodeError("now", "missing query parameter");
               }
               TimestampMs now = 0;
               try {
                 now = std::stoll(req.get_param_value("now"));
               } catch (const std::exception&) {
                 throw DecodeError("now", "expected integer milliseconds");
               }
               send_json(res, 200, to_json(inventory.reconcile(req.matches[1], now)));
             }));
  server.Get(R"(/inventory/zones/([^/]+)/products)", guarded([&](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, inventory.products_in_zone(req.matches[1]));
             }));
}

HttpInventoryClient::HttpInventoryClient(http::Endpoint endpoint) : client_(http::make_client(endpoint)) {}

Json HttpInventoryClient::call(const std::function<httplib::Result(httplib::Client&)>& request) const {
  std::lock_guard lock(mutex_);
  try {
    return http::expect_json(request(*client_));
  } catch (const TransportError& e) {
    throw InventoryError(InventoryError::Code::Unavailable, e.what());
  }
}

ProductRecord HttpInventoryClient::apply_sale(const SaleTransaction& tx) {
  return decode<ProductRecord>(call([&](httplib::Client& c) {
    return c.Post("/inventory/sales", serialize(tx), "application/json");
  }));
}

void HttpInventoryClient::record_observation(const ShelfObservation& obs) {
  call([&](httplib::Client& c) { return c.Post("/inventory/observations", serialize(obs), "application/json"); });
}

ProductRecord HttpInventoryClient::get_product(const std::string& product_id) const {
  return decode<ProductRecord>(
      call([&](httplib::Client& c) { return c.Get("/inventory/products/" + product_id); }));
}

ReconciliationResult HttpInventoryClient::reconcile(const std::string& product_id, TimestampMs now) const {
  return decode<ReconciliationResult>(call([&](httplib::Client& c) {
    return c.Get("/inventory/products/" + product_id + "/reconcile?now=" + std::to_string(now));
  }));
}

std::vector<std::string> HttpInventoryClient::products_in_zone(const std::string& zone_id) const {
  const Json body = call([&](httplib::Client& c) { return c.Get("/inventory/zones/" + zone_id + "/products"); });
  std::vector<std::string> ids;
  if (!body.is_array()) {
    throw InventoryError(InventoryError::Code::Unavailable, "zone product list is not an array");
  }
  for (const Json& id : body) {
    if (!id.is_string()) {
      throw InventoryError(InventoryError::Code::Unavailable, "zone product list holds a non-string");
    }
    ids.push_back(id.get<std::string>());
  }
  return ids;
}

}  // namespace shoplift
