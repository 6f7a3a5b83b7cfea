#include "shoplift/http_util.hpp"

#include <charconv>

#include "shoplift/codec.hpp"

namespace shoplift::http {

namespace {

struct ErrorMapping {
  std::string_view code;
  int status;
};

ErrorMapping mapping(InventoryError::Code code) {
  switch (code) {
    case InventoryError::Code::UnknownProduct:
      return {"unknown_product", 404};
    case InventoryError::Code::Oversell:
      return {"oversell", 409};
    case InventoryError::Code::UnknownPairing:
      return {"unknown_pairing", 422};
    case InventoryError::Code::Stale:
      return {"stale", 409};
    case InventoryError::Code::Unavailable:
      return {"unavailable", 503};
  }
  return {"internal", 500};
}

ErrorMapping mapping(ServiceError::Code code) {
  switch (code) {
    case ServiceError::Code::UnknownAlert:
      return {"unknown_alert", 404};
    case ServiceError::Code::Conflict:
      return {"conflict", 409};
    case ServiceError::Code::Validation:
      return {"validation", 400};
    case ServiceError::Code::UnknownCamera:
      return {"unknown_camera", 404};
    case ServiceError::Code::Unauthorized:
      return {"unauthorized", 401};
  }
  return {"internal", 500};
}

}  // namespace

Endpoint parse_endpoint(std::string_view text) {
  std::string_view rest = text;
  if (rest.starts_with("http://")) {
    rest.remove_prefix(7);
  }
  while (rest.ends_with('/')) {
    rest.remove_suffix(1);
  }
  const auto colon = rest.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw ConfigError("endpoint '" + std::string(text) + "' is not host:port");
  }
  Endpoint e;
  e.host = std::string(rest.substr(0, colon));
  const std::string_view port = rest.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), e.port);
  if (ec != std::errc() || ptr != port.data() + port.size() || e.port <= 0 || e.port > 65535) {
    throw ConfigError("endpoint '" + std::string(text) + "' has an invalid port");
  }
  return e;
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, {{"error", code}, {"message", message}});
}

Json body_json(const httplib::Request& req) { return parse_json(req.body); }

httplib::Server::Handler guarded(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
  return [handler = std::move(handler)](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const DecodeError& e) {
      send_json(res, 400, {{"error", "invalid"}, {"field", e.field()}, {"message", e.what()}});
    } catch (const InventoryError& e) {
      auto m = mapping(e.code());
      send_error(res, m.status, m.code, e.what());
    } catch (const ServiceError& e) {
      auto m = mapping(e.code());
      send_error(res, m.status, m.code, e.what());
    } catch (const ConfigError& e) {
      send_error(res, 400, "validation", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

void raise_error(const httplib::Result& result) {
  if (!result) {
    throw TransportError("request failed: " + httplib::to_string(result.error()));
  }
  Json body = Json::parse(result->body, nullptr, false);
  if (body.is_discarded() || !body.is_object() || !body.contains("error") || !body["error"].is_string()) {
    throw TransportError("unexpected HTTP " + std::to_string(result->status) + " response");
  }
  const std::string code = body["error"].get<std::string>();
  const std::string message = body.value("message", code);
  if (code == "invalid") {
    throw DecodeError(body.value("field", std::string("$")), message);
  }
  for (auto c : {InventoryError::Code::UnknownProduct, InventoryError::Code::Oversell,
                 InventoryError::Code::UnknownPairing, InventoryError::Code::Stale,
                 InventoryError::Code::Unavailable}) {
    if (mapping(c).code == code) {
      throw InventoryError(c, message);
    }
  }
  for (auto c : {ServiceError::Code::UnknownAlert, ServiceError::Code::Conflict, ServiceError::Code::Validation,
                 ServiceError::Code::UnknownCamera, ServiceError::Code::Unauthorized}) {
    if (mapping(c).code == code) {
      throw ServiceError(c, message);
    }
  }
  throw TransportError("HTTP " + std::to_string(result->status) + ": " + message);
}

Json expect_json(const httplib::Result& result) {
  if (!result || result->status < 200 || result->status >= 300) {
    raise_error(result);
  }
  Json body = Json::parse(result->body, nullptr, false);
  if (body.is_discarded()) {
    throw TransportError("response body is not JSON");
  }
  return body;
}

httplib::Headers json_headers() { return {{"Accept", "application/json"}}; }

std::unique_ptr<httplib::Client> make_client(const Endpoint& endpoint, std::chrono::milliseconds timeout) {
  auto client = std::make_unique<httplib::Client>(endpoint.host, endpoint.port);
  client->set_connection_timeout(timeout);
  client->set_read_timeout(timeout);
  client->set_write_timeout(timeout);
  return client;
}

}  // namespace shoplift::http
