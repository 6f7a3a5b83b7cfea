#pragma once

// Shared HTTP plumbing: JSON responses, the error body convention
// {"error": code, "message": text}, and the mapping between error codes and
// exception types on both sides of the wire.

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

#include <httplib.h>

#include "shoplift/json_fields.hpp"

namespace shoplift::http {

struct Endpoint {
  std::string host;
  int port = 0;

  std::string url() const { return "http://" + host + ":" + std::to_string(port); }
};

// Accepts "host:port" or "http://host:port".
Endpoint parse_endpoint(std::string_view text);

void send_json(httplib::Response& res, int status, const Json& body);
void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message);

// Parses the request body; a malformed body throws DecodeError.
Json body_json(const httplib::Request& req);

// Wraps a handler so exceptions become error responses.
httplib::Server::Handler guarded(std::function<void(const httplib::Request&, httplib::Response&)> handler);

// Throws the exception matching an error response. Missing responses (no
// connection) raise TransportError.
[[noreturn]] void raise_error(const httplib::Result& result);

// Returns the parsed JSON body of a 2xx response or throws via raise_error.
Json expect_json(const httplib::Result& result);

httplib::Headers json_headers();

std::unique_ptr<httplib::Client> make_client(const Endpoint& endpoint,
                                             std::chrono::milliseconds timeout = std::chrono::seconds(2));

}  // namespace shoplift::http
