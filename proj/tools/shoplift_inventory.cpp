// Standalone inventory service.

#include <chrono>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "shoplift/inventory.hpp"
#include "shoplift/inventory_http.hpp"
#include "signals.hpp"

using namespace shoplift;

int main(int argc, char** argv) {
  CLI::App app{"shoplift inventory service"};
  std::string catalog;
  std::string host = "127.0.0.1";
  int port = 8081;
  std::string log_path;
  TimestampMs staleness_ms = kDefaultStalenessMs;
  std::string log_level = "info";
  app.add_option("--catalog", catalog, "product catalog JSON")->required()->check(CLI::ExistingFile);
  app.add_option("--host", host, "bind address")->capture_default_str();
  app.add_option("--port", port, "listen port")->capture_default_str();
  app.add_option("--log", log_path, "write-ahead log (NDJSON), replayed on start");
  app.add_option("--staleness-ms", staleness_ms, "max observation age")->capture_default_str();
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(spdlog::level::from_str(log_level));
  tools::install_stop_handlers();
  try {
    InventoryOptions options{staleness_ms, std::nullopt};
    if (!log_path.empty()) {
      options.log_path = log_path;
    }
    Inventory inventory(load_catalog(catalog), options);
    httplib::Server server;
    mount_inventory_routes(server, inventory);
    const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
      throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
    }
    std::thread serving([&] { server.listen_after_bind(); });
    spdlog::info("inventory listening on {}:{}", host, bound);
    while (!tools::g_stop) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    server.stop();
    serving.join();
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
