// Decision service: corroborates suspicion events against the inventory and
// serves the staff alert API. Hosts the inventory itself when given a
// catalog, or talks to a remote inventory service.

#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "shoplift/cloud_http.hpp"
#include "shoplift/cloud_service.hpp"
#include "shoplift/inventory.hpp"
#include "shoplift/inventory_http.hpp"
#include "signals.hpp"

using namespace shoplift;

int main(int argc, char** argv) {
  CLI::App app{"shoplift decision service"};
  std::string catalog;
  std::string remote_inventory;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string port_file;
  std::string log_path;
  std::string snapshot_path;
  std::string inventory_log;
  std::string token;
  TimestampMs dedup_ms = kDefaultDedupWindowMs;
  TimestampMs staleness_ms = kDefaultStalenessMs;
  int retry_ms = 1000;
  std::string log_level = "info";

  auto* catalog_opt = app.add_option("--catalog", catalog, "product catalog JSON; hosts the inventory in-process")
                          ->check(CLI::ExistingFile);
  app.add_option("--inventory", remote_inventory, "remote inventory service, host:port")->excludes(catalog_opt);
  app.add_option("--host", host, "bind address")->capture_default_str();
  app.add_option("--port", port, "listen port, 0 picks a free one")->capture_default_str();
  app.add_option("--port-file", port_file, "write the bound port to this file once listening");
  app.add_option("--log", log_path, "append-only decision log (NDJSON)");
  app.add_option("--snapshot", snapshot_path, "state snapshot written on shutdown");
  app.add_option("--inventory-log", inventory_log, "inventory write-ahead log, with --catalog");
  app.add_option("--token", token, "shared control token");
  app.add_option("--dedup-ms", dedup_ms, "alert dedup window per (zone, product)")->capture_default_str();
  app.add_option("--staleness-ms", staleness_ms, "max observation age, with --catalog")->capture_default_str();
  app.add_option("--retry-ms", retry_ms, "interval for retrying parked events")->capture_default_str();
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(spdlog::level::from_str(log_level));
  tools::install_stop_handlers();

  try {
    if (catalog.empty() && remote_inventory.empty()) {
      throw ConfigError("need --catalog or --inventory");
    }
    std::unique_ptr<Inventory> hosted;
    std::unique_ptr<HttpInventoryClient> remote;
    const InventoryPort* inventory = nullptr;
    if (!catalog.empty()) {
      InventoryOptions inv_options{staleness_ms, std::nullopt};
      if (!inventory_log.empty()) {
        inv_options.log_path = inventory_log;
      }
      hosted = std::make_unique<Inventory>(load_catalog(catalog), inv_options);
      inventory = hosted.get();
    } else {
      remote = std::make_unique<HttpInventoryClient>(http::parse_endpoint(remote_inventory));
      inventory = remote.get();
    }

    CloudOptions options;
    options.dedup_window_ms = dedup_ms;
    options.control_token = token;
    if (!log_path.empty()) {
      options.log_path = log_path;
    }
    if (!snapshot_path.empty()) {
      options.snapshot_path = snapshot_path;
    }
    options.link_factory = [](const std::string& endpoint) -> std::shared_ptr<AgentControlLink> {
      return std::make_shared<HttpAgentControlLink>(http::parse_endpoint(endpoint));
    };
    CloudService service(*inventory, options);
    CloudServer server(service, hosted.get());
    const int bound = server.start(host, port);
    spdlog::info("decision service listening on {}:{}", host, bound);
    if (!port_file.empty()) {
      const std::string tmp = port_file + ".tmp";
      std::ofstream(tmp) << bound << '\n';
      std::filesystem::rename(tmp, port_file);
    }

    auto next_retry = std::chrono::steady_clock::now();
    while (!tools::g_stop) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      if (std::chrono::steady_clock::now() >= next_retry) {
        next_retry += std::chrono::milliseconds(retry_ms);
        if (service.parked_count() > 0) {
          if (const auto decided = service.retry_parked(); decided > 0) {
            spdlog::info("decided {} parked events", decided);
          }
        }
      }
    }
    spdlog::info("shutting down");
    server.stop();
    if (options.snapshot_path) {
      service.write_snapshot();
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
