// Store-side agent: reads landmark frames, scores them and publishes
// suspicion events to the decision service.

#include <fstream>
#include <iostream>
#include <memory>

#include <boost/asio.hpp>
#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "shoplift/classifier.hpp"
#include "shoplift/edge_agent.hpp"
#include "shoplift/edge_http.hpp"
#include "signals.hpp"

using namespace shoplift;
using boost::asio::ip::tcp;

namespace {

// Accepts one connection on the port and returns its stream.
std::unique_ptr<tcp::iostream> accept_source(unsigned short port) {
  static boost::asio::io_context io;
  tcp::acceptor acceptor(io, tcp::endpoint(tcp::v4(), port));
  spdlog::info("waiting for a landmark stream on port {}", acceptor.local_endpoint().port());
  auto stream = std::make_unique<tcp::iostream>();
  acceptor.accept(stream->socket());
  return stream;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shoplift edge agent"};
  std::string config_path;
  std::string source = "-";
  std::string log_level = "info";
  int drain_ms = 10000;
  app.add_option("--config", config_path, "agent config JSON")->required()->check(CLI::ExistingFile);
  app.add_option("--source", source, "landmark NDJSON: a file, - for stdin, or tcp:PORT to listen")
      ->capture_default_str();
  app.add_option("--drain-ms", drain_ms, "how long to wait for the queue to drain at the end")
      ->capture_default_str();
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  spdlog::set_level(spdlog::level::from_str(log_level));
  tools::install_stop_handlers();
  try {
    const AgentConfig config = load_agent_config(config_path);
    std::optional<TrainedModel> model;
    if (config.model_path) {
      model = load_model(*config.model_path);
    }
    const http::Endpoint cloud = http::parse_endpoint(config.cloud_endpoint);
    EdgeAgent agent(config, std::make_shared<HttpEventPublisher>(cloud), std::move(model));
    AgentControlChannel control(agent, cloud);
    control.start();
    agent.start_publisher();

    std::unique_ptr<std::istream> owned;
    std::istream* in = &std::cin;
    if (source.rfind("tcp:", 0) == 0) {
      owned = accept_source(static_cast<unsigned short>(std::stoi(source.substr(4))));
      in = owned.get();
    } else if (source != "-") {
      auto file = std::make_unique<std::ifstream>(source);
      if (!*file) {
        throw ConfigError("cannot read landmark source " + source);
      }
      owned = std::move(file);
      in = owned.get();
    }
    const std::size_t frames = run_frames(agent, *in, &tools::g_stop);
    spdlog::info("source finished after {} frames", frames);

    agent.stop_publisher(std::chrono::milliseconds(drain_ms));
    control.stop();
    const AgentCounters c = agent.counters();
    std::cout << Json{{"frames", c.frames},     {"events", c.events},   {"delivered", c.delivered},
                      {"rejected", c.rejected}, {"retries", c.retries}, {"dropped", c.dropped},
                      {"queued", agent.queued()}}
                     .dump()
              << std::endl;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
