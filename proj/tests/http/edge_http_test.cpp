#include <gtest/gtest.h>

#include <thread>

#include "shoplift/cloud_http.hpp"
#include "shoplift/edge_http.hpp"
#include "support/cloud_fixtures.hpp"
#include "support/net.hpp"

namespace shoplift {
namespace {

using namespace std::chrono_literals;
using testing::free_port;
using testing::suspicion;

class EdgeHttpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    CloudOptions options;
    options.control_token = "tok";
    options.link_factory = [](const std::string& endpoint) -> std::shared_ptr<AgentControlLink> {
      return std::make_shared<HttpAgentControlLink>(http::parse_endpoint(endpoint));
    };
    cloud = std::make_unique<CloudService>(inventory, options);
    server = std::make_unique<CloudServer>(*cloud, &inventory);
    port = server->start("127.0.0.1", 0);
  }
  void TearDown() override { server->stop(); }

  AgentConfig agent_config(int control_port = 0) const {
    AgentConfig c;
    c.camera_id = "cam-1";
    c.zone_id = "z1";
    c.cloud_endpoint = "127.0.0.1:" + std::to_string(port);
    c.control_token = "tok";
    c.poll_interval = 50ms;
    c.control_port = control_port;
    return c;
  }

  Inventory inventory{{{"soap", "z1", "Soap", 10}}};
  std::unique_ptr<CloudService> cloud;
  std::unique_ptr<CloudServer> server;
  int port = 0;
};

TEST_F(EdgeHttpTest, PublisherMapsResponses) {
  HttpEventPublisher publisher(http::Endpoint{"127.0.0.1", port});
  EXPECT_EQ(publisher.publish(suspicion("e1", "z1", 10)), PublishStatus::Delivered);
  EXPECT_EQ(publisher.publish(suspicion("e1", "z1", 10)), PublishStatus::Delivered);
  EXPECT_EQ(cloud->received_events().size(), 1U);
  EXPECT_EQ(publisher.publish(suspicion("e2", "z1", 10, "cam-1", -5.0)), PublishStatus::Rejected);

  HttpEventPublisher nowhere(http::Endpoint{"127.0.0.1", free_port()});
  EXPECT_EQ(nowhere.publish(suspicion("e3", "z1", 10)), PublishStatus::Retry);
}

TEST_F(EdgeHttpTest, PushedThresholdIsAppliedAtOnce) {
  EdgeAgent agent(agent_config(free_port()), std::make_shared<HttpEventPublisher>(http::Endpoint{"127.0.0.1", port}));
  AgentControlChannel channel(agent, http::Endpoint{"127.0.0.1", port});
  channel.start();
  for (int i = 0; i < 100 && !channel.registered(); ++i) {
    std::this_thread::sleep_for(10ms);
  }
  ASSERT_TRUE(channel.registered());
  const ControlReceipt r = cloud->set_threshold("cam-1", 2.5);
  EXPECT_EQ(r.status, ControlStatus::Applied);
  EXPECT_EQ(agent.threshold(), 2.5);
  EXPECT_EQ(agent.config_version(), 1U);
  EXPECT_EQ(cloud->control_state("cam-1")->status, ControlStatus::Applied);
  channel.stop();
}

TEST_F(EdgeHttpTest, OfflineAgentPicksUpPendingControlOnReconnect) {
  cloud->register_agent("cam-1", "z1");
  EXPECT_EQ(cloud->set_threshold("cam-1", 3.0).status, ControlStatus::Pending);
  EdgeAgent agent(agent_config(), std::make_shared<HttpEventPublisher>(http::Endpoint{"127.0.0.1", port}));
  AgentControlChannel channel(agent, http::Endpoint{"127.0.0.1", port});
  channel.start();
  for (int i = 0; i < 200 && cloud->control_state("cam-1")->status != ControlStatus::Applied; ++i) {
    std::this_thread::sleep_for(10ms);
  }
  channel.stop();
  EXPECT_EQ(cloud->control_state("cam-1")->status, ControlStatus::Applied);
  EXPECT_EQ(agent.threshold(), 3.0);
}

TEST_F(EdgeHttpTest, RejectedControlIsReportedWithReason) {
  AgentConfig c = agent_config(free_port());
  c.control_token = "different";
  EdgeAgent agent(c, std::make_shared<HttpEventPublisher>(http::Endpoint{"127.0.0.1", port}));
  AgentControlChannel channel(agent, http::Endpoint{"127.0.0.1", port});
  channel.start();
  for (int i = 0; i < 100 && !channel.registered(); ++i) {
    std::this_thread::sleep_for(10ms);
  }
  const ControlReceipt r = cloud->set_threshold("cam-1", 2.5);
  EXPECT_EQ(r.status, ControlStatus::Rejected);
  EXPECT_EQ(r.reason, "bad token");
  EXPECT_EQ(agent.threshold(), 1.5);
  // A rejected version is not offered again on poll.
  EXPECT_FALSE(cloud->pending_control("cam-1"));
  channel.stop();
}

}  // namespace
}  // namespace shoplift
