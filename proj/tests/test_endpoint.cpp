#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "coevo/endpoint_client.hpp"

using namespace coevo;
using nlohmann::json;

namespace {

// Local mock chat-completions server for one test scope.
class MockServer {
 public:
  explicit MockServer(httplib::Server::Handler handler) {
    server_.Post("/v1/chat/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockServer() {
    server_.stop();
    thread_.join();
  }
  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string completion_body(const std::string& content) {
  return json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}
      .dump();
}

EndpointConfig config_for(const MockServer& server) {
  EndpointConfig c;
  c.base_url = server.base_url();
  c.model_name = "mock-model";
  c.max_in_flight = 2;
  c.timeout_ms = 5000;
  c.retry = {3, 10};
  return c;
}

}  // namespace

TEST_CASE("n=0 returns empty without a network call") {
  std::atomic<int> hits{0};
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.set_content(completion_body("hi"), "application/json");
  });
  auto out = endpoint_sample(config_for(server), "sys", "user", 0);
  CHECK(out.empty());
  CHECK(hits.load() == 0);
}

TEST_CASE("echo server returns n identical strings") {
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion_body("fixed reply"), "application/json");
  });
  auto out = endpoint_sample(config_for(server), "sys", "user", 3);
  REQUIRE(out.size() == 3);
  for (const auto& s : out) CHECK(s == "fixed reply");
}

TEST_CASE("request body carries the wire schema fields") {
  json seen;
  MockServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen = json::parse(req.body);
    res.set_content(completion_body("ok"), "application/json");
  });
  auto cfg = config_for(server);
  cfg.temperature = 0.7;
  cfg.top_p = 0.95;
  endpoint_sample(cfg, "be brief", "what is 1+1?", 1);
  CHECK(seen["model"] == "mock-model");
  CHECK(seen["temperature"] == doctest::Approx(0.7));
  CHECK(seen["top_p"] == doctest::Approx(0.95));
  CHECK(seen["n"] == 1);
  REQUIRE(seen["messages"].size() == 2);
  CHECK(seen["messages"][0]["role"] == "system");
  CHECK(seen["messages"][0]["content"] == "be brief");
  CHECK(seen["messages"][1]["role"] == "user");
  CHECK(seen["messages"][1]["content"] == "what is 1+1?");
}

TEST_CASE("bearer credential comes from the named environment variable") {
  std::string auth_seen;
  MockServer server([&](const httplib::Request& req, httplib::Response& res) {
    auth_seen = req.get_header_value("Authorization");
    res.set_content(completion_body("ok"), "application/json");
  });
  auto cfg = config_for(server);
  cfg.api_key_source = "COEVO_TEST_KEY";
  setenv("COEVO_TEST_KEY", "sekret", 1);
  endpoint_sample(cfg, "s", "u", 1);
  CHECK(auth_seen == "Bearer sekret");

  unsetenv("COEVO_TEST_KEY");
  CHECK_THROWS_AS(endpoint_sample(cfg, "s", "u", 1), ConfigError);
}

TEST_CASE("transient 500s are retried until success") {
  std::atomic<int> hits{0};
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    int n = ++hits;
    if (n <= 2) {
      res.status = 500;
      res.set_content("busy", "text/plain");
    } else {
      res.set_content(completion_body("recovered"), "application/json");
    }
  });
  auto cfg = config_for(server);
  cfg.max_in_flight = 1;
  auto out = endpoint_sample(cfg, "s", "u", 1);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == "recovered");
  CHECK(hits.load() == 3);
}

TEST_CASE("exhausted retries raise a transport error with the last status") {
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
    res.set_content("down", "text/plain");
  });
  auto cfg = config_for(server);
  cfg.max_in_flight = 1;
  try {
    endpoint_sample(cfg, "s", "u", 1);
    FAIL("expected TransportError");
  } catch (const TransportError& e) {
    CHECK(e.last_status == 503);
  }
}

TEST_CASE("permanent 4xx fails fast without retries") {
  std::atomic<int> hits{0};
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 400;
    res.set_content("bad request", "text/plain");
  });
  auto cfg = config_for(server);
  CHECK_THROWS_AS(endpoint_sample(cfg, "s", "u", 1), TransportError);
  CHECK(hits.load() == 1);
}

TEST_CASE("responses stay in request order under sequential dispatch") {
  std::atomic<int> counter{0};
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion_body("reply-" + std::to_string(counter++)), "application/json");
  });
  auto cfg = config_for(server);
  cfg.max_in_flight = 1;
  auto out = endpoint_sample(cfg, "s", "u", 4);
  CHECK(out == std::vector<std::string>{"reply-0", "reply-1", "reply-2", "reply-3"});
}

TEST_CASE("concurrent dispatch still fills every slot") {
  std::atomic<int> counter{0};
  MockServer server([&](const httplib::Request&, httplib::Response& res) {
    ++counter;
    res.set_content(completion_body("slot"), "application/json");
  });
  auto cfg = config_for(server);
  cfg.max_in_flight = 4;
  auto out = endpoint_sample(cfg, "s", "u", 10);
  REQUIRE(out.size() == 10);
  for (const auto& s : out) CHECK(s == "slot");
  CHECK(counter.load() == 10);
}

TEST_CASE("endpoint backends adapt prompts and honor counts") {
  json last_request;
  MockServer server([&](const httplib::Request& req, httplib::Response& res) {
    last_request = json::parse(req.body);
    res.set_content(completion_body("<question>Q</question>\n\\boxed{1}"),
                    "application/json");
  });
  auto cfg = config_for(server);

  EndpointGeneratorBackend gen(cfg);
  CHECK_FALSE(gen.trainable());
  auto questions = gen.sample_questions(2, Rng(0));
  CHECK(questions.size() == 2);
  CHECK(questions[0].raw == "<question>Q</question>\n\\boxed{1}");
  CHECK(questions[0].action_path.empty());
  CHECK(last_request["messages"][1]["content"] ==
        "Generate one new, challenging reasoning question now. Remember to format the "
        "output exactly as instructed.");

  EndpointSolverBackend sol(cfg);
  CHECK_FALSE(sol.trainable());
  auto answers = sol.sample_answers("What is 5+5?", 3, Rng(0));
  CHECK(answers.size() == 3);
  CHECK(last_request["messages"][0]["content"] ==
        "Please reason step by step, and put your final answer within \\boxed{}.");
  CHECK(last_request["messages"][1]["content"] == "What is 5+5?");
}

TEST_CASE("endpoint config validation") {
  EndpointConfig c;
  CHECK_THROWS_AS(c.validate(), ConfigError);  // no base_url
  c.base_url = "http://localhost:1";
  c.top_p = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.top_p = 0.99;
  c.max_in_flight = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.max_in_flight = 1;
  CHECK_NOTHROW(c.validate());
}
