#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <thread>

#include "pathforge/endpoint.hpp"
#include "pathforge/harness.hpp"
#include "pathforge/io.hpp"

using namespace pathforge;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Loopback chat-completions server. The prompt text selects the behaviour.
class MockServer {
 public:
  MockServer() {
    srv_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int now = ++in_flight_;
      int seen = max_in_flight_.load();
      while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
      }
      ++requests_;
      handle(req, res);
      --in_flight_;
    });
    port_ = srv_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { srv_.listen_after_bind(); });
    srv_.wait_until_ready();
  }
  ~MockServer() {
    srv_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int max_in_flight() const { return max_in_flight_.load(); }
  int requests() const { return requests_.load(); }
  std::size_t last_image_count() {
    std::lock_guard lock(mu_);
    return images_;
  }
  int hits(const std::string& text) {
    std::lock_guard lock(mu_);
    return hits_[text];
  }

 private:
  static void reply(httplib::Response& res, const std::string& content) {
    res.set_content(json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}}.dump(),
                    "application/json");
  }

  void handle(const httplib::Request& req, httplib::Response& res) {
    const auto body = json::parse(req.body);
    const std::string text = body.at("messages").at(0).at("content").at(0).at("text").get<std::string>();
    int n;
    {
      std::lock_guard lock(mu_);
      n = ++hits_[text];
      images_ = body.at("messages").at(0).at("content").size() - 1;
    }
    const std::string auth = req.get_header_value("Authorization");
    if (text.rfind("auth", 0) == 0 && auth != "Bearer sekret") {
      res.status = 401;
      return;
    }
    if (text.rfind("always500", 0) == 0) {
      res.status = 500;
    } else if (text.rfind("flaky", 0) == 0) {
      if (n <= 2) res.status = n == 1 ? 503 : 429;
      else reply(res, "Answer: Path 2.\nExplanation: fewer turns.");
    } else if (text.rfind("malformed", 0) == 0) {
      res.set_content("{\"choices\": []}", "application/json");
    } else if (text.rfind("bad", 0) == 0) {
      res.status = 400;
    } else if (text.rfind("slow", 0) == 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(60));
      reply(res, "Answer: Path 1");
    } else {
      reply(res, "Answer: Path 1");
    }
  }

  httplib::Server srv_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> in_flight_{0}, max_in_flight_{0}, requests_{0};
  std::mutex mu_;
  std::map<std::string, int> hits_;
  std::size_t images_ = 0;
};

EndpointConfig config_for(const MockServer& m, unsigned concurrency = 2) {
  EndpointConfig c;
  c.base_url = m.url();
  c.model = "mock";
  c.max_concurrency = concurrency;
  c.max_attempts = 3;
  c.backoff_initial_s = 0.01;
  c.timeout_s = 5;
  return c;
}

}  // namespace

TEST(Base64, KnownVectors) {
  auto b = [](std::string s) { return base64_encode(std::vector<std::uint8_t>(s.begin(), s.end())); };
  EXPECT_EQ(b(""), "");
  EXPECT_EQ(b("f"), "Zg==");
  EXPECT_EQ(b("fo"), "Zm8=");
  EXPECT_EQ(b("foo"), "Zm9v");
  EXPECT_EQ(b("foobar"), "Zm9vYmFy");
  EXPECT_EQ(base64_encode({0xff, 0x00, 0xfe}), "/wD+");
}

TEST(EndpointConfig, ParsesAndValidates) {
  const auto c = endpoint_config_from_json(json{{"base_url", "http://x:1"}, {"model", "m"}, {"max_concurrency", 7}});
  EXPECT_EQ(c.max_concurrency, 7u);
  EXPECT_EQ(c.route, "/v1/chat/completions");
  EXPECT_THROW(endpoint_config_from_json(json{{"model", "m"}}), Error);
  EXPECT_THROW(endpoint_config_from_json(json{{"base_url", "u"}, {"model", "m"}, {"max_attempts", 0}}), Error);
}

TEST(Endpoint, EchoedAnswerParses) {
  MockServer m;
  const EndpointClient client(config_for(m));
  const auto r = client.query({"i1", "plain", {{1, 2, 3}, {4, 5}}});
  ASSERT_EQ(r.status, QueryResult::Status::ok) << r.error;
  EXPECT_EQ(r.attempts, 1u);
  EXPECT_EQ(m.last_image_count(), 2u);
  Presentation p;
  p.tags = {"1", "2"};
  EXPECT_EQ(parse_answer(r.text, p), 1);
}

TEST(Endpoint, RetriesTransientFailures) {
  MockServer m;
  const EndpointClient client(config_for(m));
  const auto ok = client.query({"f", "flaky", {}});
  EXPECT_EQ(ok.status, QueryResult::Status::ok);
  EXPECT_EQ(ok.attempts, 3u);
  EXPECT_EQ(m.hits("flaky"), 3);

  const auto dead = client.query({"d", "always500", {}});
  EXPECT_EQ(dead.status, QueryResult::Status::retries_exhausted);
  EXPECT_EQ(dead.attempts, 3u);
  EXPECT_EQ(m.hits("always500"), 3);
}

TEST(Endpoint, DistinctErrorStates) {
  MockServer m;
  const EndpointClient client(config_for(m));
  EXPECT_EQ(client.query({"a", "auth", {}}).status, QueryResult::Status::auth_error);
  EXPECT_EQ(m.hits("auth"), 1);  // never retried
  EXPECT_EQ(client.query({"m", "malformed", {}}).status, QueryResult::Status::malformed_response);
  EXPECT_EQ(client.query({"b", "bad", {}}).status, QueryResult::Status::rejected);

  auto c = config_for(m);
  c.base_url = "http://127.0.0.1:1";  // nothing listens here
  c.max_attempts = 2;
  const auto down = EndpointClient(c).query({"x", "plain", {}});
  EXPECT_EQ(down.status, QueryResult::Status::retries_exhausted);
  EXPECT_EQ(down.attempts, 2u);
}

TEST(Endpoint, CredentialComesFromTheEnvironment) {
  MockServer m;
  auto c = config_for(m);
  c.api_key_env = "PATHFORGE_TEST_UNSET_KEY";
  ::unsetenv("PATHFORGE_TEST_UNSET_KEY");
  EXPECT_THROW(EndpointClient{c}, Error);

  ::setenv("PATHFORGE_TEST_KEY", "sekret", 1);
  c.api_key_env = "PATHFORGE_TEST_KEY";
  const auto dir = fs::temp_directory_path() / "pathforge_endpoint_audit";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    AuditLog log((dir / "audit.jsonl").string());
    const EndpointClient client(c, &log);
    EXPECT_EQ(client.query({"k", "auth", {{9, 9}}}).status, QueryResult::Status::ok);
    EXPECT_EQ(client.query({"f", "flaky", {}}).status, QueryResult::Status::ok);
  }
  const auto rows = read_jsonl(dir / "audit.jsonl");
  ASSERT_EQ(rows.size(), 4u);  // one, then three attempts
  EXPECT_EQ(rows[0].at("instance_id"), "k");
  EXPECT_EQ(rows[0].at("status"), "200");
  EXPECT_EQ(rows[0].at("request").at("messages").at(0).at("content").at(1).at("image_url").at("url"),
            "data:image/png;base64,CQk=");
  EXPECT_NE(rows[0].at("response").get<std::string>().find("Answer: Path 1"), std::string::npos);
  EXPECT_EQ(rows[1].at("status"), "503");
  EXPECT_EQ(rows[3].at("attempt"), 3);
  EXPECT_EQ(read_text(dir / "audit.jsonl").find("sekret"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Endpoint, ConcurrencyBoundAndBatchSurvivesFailures) {
  MockServer m;
  const EndpointClient client(config_for(m, 3));
  std::vector<QueryRequest> qs;
  for (int i = 0; i < 24; ++i) qs.push_back({"q" + std::to_string(i), i % 6 == 5 ? "always500" : "slow" + std::to_string(i), {}});
  const auto rs = client.query_all(qs);
  ASSERT_EQ(rs.size(), qs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    EXPECT_EQ(rs[i].instance_id, qs[i].instance_id);
    EXPECT_EQ(rs[i].status, i % 6 == 5 ? QueryResult::Status::retries_exhausted : QueryResult::Status::ok);
  }
  EXPECT_LE(m.max_in_flight(), 3);
  EXPECT_GE(m.max_in_flight(), 2);
  EXPECT_EQ(m.requests(), 20 + 4 * 3);
}
