#ifndef PATHFORGE_ENDPOINT_HPP
#define PATHFORGE_ENDPOINT_HPP

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "pathforge/error.hpp"
#include "pathforge/parallel.hpp"

namespace pathforge {

struct EndpointConfig {
  std::string base_url;  // scheme://host[:port]
  std::string route = "/v1/chat/completions";
  std::string model;
  std::string api_key_env;  // empty: send no credential
  unsigned max_concurrency = 4;
  double timeout_s = 60.0;
  unsigned max_attempts = 3;
  double backoff_initial_s = 1.0;
  double backoff_factor = 2.0;
  unsigned max_tokens = 512;
  double temperature = 0.0;
  bool audit_images = true;  // false elides base64 payloads from the audit log
};

inline EndpointConfig endpoint_config_from_json(const nlohmann::json& j) {
  EndpointConfig c;
  try {
    c.base_url = j.at("base_url").get<std::string>();
    c.model = j.at("model").get<std::string>();
    c.route = j.value("route", c.route);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.max_concurrency = j.value("max_concurrency", c.max_concurrency);
    c.timeout_s = j.value("timeout_s", c.timeout_s);
    c.max_attempts = j.value("max_attempts", c.max_attempts);
    c.backoff_initial_s = j.value("backoff_initial_s", c.backoff_initial_s);
    c.backoff_factor = j.value("backoff_factor", c.backoff_factor);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.temperature = j.value("temperature", c.temperature);
    c.audit_images = j.value("audit_images", c.audit_images);
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::kInvalidInput, std::string("bad endpoint config: ") + e.what());
  }
  if (c.max_concurrency == 0 || c.max_attempts == 0 || !(c.timeout_s > 0.0) || c.backoff_initial_s < 0.0)
    throw Error(errc::kInvalidInput, "endpoint config needs max_concurrency, max_attempts and timeout_s > 0");
  return c;
}

inline std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  if (bytes.empty()) return {};
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

struct QueryRequest {
  std::string instance_id;
  std::string text;
  std::vector<std::vector<std::uint8_t>> images_png;  // presented order
};

struct QueryResult {
  enum class Status { ok, auth_error, retries_exhausted, malformed_response, rejected };
  std::string instance_id;
  Status status = Status::ok;
  std::string text;
  std::string error;
  unsigned attempts = 0;
};

inline std::string_view to_string(QueryResult::Status s) noexcept {
  switch (s) {
    case QueryResult::Status::ok: return "ok";
    case QueryResult::Status::auth_error: return "auth_error";
    case QueryResult::Status::retries_exhausted: return "retries_exhausted";
    case QueryResult::Status::malformed_response: return "malformed_response";
    case QueryResult::Status::rejected: return "rejected";
  }
  return "ok";
}

/// Serialized JSON-lines sink shared by concurrent workers.
class AuditLog {
 public:
  explicit AuditLog(const std::string& path) : out_(path, std::ios::app) {
    if (!out_) throw Error(errc::kIo, "cannot open audit log " + path);
  }

  void append(const nlohmann::json& entry) {
    const std::string line = entry.dump();
    std::lock_guard lock(mu_);
    out_ << line << '\n';
    out_.flush();
  }

 private:
  std::mutex mu_;
  std::ofstream out_;
};

class EndpointClient {
 public:
  /// Reads the credential from the environment variable named in the config.
  explicit EndpointClient(EndpointConfig cfg, AuditLog* audit = nullptr) : cfg_(std::move(cfg)), audit_(audit) {
    if (!cfg_.api_key_env.empty()) {
      const char* key = std::getenv(cfg_.api_key_env.c_str());
      if (!key || !*key)
        throw Error(errc::kInvalidInput, "credential variable " + cfg_.api_key_env + " is not set");
      key_ = key;
    }
  }

  const EndpointConfig& config() const noexcept { return cfg_; }

  nlohmann::json request_body(const QueryRequest& q, bool with_images = true) const {
    nlohmann::json content = nlohmann::json::array();
    content.push_back({{"type", "text"}, {"text", q.text}});
    for (const auto& img : q.images_png) {
      const std::string url = with_images ? "data:image/png;base64," + base64_encode(img)
                                          : "data:image/png;base64,<" + std::to_string(img.size()) + " bytes>";
      content.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
    }
    return {{"model", cfg_.model},
            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", content}}})},
            {"max_tokens", cfg_.max_tokens},
            {"temperature", cfg_.temperature}};
  }

  /// One completion with bounded retries on 429, 5xx and transport errors.
  QueryResult query(const QueryRequest& q) const {
    QueryResult r;
    r.instance_id = q.instance_id;
    const std::string body = request_body(q).dump();
    httplib::Client cli(cfg_.base_url);
    const auto secs = std::chrono::duration<double>(cfg_.timeout_s);
    const auto tsec = std::chrono::duration_cast<std::chrono::microseconds>(secs);
    cli.set_connection_timeout(tsec);
    cli.set_read_timeout(tsec);
    cli.set_write_timeout(tsec);
    httplib::Headers headers;
    if (!key_.empty()) headers.emplace("Authorization", "Bearer " + key_);

    for (unsigned attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
      r.attempts = attempt;
      auto res = cli.Post(cfg_.route, headers, body, "application/json");
      const int status = res ? res->status : 0;
      log(q, attempt, res ? std::to_string(status) : httplib::to_string(res.error()), res ? res->body : "");
      if (res && status == 200) {
        try {
          const auto j = nlohmann::json::parse(res->body);
          r.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
          r.status = QueryResult::Status::ok;
          r.error.clear();
        } catch (const std::exception& e) {
          r.status = QueryResult::Status::malformed_response;
          r.error = std::string("malformed response: ") + e.what();
        }
        return r;
      }
      if (status == 401 || status == 403) {
        r.status = QueryResult::Status::auth_error;
        r.error = "authentication failed with HTTP " + std::to_string(status);
        return r;
      }
      const bool transient = !res || status == 429 || status >= 500;
      if (!transient) {
        r.status = QueryResult::Status::rejected;
        r.error = "request rejected with HTTP " + std::to_string(status);
        return r;
      }
      r.status = QueryResult::Status::retries_exhausted;
      r.error = res ? "HTTP " + std::to_string(status) : "transport error: " + httplib::to_string(res.error());
      if (attempt < cfg_.max_attempts) {
        const double wait = cfg_.backoff_initial_s * std::pow(cfg_.backoff_factor, attempt - 1);
        std::this_thread::sleep_for(std::chrono::duration<double>(wait));
      }
    }
    r.error = "gave up after " + std::to_string(cfg_.max_attempts) + " attempts: " + r.error;
    return r;
  }

  /// Queries everything with at most max_concurrency requests in flight.
  /// Failures are recorded per request and never abort the batch.
  std::vector<QueryResult> query_all(const std::vector<QueryRequest>& qs) const {
    std::vector<QueryResult> out(qs.size());
    parallel_for(qs.size(), cfg_.max_concurrency, [&](std::size_t i) { out[i] = query(qs[i]); });
    return out;
  }

 private:
  void log(const QueryRequest& q, unsigned attempt, const std::string& status, const std::string& response) const {
    if (!audit_) return;
    audit_->append({{"instance_id", q.instance_id},
                    {"attempt", attempt},
                    {"status", status},
                    {"request", request_body(q, cfg_.audit_images)},
                    {"response", response}});
  }

  EndpointConfig cfg_;
  AuditLog* audit_ = nullptr;
  std::string key_;
};

}  // namespace pathforge

#endif  // PATHFORGE_ENDPOINT_HPP
