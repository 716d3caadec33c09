#pragma once

#include <cstdlib>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "msa/lm/backend.hpp"
#include "msa/lm/replay.hpp"

namespace msa::lm {

struct HttpBackendOptions {
  BackoffPolicy backoff;
  std::shared_ptr<RateLimiter> rate_limiter;                 // optional
  std::function<void(std::chrono::milliseconds)> sleeper =   // injectable for tests
      [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  std::chrono::seconds timeout{120};
};

// OpenAI-compatible chat-completions client with exponential backoff on
// rate-limit and server errors. Auth failures never retry.
class HttpBackend final : public Backend {
 public:
  HttpBackend(BackendDescriptor descriptor, HttpBackendOptions options = {})
      : descriptor_(std::move(descriptor)), options_(std::move(options)) {
    split_endpoint(descriptor_.endpoint, origin_, path_prefix_);
    if (!descriptor_.credential_env.empty()) {
      const char* key = std::getenv(descriptor_.credential_env.c_str());
      if (key) api_key_ = key;
    }
  }

  std::vector<std::string> complete(const CompletionRequest& request) override {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages)
      messages.push_back({{"role", m.role}, {"content", m.text}});
    nlohmann::json payload{{"model", request.model_name.empty() ? descriptor_.model_name
                                                                : request.model_name},
                           {"messages", messages},
                           {"temperature", request.temperature},
                           {"n", request.n_candidates},
                           {"max_tokens", request.max_tokens}};
    if (request.seed) payload["seed"] = *request.seed;
    const std::string body = payload.dump();

    for (int attempt = 0;; ++attempt) {
      if (options_.rate_limiter) options_.rate_limiter->acquire();
      httplib::Client client(origin_);
      client.set_read_timeout(options_.timeout);
      client.set_connection_timeout(std::chrono::seconds(10));
      httplib::Headers headers;
      if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

      auto result = client.Post(path_prefix_ + "/chat/completions", headers, body,
                                "application/json");
      if (result) {
        int status = result->status;
        if (status == 200) return parse_completions(result->body, request.n_candidates);
        if (status == 401 || status == 403)
          throw AuthFailureError("authentication failed (" + std::to_string(status) + ")");
        if (status != 429 && status < 500)
          throw TransportError("endpoint returned status " + std::to_string(status) + ": " +
                               result->body);
        if (attempt >= options_.backoff.max_retries) {
          if (status == 429)
            throw RateLimitExhaustedError("rate limited after " +
                                          std::to_string(attempt) + " retries");
          throw TransportError("server error " + std::to_string(status) + " after retries");
        }
      } else {
        if (attempt >= options_.backoff.max_retries)
          throw TransportError("transport failure: " + httplib::to_string(result.error()));
      }
      auto delay = options_.backoff.delay(attempt);
      retry_log_.push_back(delay);
      options_.sleeper(delay);
    }
  }

  const std::vector<std::chrono::milliseconds>& retry_log() const { return retry_log_; }

 private:
  BackendDescriptor descriptor_;
  HttpBackendOptions options_;
  std::string origin_;       // scheme://host:port
  std::string path_prefix_;  // e.g. /v1
  std::string api_key_;
  std::vector<std::chrono::milliseconds> retry_log_;

  static void split_endpoint(const std::string& endpoint, std::string& origin,
                             std::string& prefix) {
    auto scheme_end = endpoint.find("://");
    std::size_t path_start = scheme_end == std::string::npos
                                 ? endpoint.find('/')
                                 : endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      origin = endpoint;
      prefix.clear();
    } else {
      origin = endpoint.substr(0, path_start);
      prefix = endpoint.substr(path_start);
      while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    }
  }

  static std::vector<std::string> parse_completions(const std::string& body, int expected) {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices"))
      throw TransportError("malformed completion response: " + body.substr(0, 200));
    std::vector<std::string> out;
    for (const auto& choice : j.at("choices"))
      out.push_back(choice.at("message").at("content").get<std::string>());
    if (out.empty() || static_cast<int>(out.size()) < expected)
      throw TransportError("endpoint returned " + std::to_string(out.size()) +
                           " choices, expected " + std::to_string(expected));
    return out;
  }
};

// Builds the backend stack a descriptor asks for: plain mock, plain http,
// replay-only, or record-through (replay wrapping http when both an endpoint
// and a cache path are configured).
inline std::shared_ptr<Backend> make_backend(const BackendDescriptor& descriptor,
                                             std::shared_ptr<MockBackend> mock = nullptr,
                                             HttpBackendOptions http_options = {}) {
  switch (descriptor.kind) {
    case BackendKind::Mock:
      return mock ? mock : std::make_shared<MockBackend>();
    case BackendKind::Http: {
      auto http = std::make_shared<HttpBackend>(descriptor, http_options);
      if (!descriptor.cache_path.empty())
        return std::make_shared<CacheBackend>(descriptor.cache_path, http, false);
      return http;
    }
    default:
      return std::make_shared<CacheBackend>(descriptor.cache_path, nullptr,
                                            descriptor.strict_replay);
  }
}

}  // namespace msa::lm
