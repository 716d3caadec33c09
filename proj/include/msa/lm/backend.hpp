#pragma once

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "msa/ppl/rng.hpp"

namespace msa::lm {

struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RateLimitExhaustedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AuthFailureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ReplayMissError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ScriptExhaustedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Message {
  std::string role;  // system | user | assistant
  std::string text;
};

struct CompletionRequest {
  std::vector<Message> messages;
  double temperature = 1.0;
  int n_candidates = 1;
  int max_tokens = 2048;
  std::string model_name;
  std::string request_tag;              // stage + participant + attempt; not part of identity
  std::optional<std::uint64_t> seed;    // forwarded when the endpoint accepts it
};

enum class BackendKind { Http, Mock, Replay };

struct BackendDescriptor {
  BackendKind kind = BackendKind::Mock;
  std::string endpoint;            // http kind: base URL, e.g. http://host:port/v1
  std::string credential_env;      // http kind: env var holding the API key
  std::string model_name;
  std::string cache_path;          // replay kind
  bool strict_replay = true;

  nlohmann::json redacted_json() const {
    const char* kind_name = kind == BackendKind::Http ? "http"
                            : kind == BackendKind::Mock ? "mock"
                                                        : "replay";
    return nlohmann::json{{"kind", kind_name},
                          {"endpoint", endpoint},
                          {"credential_env", credential_env},  // name only, never the secret
                          {"model_name", model_name},
                          {"cache_path", cache_path}};
  }
};

// Identity of a request for caching: exactly (messages, temperature,
// n_candidates, max_tokens, model_name), serialized as JSON with sorted keys.
inline std::string canonical_request(const CompletionRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"text", m.text}});
  nlohmann::json j{{"messages", messages},
                   {"temperature", request.temperature},
                   {"n_candidates", request.n_candidates},
                   {"max_tokens", request.max_tokens},
                   {"model_name", request.model_name}};
  return j.dump();
}

inline std::string canonical_request_hash(const CompletionRequest& request) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(msa::ppl::fnv1a64(canonical_request(request))));
  return std::string(buf);
}

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::vector<std::string> complete(const CompletionRequest& request) = 0;
};

// Deterministic scripted backend. Responses come from a per-tag queue when
// one exists for request_tag, otherwise from the global queue.
class MockBackend final : public Backend {
 public:
  MockBackend() = default;
  MockBackend(MockBackend&& other) noexcept
      : by_tag_(std::move(other.by_tag_)), queue_(std::move(other.queue_)), calls_(other.calls_) {}

  static MockBackend from_json(const nlohmann::json& j) {
    MockBackend mock;
    if (j.contains("by_tag"))
      for (const auto& [tag, texts] : j.at("by_tag").items())
        for (const auto& t : texts) mock.script_tag(tag, t.get<std::string>());
    if (j.contains("queue"))
      for (const auto& t : j.at("queue")) mock.enqueue(t.get<std::string>());
    return mock;
  }

  void enqueue(std::string text) {
    std::lock_guard<std::mutex> lock(mutex_);
    queue_.push_back(std::move(text));
  }

  void script_tag(const std::string& tag, std::string text) {
    std::lock_guard<std::mutex> lock(mutex_);
    by_tag_[tag].push_back(std::move(text));
  }

  std::vector<std::string> complete(const CompletionRequest& request) override {
    std::lock_guard<std::mutex> lock(mutex_);
    ++calls_;
    std::vector<std::string> out;
    auto tagged = by_tag_.find(request.request_tag);
    auto& source = tagged != by_tag_.end() && !tagged->second.empty() ? tagged->second : queue_;
    for (int i = 0; i < request.n_candidates; ++i) {
      if (source.empty())
        throw ScriptExhaustedError("mock script ran out of responses for tag '" +
                                   request.request_tag + "'");
      out.push_back(std::move(source.front()));
      source.pop_front();
    }
    return out;
  }

  std::uint64_t calls() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return calls_;
  }

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::deque<std::string>> by_tag_;
  std::deque<std::string> queue_;
  std::uint64_t calls_ = 0;
};

// Token bucket over a sliding window; blocks until a slot frees up.
class RateLimiter {
 public:
  RateLimiter(int requests, std::chrono::milliseconds per)
      : requests_(requests), per_(per) {}

  void acquire() {
    std::unique_lock<std::mutex> lock(mutex_);
    for (;;) {
      auto now = std::chrono::steady_clock::now();
      while (!stamps_.empty() && now - stamps_.front() >= per_) stamps_.pop_front();
      if (static_cast<int>(stamps_.size()) < requests_) {
        stamps_.push_back(now);
        return;
      }
      auto wake = stamps_.front() + per_;
      cv_.wait_until(lock, wake);
    }
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  int requests_;
  std::chrono::milliseconds per_;
  std::deque<std::chrono::steady_clock::time_point> stamps_;
};

// Exponential backoff schedule: base * factor^attempt, capped by max_retries.
struct BackoffPolicy {
  std::chrono::milliseconds base{1000};
  double factor = 2.0;
  int max_retries = 5;

  std::chrono::milliseconds delay(int attempt) const {
    double ms = static_cast<double>(base.count()) * std::pow(factor, attempt);
    return std::chrono::milliseconds(static_cast<long long>(ms));
  }

  std::chrono::milliseconds total_delay() const {
    std::chrono::milliseconds total{0};
    for (int i = 0; i < max_retries; ++i) total += delay(i);
    return total;
  }
};

}  // namespace msa::lm
