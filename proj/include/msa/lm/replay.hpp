#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "msa/lm/backend.hpp"
#include "msa/util/atomic_file.hpp"

namespace msa::lm {

// Content-addressed record/replay cache. With an inner backend it records
// misses; without one (strict mode) a miss is an error. Hash collisions are
// resolved by verifying the stored canonical request and probing suffixed
// keys.
class CacheBackend final : public Backend {
 public:
  CacheBackend(std::filesystem::path dir, std::shared_ptr<Backend> inner = nullptr,
               bool strict = true)
      : dir_(std::move(dir)), inner_(std::move(inner)), strict_(strict) {
    std::filesystem::create_directories(dir_);
  }

  std::vector<std::string> complete(const CompletionRequest& request) override {
    std::string canonical = canonical_request(request);
    std::string base = canonical_request_hash(request);

    for (int probe = 0;; ++probe) {
      std::filesystem::path file = entry_path(base, probe);
      if (!std::filesystem::exists(file)) {
        // First free slot for this hash.
        if (!inner_) {
          if (strict_) throw ReplayMissError("replay cache miss for request tag '" +
                                             request.request_tag + "'");
          throw ReplayMissError("no inner backend to forward the cache miss to");
        }
        std::vector<std::string> completions = inner_->complete(request);
        nlohmann::json entry{{"request", canonical},
                             {"completions", completions},
                             {"timestamp", now_iso8601()}};
        msa::util::write_file_atomic(file, entry.dump(2) + "\n");
        return completions;
      }
      std::ifstream in(file);
      nlohmann::json entry = nlohmann::json::parse(in);
      if (entry.at("request").get<std::string>() == canonical) {
        ++hits_;
        return entry.at("completions").get<std::vector<std::string>>();
      }
      // Different request with the same hash: keep probing.
    }
  }

  std::uint64_t hits() const { return hits_; }

 private:
  std::filesystem::path dir_;
  std::shared_ptr<Backend> inner_;
  bool strict_;
  std::uint64_t hits_ = 0;

  std::filesystem::path entry_path(const std::string& base, int probe) const {
    return dir_ / (probe == 0 ? base + ".json" : base + "-" + std::to_string(probe) + ".json");
  }

  static std::string now_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
  }
};

}  // namespace msa::lm
