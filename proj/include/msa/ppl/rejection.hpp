#pragma once

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "msa/ppl/ast.hpp"
#include "msa/ppl/eval.hpp"

namespace msa::ppl {

struct PosteriorEstimate {
  std::uint64_t seed = 0;
  std::uint64_t n_samples = 0;
  std::uint64_t n_rejected = 0;
  std::map<std::string, std::vector<double>> queries;  // label -> samples

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& [label, _] : queries) out.push_back(label);
    return out;
  }

  double mean(const std::string& label) const {
    const auto& xs = queries.at(label);
    double total = 0;
    for (double x : xs) total += x;
    return xs.empty() ? 0 : total / static_cast<double>(xs.size());
  }
};

struct RejectionOptions {
  std::uint64_t n_samples = 1000;
  std::uint64_t seed = 0;
  std::uint64_t max_attempts_per_sample = 1'000'000;
  int n_workers = 1;
  EvalLimits limits;  // max_steps applies per attempt
};

namespace detail {

// One attempt = one full top-level execution plus a model call on a stream
// derived from (seed, attempt_index). Returns the query record, or nothing
// when a condition failed.
inline std::optional<ValueRecord> run_attempt(const Program& program, std::uint64_t seed,
                                              std::uint64_t attempt_index,
                                              const EvalLimits& limits) {
  SampleSource source(Rng::for_attempt(seed, attempt_index));
  Interpreter interp(source, limits);
  try {
    EnvPtr globals = Interpreter::make_global_env();
    Value infer = interp.run_top_level(program, globals);
    const InferSpec& spec = *infer.as_infer();
    if (spec.method != "rejection")
      throw EvalError("unsupported inference method '" + spec.method + "' (only 'rejection')");
    Value result = interp.call(spec.model, {}, Span{});
    if (!result.is_record())
      throw EvalError(std::string("model must return a record of query results, got ") +
                      result.type_name());
    return result.as_record();
  } catch (const TraceRejected&) {
    return std::nullopt;
  }
}

inline void append_sample(PosteriorEstimate& estimate, const ValueRecord& record) {
  for (const auto& [label, value] : record) {
    if (!value.is_number())
      throw EvalError("query '" + label + "' returned a " + value.type_name() +
                      "; each query must be a number");
    double d = value.as_number();
    if (!std::isfinite(d)) throw EvalError("query '" + label + "' returned a non-finite number");
    estimate.queries[label].push_back(d);
  }
}

}  // namespace detail

inline PosteriorEstimate run_rejection(const Program& program, const RejectionOptions& options) {
  PosteriorEstimate estimate;
  estimate.seed = options.seed;

  const std::uint64_t wanted = options.n_samples;
  std::uint64_t accepted = 0;
  std::uint64_t consecutive_rejects = 0;
  std::uint64_t next_attempt = 0;

  auto consume = [&](const std::optional<ValueRecord>& outcome) {
    if (outcome) {
      detail::append_sample(estimate, *outcome);
      ++accepted;
      consecutive_rejects = 0;
    } else {
      ++estimate.n_rejected;
      if (++consecutive_rejects >= options.max_attempts_per_sample)
        throw MaxRejectionsError(accepted, consecutive_rejects);
    }
  };

  if (options.n_workers <= 1) {
    while (accepted < wanted) consume(detail::run_attempt(program, options.seed, next_attempt++, options.limits));
  } else {
    // Attempts are evaluated in parallel batches but merged strictly in
    // attempt-index order, so the result is schedule-independent.
    const auto workers = static_cast<std::uint64_t>(options.n_workers);
    std::uint64_t batch = workers * 32;
    while (accepted < wanted) {
      std::vector<std::optional<ValueRecord>> results(batch);
      std::atomic<std::uint64_t> cursor{0};
      std::exception_ptr failure;
      std::mutex failure_mutex;
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (std::uint64_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (;;) {
            std::uint64_t i = cursor.fetch_add(1);
            if (i >= batch) return;
            try {
              results[i] = detail::run_attempt(program, options.seed, next_attempt + i, options.limits);
            } catch (...) {
              std::lock_guard<std::mutex> lock(failure_mutex);
              if (!failure) failure = std::current_exception();
              return;
            }
          }
        });
      }
      for (auto& t : pool) t.join();
      if (failure) std::rethrow_exception(failure);
      for (std::uint64_t i = 0; i < batch && accepted < wanted; ++i) consume(results[i]);
      next_attempt += batch;
      // Grow batches when acceptance is low to limit round-trips.
      if (accepted > 0) {
        double rate = static_cast<double>(accepted) / static_cast<double>(next_attempt);
        std::uint64_t remaining = wanted - accepted;
        std::uint64_t est = static_cast<std::uint64_t>(static_cast<double>(remaining) / std::max(rate, 1e-6) * 1.2);
        batch = std::clamp<std::uint64_t>(est, workers * 32, 1u << 18);
      } else {
        batch = std::min<std::uint64_t>(batch * 2, 1u << 18);
      }
    }
  }

  estimate.n_samples = accepted;
  return estimate;
}

inline PosteriorEstimate run_rejection(const Program& program, std::uint64_t n_samples,
                                       std::uint64_t seed,
                                       std::uint64_t max_attempts_per_sample = 1'000'000) {
  RejectionOptions options;
  options.n_samples = n_samples;
  options.seed = seed;
  options.max_attempts_per_sample = max_attempts_per_sample;
  return run_rejection(program, options);
}

}  // namespace msa::ppl
