#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace msa::ppl {

// Half-open byte range into the source, plus the 1-based line/column of
// its first byte. Columns count bytes, not code points.
struct Span {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  std::uint32_t line = 1;
  std::uint32_t column = 1;
};

struct EvalError : std::runtime_error {
  EvalError(std::string msg, Span at = {})
      : std::runtime_error(std::move(msg)), span(at) {}
  Span span;
};

struct MaxRejectionsError : std::runtime_error {
  MaxRejectionsError(std::uint64_t sample_index, std::uint64_t attempts)
      : std::runtime_error("rejection sampling exhausted " + std::to_string(attempts) +
                           " attempts while drawing sample " + std::to_string(sample_index)),
        sample_index(sample_index),
        attempts(attempts) {}
  std::uint64_t sample_index;
  std::uint64_t attempts;
};

struct UnsupportedContinuousError : std::runtime_error {
  UnsupportedContinuousError(const std::string& primitive, Span at)
      : std::runtime_error("exact enumeration cannot handle continuous primitive '" + primitive + "'"),
        span(at) {}
  Span span;
};

struct BudgetExceededError : std::runtime_error {
  explicit BudgetExceededError(std::uint64_t limit)
      : std::runtime_error("enumeration exceeded the configured budget of " +
                           std::to_string(limit) + " evaluation steps") {}
};

}  // namespace msa::ppl
