#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "msa/ppl/ast.hpp"
#include "msa/ppl/eval.hpp"

namespace msa::ppl {

struct ExactDistribution {
  std::vector<std::pair<Value, double>> support;  // pairwise-distinct values

  // Exact marginal over one query label of a record-valued support.
  std::map<std::string, double> marginal(const std::string& label) const {
    std::map<std::string, double> out;
    for (const auto& [value, prob] : support) {
      const Value* field = value.record_field(label);
      if (!field) throw EvalError("support value has no query '" + label + "'");
      out[canonical_encode(*field)] += prob;
    }
    return out;
  }

  double mean(const std::string& label) const {
    double total = 0;
    for (const auto& [value, prob] : support) {
      const Value* field = value.record_field(label);
      if (!field || !field->is_number())
        throw EvalError("query '" + label + "' is not numeric in the exact support");
      total += prob * field->as_number();
    }
    return total;
  }
};

struct EnumerateOptions {
  std::uint64_t max_steps = 20'000'000;  // total evaluation steps across all paths
};

namespace detail {

// Signals that the program requested a random choice beyond the forced
// prefix; carries the branch probabilities so the driver can fork.
struct EnumerationBranch {
  std::vector<double> probs;
};

class EnumerationSource final : public RandomSource {
 public:
  explicit EnumerationSource(const std::vector<std::uint32_t>& prefix) : prefix_(prefix) {}

  bool continuous_ok() const override { return false; }

  double uniform01() override {
    // Unreachable through builtins (they check continuous_ok first); guards
    // against direct use.
    throw UnsupportedContinuousError("uniform01", Span{});
  }

  bool bernoulli(double p) override {
    double ws[2] = {p, 1.0 - p};
    return choose_weighted(ws, 2) == 0;
  }

  std::size_t choose_weighted(const double* ws, std::size_t n) override {
    if (pos_ < prefix_.size()) {
      std::size_t idx = prefix_[pos_++];
      double total = 0;
      for (std::size_t i = 0; i < n; ++i) total += ws[i];
      path_prob_ *= ws[idx] / total;
      return idx;
    }
    double total = 0;
    std::vector<double> probs(n);
    for (std::size_t i = 0; i < n; ++i) total += ws[i];
    for (std::size_t i = 0; i < n; ++i) probs[i] = ws[i] / total;
    throw EnumerationBranch{std::move(probs)};
  }

  std::size_t choose_uniform(std::size_t n) override {
    std::vector<double> ws(n, 1.0);
    return choose_weighted(ws.data(), n);
  }

  double path_prob() const { return path_prob_; }

 private:
  const std::vector<std::uint32_t>& prefix_;
  std::size_t pos_ = 0;
  double path_prob_ = 1.0;
};

inline void accumulator_add(std::map<std::string, std::pair<Value, double>>& accumulator,
                            const Value& value, double prob) {
  std::string key = canonical_encode(value);
  auto it = accumulator.find(key);
  if (it == accumulator.end())
    accumulator.emplace(std::move(key), std::make_pair(value, prob));
  else
    it->second.second += prob;
}

}  // namespace detail

// Brute-force oracle: exhaustively explores every sequence of discrete
// choices, dropping rejected paths and renormalizing over the rest.
inline ExactDistribution enumerate_exact(const Program& program, EnumerateOptions options = {}) {
  std::uint64_t steps_used = 0;
  std::map<std::string, std::pair<Value, double>> accumulator;

  std::vector<std::vector<std::uint32_t>> pending;
  pending.push_back({});

  while (!pending.empty()) {
    std::vector<std::uint32_t> prefix = std::move(pending.back());
    pending.pop_back();

    detail::EnumerationSource source(prefix);
    EvalLimits limits;
    limits.max_steps = options.max_steps;
    Interpreter interp(source, limits, &steps_used);
    try {
      EnvPtr globals = Interpreter::make_global_env();
      Value infer = interp.run_top_level(program, globals);
      const InferSpec& spec = *infer.as_infer();
      Value result = interp.call(spec.model, {}, Span{});
      if (!result.is_record())
        throw EvalError(std::string("model must return a record of query results, got ") +
                        result.type_name());
      detail::accumulator_add(accumulator, result, source.path_prob());
    } catch (const TraceRejected&) {
      // Rejected mass is dropped; renormalized below.
    } catch (const detail::EnumerationBranch& branch) {
      for (std::size_t i = branch.probs.size(); i-- > 0;) {
        if (branch.probs[i] <= 0) continue;  // prune zero-probability branches
        std::vector<std::uint32_t> extended = prefix;
        extended.push_back(static_cast<std::uint32_t>(i));
        pending.push_back(std::move(extended));
      }
    }
  }

  double total = 0;
  for (const auto& [_, entry] : accumulator) total += entry.second;
  if (!(total > 0)) throw EvalError("enumeration found no accepted traces (impossible evidence)");

  ExactDistribution dist;
  for (auto& [_, entry] : accumulator)
    dist.support.emplace_back(std::move(entry.first), entry.second / total);
  return dist;
}

}  // namespace msa::ppl
