#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "msa/metrics/aggregate.hpp"
#include "msa/metrics/distances.hpp"
#include "msa/metrics/judgments.hpp"
#include "msa/ppl/rng.hpp"

namespace msa::metrics {

struct TooFewParticipantsError : std::runtime_error {
  explicit TooFewParticipantsError(const std::string& vignette_id, std::size_t n)
      : std::runtime_error("vignette '" + vignette_id + "' has only " + std::to_string(n) +
                           " participants (need >= 4 for split-half / bootstrap)") {}
};

namespace detail {

// Nearest-rank percentile on a sorted copy.
inline double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  auto idx = static_cast<std::size_t>(std::llround(q * static_cast<double>(values.size() - 1)));
  return values[idx];
}

inline CiEstimate percentile_ci(const std::vector<double>& values) {
  CiEstimate ci;
  ci.mean = mean_of(values);
  ci.lo = quantile(values, 0.025);
  ci.hi = quantile(values, 0.975);
  return ci;
}

// Pool samples for (vignette, label) over a chosen multiset of participants.
inline std::vector<double> pooled_over(
    const std::map<std::string, std::map<std::string, std::vector<double>>>& by_label,
    const std::string& label, const std::vector<std::string>& participants) {
  std::vector<double> out;
  auto it = by_label.find(label);
  if (it == by_label.end()) return out;
  for (const auto& participant : participants) {
    auto pit = it->second.find(participant);
    if (pit == it->second.end()) continue;
    out.insert(out.end(), pit->second.begin(), pit->second.end());
  }
  return out;
}

// One aggregate number comparing two per-question sample pools under the
// chosen metric (wd/tvd: distance per question then type-mean; r2: squared
// correlation of per-question means within type, then type-mean).
template <typename LeftPool, typename RightPool>
double aggregate_metric(const JudgmentSet& reference, const VignetteCatalog& catalog,
                        Metric metric, LeftPool&& left_pool, RightPool&& right_pool) {
  std::vector<std::pair<QueryType, double>> distances;
  std::map<QueryType, std::pair<std::vector<double>, std::vector<double>>> means_by_type;

  for (const auto& [vignette_id, by_label] : reference.entries) {
    auto catalog_it = catalog.find(vignette_id);
    if (catalog_it == catalog.end())
      throw std::runtime_error("vignette '" + vignette_id + "' missing from the catalog");
    for (const auto& [label, _] : by_label) {
      std::vector<double> a = left_pool(vignette_id, label);
      std::vector<double> b = right_pool(vignette_id, label);
      if (a.empty() || b.empty()) continue;
      QueryType type = catalog_it->second.query_types.at(label);
      if (metric == Metric::R2) {
        means_by_type[type].first.push_back(mean_of(a));
        means_by_type[type].second.push_back(mean_of(b));
      } else {
        Histogram10 ha = bucketize(a);
        Histogram10 hb = bucketize(b);
        distances.emplace_back(type, metric == Metric::Wd ? wasserstein(ha, hb) : tvd(ha, hb));
      }
    }
  }

  if (metric == Metric::R2) {
    for (QueryType t : {QueryType::Constant, QueryType::Temporal, QueryType::Prediction})
      if (!means_by_type.count(t)) throw MissingQueryTypeError(t);
    double total = 0;
    for (const auto& [type, xy] : means_by_type) total += mean_r2(xy.first, xy.second);
    return total / static_cast<double>(means_by_type.size());
  }
  return aggregate(distances).mean_across_types;
}

}  // namespace detail

// Human-human noise ceiling: n_boot random 50-50 participant splits, metric
// between the pooled halves, aggregated; mean and percentile 95% CI over
// splits.
inline CiEstimate split_half_baseline(const JudgmentSet& human, const VignetteCatalog& catalog,
                                      Metric metric, int n_boot = 1000, std::uint64_t seed = 0) {
  std::map<std::string, std::vector<std::string>> participants;
  for (const auto& [vignette_id, _] : human.entries) {
    auto p = human.participants(vignette_id);
    if (p.size() < 4) throw TooFewParticipantsError(vignette_id, p.size());
    participants[vignette_id] = std::move(p);
  }

  msa::ppl::Rng rng(msa::ppl::derive_stream(seed, "split-half"));
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n_boot));
  for (int b = 0; b < n_boot; ++b) {
    std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>> halves;
    for (const auto& [vignette_id, pool] : participants) {
      std::vector<std::string> shuffled = pool;
      msa::ppl::deterministic_shuffle(shuffled, rng);
      std::size_t half = shuffled.size() / 2;
      halves[vignette_id] = {
          std::vector<std::string>(shuffled.begin(), shuffled.begin() + half),
          std::vector<std::string>(shuffled.begin() + half, shuffled.end())};
    }
    double value = detail::aggregate_metric(
        human, catalog, metric,
        [&](const std::string& vignette_id, const std::string& label) {
          return detail::pooled_over(human.entries.at(vignette_id), label,
                                     halves.at(vignette_id).first);
        },
        [&](const std::string& vignette_id, const std::string& label) {
          return detail::pooled_over(human.entries.at(vignette_id), label,
                                     halves.at(vignette_id).second);
        });
    values.push_back(value);
  }
  return detail::percentile_ci(values);
}

// Model-vs-human uncertainty: resample human participants with replacement,
// recompute the aggregate metric against the fixed model judgments.
inline CiEstimate bootstrap_model_human(const JudgmentSet& model, const JudgmentSet& human,
                                        const VignetteCatalog& catalog, Metric metric,
                                        int n_boot = 1000, std::uint64_t seed = 0) {
  std::map<std::string, std::vector<std::string>> participants;
  for (const auto& [vignette_id, _] : human.entries) {
    auto p = human.participants(vignette_id);
    if (p.size() < 2) throw TooFewParticipantsError(vignette_id, p.size());
    participants[vignette_id] = std::move(p);
  }

  msa::ppl::Rng rng(msa::ppl::derive_stream(seed, "bootstrap"));
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n_boot));
  for (int b = 0; b < n_boot; ++b) {
    std::map<std::string, std::vector<std::string>> resampled;
    for (const auto& [vignette_id, pool] : participants) {
      std::vector<std::string> draw;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        auto idx = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(pool.size()));
        if (idx >= pool.size()) idx = pool.size() - 1;
        draw.push_back(pool[idx]);
      }
      resampled[vignette_id] = std::move(draw);
    }
    double value = detail::aggregate_metric(
        model, catalog, metric,
        [&](const std::string& vignette_id, const std::string& label) {
          return model.pooled(vignette_id, label);
        },
        [&](const std::string& vignette_id, const std::string& label) -> std::vector<double> {
          auto it = human.entries.find(vignette_id);
          if (it == human.entries.end()) return {};
          return detail::pooled_over(it->second, label, resampled.at(vignette_id));
        });
    values.push_back(value);
  }
  return detail::percentile_ci(values);
}

}  // namespace msa::metrics
