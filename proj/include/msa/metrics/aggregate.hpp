#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "msa/metrics/distances.hpp"
#include "msa/metrics/judgments.hpp"
#include "msa/ppl/pretty.hpp"

namespace msa::metrics {

struct MissingQueryTypeError : std::runtime_error {
  explicit MissingQueryTypeError(QueryType t)
      : std::runtime_error(std::string("aggregation input is missing query type '") +
                           msa::olympics::to_string(t) + "'") {}
};

enum class Metric { Wd, Tvd, R2 };

inline const char* to_string(Metric m) {
  switch (m) {
    case Metric::Wd: return "wd";
    case Metric::Tvd: return "tvd";
    default: return "r2";
  }
}

inline Metric metric_from_string(const std::string& s) {
  if (s == "wd") return Metric::Wd;
  if (s == "tvd") return Metric::Tvd;
  if (s == "r2") return Metric::R2;
  throw std::runtime_error("unknown metric '" + s + "' (expected wd, tvd, or r2)");
}

struct AggregateResult {
  std::map<QueryType, double> by_type;
  double mean_across_types = 0;
};

// Mean within each query type, then unweighted mean across the three types.
inline AggregateResult aggregate(const std::vector<std::pair<QueryType, double>>& values) {
  std::map<QueryType, std::pair<double, int>> sums;
  for (const auto& [type, value] : values) {
    sums[type].first += value;
    sums[type].second += 1;
  }
  for (QueryType t : {QueryType::Constant, QueryType::Temporal, QueryType::Prediction})
    if (!sums.count(t)) throw MissingQueryTypeError(t);
  AggregateResult out;
  double total = 0;
  for (const auto& [type, sum] : sums) {
    double mean = sum.first / sum.second;
    out.by_type[type] = mean;
    total += mean;
  }
  out.mean_across_types = total / static_cast<double>(sums.size());
  return out;
}

struct CiEstimate {
  double mean = 0;
  double lo = 0;
  double hi = 0;
  double level = 0.95;
};

struct PerQuestionRow {
  std::string vignette_id;
  std::string question_label;
  QueryType query_type = QueryType::Constant;
  std::string sport;
  double wd = 0;
  double tvd = 0;
  double human_mean = 0;
  double model_mean = 0;
};

struct MetricReport {
  std::string model_source;
  std::vector<PerQuestionRow> per_question;
  std::map<Metric, AggregateResult> aggregates;                      // across all vignettes
  std::map<std::string, std::map<Metric, AggregateResult>> by_sport; // sport -> aggregates
  std::map<Metric, double> r2_by_type_mean;                          // r2 handled on means
  std::map<std::string, CiEstimate> cis;                             // e.g. "wd_bootstrap", "wd_split_half"
};

// Distributional + correlational comparison of one model source against the
// pooled human judgments, per question.
inline std::vector<PerQuestionRow> per_question_rows(const JudgmentSet& model,
                                                     const JudgmentSet& human,
                                                     const VignetteCatalog& catalog) {
  std::vector<PerQuestionRow> rows;
  for (const auto& [vignette_id, by_label] : model.entries) {
    auto human_it = human.entries.find(vignette_id);
    if (human_it == human.entries.end()) continue;
    auto catalog_it = catalog.find(vignette_id);
    if (catalog_it == catalog.end())
      throw std::runtime_error("vignette '" + vignette_id + "' missing from the catalog");
    for (const auto& [label, _] : by_label) {
      if (!human_it->second.count(label)) continue;
      PerQuestionRow row;
      row.vignette_id = vignette_id;
      row.question_label = label;
      row.sport = catalog_it->second.sport;
      auto type_it = catalog_it->second.query_types.find(label);
      if (type_it == catalog_it->second.query_types.end())
        throw std::runtime_error("question '" + label + "' missing from catalog for vignette '" +
                                 vignette_id + "'");
      row.query_type = type_it->second;
      auto model_samples = model.pooled(vignette_id, label);
      auto human_samples = human.pooled(vignette_id, label);
      Histogram10 hm = bucketize(model_samples);
      Histogram10 hh = bucketize(human_samples);
      row.wd = wasserstein(hm, hh);
      row.tvd = tvd(hm, hh);
      row.human_mean = mean_of(human_samples);
      row.model_mean = mean_of(model_samples);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// R^2 between mean judgments, computed within each query type over all
// (vignette, question) pairs, then averaged across types.
inline AggregateResult r2_over_rows(const std::vector<PerQuestionRow>& rows) {
  std::map<QueryType, std::pair<std::vector<double>, std::vector<double>>> by_type;
  for (const auto& row : rows) {
    by_type[row.query_type].first.push_back(row.model_mean);
    by_type[row.query_type].second.push_back(row.human_mean);
  }
  for (QueryType t : {QueryType::Constant, QueryType::Temporal, QueryType::Prediction})
    if (!by_type.count(t)) throw MissingQueryTypeError(t);
  AggregateResult out;
  double total = 0;
  for (const auto& [type, xy] : by_type) {
    double r2 = mean_r2(xy.first, xy.second);
    out.by_type[type] = r2;
    total += r2;
  }
  out.mean_across_types = total / static_cast<double>(by_type.size());
  return out;
}

inline nlohmann::json to_json(const AggregateResult& a) {
  nlohmann::json by_type = nlohmann::json::object();
  for (const auto& [type, value] : a.by_type) by_type[msa::olympics::to_string(type)] = value;
  return nlohmann::json{{"by_query_type", by_type}, {"mean_across_types", a.mean_across_types}};
}

inline nlohmann::json to_json(const CiEstimate& ci) {
  return nlohmann::json{{"mean", ci.mean}, {"lo", ci.lo}, {"hi", ci.hi}, {"level", ci.level}};
}

inline nlohmann::json to_json(const MetricReport& report) {
  nlohmann::json per_question = nlohmann::json::array();
  for (const auto& row : report.per_question)
    per_question.push_back({{"vignette_id", row.vignette_id},
                            {"question_label", row.question_label},
                            {"query_type", msa::olympics::to_string(row.query_type)},
                            {"sport", row.sport},
                            {"wd", row.wd},
                            {"tvd", row.tvd},
                            {"human_mean", row.human_mean},
                            {"model_mean", row.model_mean}});
  nlohmann::json aggregates = nlohmann::json::object();
  for (const auto& [metric, result] : report.aggregates) aggregates[to_string(metric)] = to_json(result);
  nlohmann::json by_sport = nlohmann::json::object();
  for (const auto& [sport, metrics] : report.by_sport) {
    nlohmann::json entry = nlohmann::json::object();
    for (const auto& [metric, result] : metrics) entry[to_string(metric)] = to_json(result);
    by_sport[sport] = entry;
  }
  nlohmann::json cis = nlohmann::json::object();
  for (const auto& [name, ci] : report.cis) cis[name] = to_json(ci);
  return nlohmann::json{{"model_source", report.model_source},
                        {"per_question", per_question},
                        {"aggregates", aggregates},
                        {"by_sport", by_sport},
                        {"cis", cis}};
}

// One CSV row per vignette x question.
inline std::string to_csv(const MetricReport& report) {
  std::string out = "vignette_id,question_label,query_type,sport,wd,tvd,human_mean,model_mean\n";
  for (const auto& row : report.per_question) {
    out += row.vignette_id + "," + row.question_label + "," +
           msa::olympics::to_string(row.query_type) + "," + row.sport + "," +
           msa::ppl::format_number(row.wd) + "," + msa::ppl::format_number(row.tvd) + "," +
           msa::ppl::format_number(row.human_mean) + "," + msa::ppl::format_number(row.model_mean) +
           "\n";
  }
  return out;
}

}  // namespace msa::metrics
