#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "msa/olympics/vignette.hpp"

namespace msa::metrics {

using msa::olympics::QueryType;

enum class JudgmentSource { Human, Msa, Gold, LmDirect, LmCot };

inline const char* to_string(JudgmentSource s) {
  switch (s) {
    case JudgmentSource::Human: return "human";
    case JudgmentSource::Msa: return "msa";
    case JudgmentSource::Gold: return "gold";
    case JudgmentSource::LmDirect: return "lm_direct";
    default: return "lm_cot";
  }
}

inline JudgmentSource judgment_source_from_string(const std::string& s) {
  if (s == "human") return JudgmentSource::Human;
  if (s == "msa") return JudgmentSource::Msa;
  if (s == "gold") return JudgmentSource::Gold;
  if (s == "lm_direct") return JudgmentSource::LmDirect;
  if (s == "lm_cot") return JudgmentSource::LmCot;
  throw std::runtime_error("unknown judgment source '" + s + "'");
}

struct OutOfRangeError : std::runtime_error {
  explicit OutOfRangeError(double v)
      : std::runtime_error("judgment sample " + std::to_string(v) + " outside [0, 100]") {}
};

// Scalar judgments keyed by vignette, question, and participant. All samples
// live on the 0-100 slider scale.
struct JudgmentSet {
  JudgmentSource source = JudgmentSource::Human;
  // vignette -> question label -> participant -> samples
  std::map<std::string, std::map<std::string, std::map<std::string, std::vector<double>>>> entries;

  void add(const std::string& vignette_id, const std::string& label,
           const std::string& participant_id, std::vector<double> samples) {
    for (double s : samples)
      if (!(s >= 0.0 && s <= 100.0)) throw OutOfRangeError(s);
    auto& sink = entries[vignette_id][label][participant_id];
    sink.insert(sink.end(), samples.begin(), samples.end());
  }

  std::vector<std::string> participants(const std::string& vignette_id) const {
    std::map<std::string, bool> seen;
    auto it = entries.find(vignette_id);
    if (it == entries.end()) return {};
    for (const auto& [_, by_participant] : it->second)
      for (const auto& [participant, __] : by_participant) seen[participant] = true;
    std::vector<std::string> out;
    for (const auto& [participant, _] : seen) out.push_back(participant);
    return out;
  }

  // All samples for one question pooled across participants.
  std::vector<double> pooled(const std::string& vignette_id, const std::string& label) const {
    std::vector<double> out;
    const auto& by_participant = entries.at(vignette_id).at(label);
    for (const auto& [_, samples] : by_participant)
      out.insert(out.end(), samples.begin(), samples.end());
    return out;
  }
};

inline nlohmann::json to_json(const JudgmentSet& set) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [vignette, by_label] : set.entries)
    for (const auto& [label, by_participant] : by_label)
      for (const auto& [participant, samples] : by_participant)
        entries.push_back({{"vignette_id", vignette},
                           {"question_label", label},
                           {"participant_id", participant},
                           {"samples", samples}});
  return nlohmann::json{{"source", to_string(set.source)}, {"entries", entries}};
}

inline JudgmentSet judgment_set_from_json(const nlohmann::json& j) {
  JudgmentSet set;
  set.source = judgment_source_from_string(j.at("source").get<std::string>());
  for (const auto& e : j.at("entries"))
    set.add(e.at("vignette_id").get<std::string>(), e.at("question_label").get<std::string>(),
            e.at("participant_id").get<std::string>(), e.at("samples").get<std::vector<double>>());
  return set;
}

// Per-vignette metadata needed to aggregate: query types and sport.
struct VignetteInfo {
  std::map<std::string, QueryType> query_types;  // label -> type
  std::string sport;
};

using VignetteCatalog = std::map<std::string, VignetteInfo>;

inline VignetteCatalog catalog_from_vignettes(
    const std::vector<std::pair<std::string, msa::olympics::Vignette>>& vignettes) {
  VignetteCatalog catalog;
  for (const auto& [id, v] : vignettes) {
    VignetteInfo info;
    info.sport = msa::olympics::to_string(v.sport);
    for (const auto& q : v.questions) info.query_types[q.label] = q.query_type;
    catalog[id] = info;
  }
  return catalog;
}

}  // namespace msa::metrics
