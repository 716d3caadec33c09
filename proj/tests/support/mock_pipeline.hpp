#pragma once

// Builders for deterministic mock-backend scripts that drive the full
// pipeline: stage responses are derived from the gold machinery so the
// executability gate sees real, runnable content.

#include <string>

#include "msa/olympics/gold.hpp"
#include "msa/olympics/vignette.hpp"
#include "msa/synth/fixtures.hpp"

namespace msa::testing {

inline std::string mock_parse_response(const msa::olympics::Vignette& v,
                                       const std::string& commentary_condition = "") {
  std::string out = "CONDITIONS:\n";
  for (const auto& c : msa::olympics::encode_all_conditions(v)) out += c + "\n";
  if (v.commentary) out += commentary_condition + "\n";
  out += "QUERIES:\n";
  for (const auto& [label, q] : msa::olympics::encode_all_queries(v)) out += label + ": " + q + "\n";
  return out;
}

inline std::string mock_background_response(const msa::synth::FixtureLibrary& library,
                                            msa::olympics::Sport sport) {
  const auto& example = library.example(msa::synth::sport_fixture_id(sport));
  std::string informal = example.section(msa::synth::kInformalMarker);
  std::string graph = example.section(msa::synth::kScratchpadMarker);
  return informal + "\n<START_SCRATCHPAD>\n" + graph;
}

inline std::string mock_model_response(msa::olympics::Sport sport,
                                       const std::string& extra_defs = "") {
  return msa::olympics::gold_definitions(sport) + extra_defs;
}

// Queues one participant's worth of stage responses onto a mock backend
// (parse, background x k_relevance, model).
inline void script_participant(msa::lm::MockBackend& mock,
                               const msa::synth::FixtureLibrary& library,
                               const msa::olympics::Vignette& v, int k_relevance,
                               const std::string& commentary_condition = "",
                               const std::string& extra_defs = "") {
  mock.enqueue(mock_parse_response(v, commentary_condition));
  std::string background = mock_background_response(library, v.sport);
  for (int i = 0; i < k_relevance; ++i) mock.enqueue(background);
  mock.enqueue(mock_model_response(v.sport, extra_defs));
}

}  // namespace msa::testing
