#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "msa/lm/backend.hpp"
#include "msa/olympics/vignette.hpp"
#include "msa/synth/config.hpp"
#include "msa/synth/extract.hpp"
#include "msa/synth/fixtures.hpp"

namespace msa::synth {

struct BaselineParseFailureError : std::runtime_error {
  BaselineParseFailureError(const std::string& label, int judgment)
      : std::runtime_error("baseline slot " + label + "#" + std::to_string(judgment) +
                           " produced no in-range number after 3 re-asks") {}
};

enum class BaselineMode { Direct, Cot };

inline const char* to_string(BaselineMode m) {
  return m == BaselineMode::Direct ? "direct" : "cot";
}

inline BaselineMode baseline_mode_from_string(const std::string& s) {
  if (s == "direct") return BaselineMode::Direct;
  if (s == "cot") return BaselineMode::Cot;
  throw std::runtime_error("unknown baseline mode '" + s + "' (expected direct or cot)");
}

struct BaselineRun {
  std::string vignette_id;
  std::string participant_id;
  BaselineMode mode = BaselineMode::Direct;
  std::map<std::string, std::vector<double>> answers;  // label -> 5 judgments
  std::vector<msa::lm::Message> transcript;
};

// One simulated participant: 5 sequential scalar judgments for each of the 8
// questions at temperature 1.0, each conditioned on all previous answers. In
// cot mode the completion's free-text reasoning stays in the transcript; the
// scalar is the first number in [0, 100] either way.
inline BaselineRun run_baseline(BaselineMode mode, const msa::olympics::Vignette& vignette,
                                const std::string& vignette_id, const std::string& participant_id,
                                const FixtureLibrary& library, msa::lm::Backend& backend,
                                std::uint64_t seed, const PipelineConfig& config = {}) {
  BaselineRun run;
  run.vignette_id = vignette_id;
  run.participant_id = participant_id;
  run.mode = mode;

  std::string frame = library.frame(mode == BaselineMode::Direct ? "lm-direct" : "lm-cot");
  std::string instructions = replace_token(frame, kScenarioToken,
                                           [&] {
                                             std::string s = "SPORT BACKGROUND:\n" + vignette.background +
                                                             "\n\nOBSERVATIONS:\n";
                                             int n = 1;
                                             for (const auto& obs : vignette.observations)
                                               s += std::to_string(n++) + ". " + obs + "\n";
                                             if (vignette.commentary)
                                               s += std::to_string(n++) + ". " + *vignette.commentary + "\n";
                                             return s;
                                           }());

  std::vector<msa::lm::Message> conversation;
  conversation.push_back({"system", instructions});
  run.transcript.push_back(conversation.back());

  int slot = 0;
  for (const auto& question : vignette.questions) {
    for (int judgment = 1; judgment <= 5; ++judgment, ++slot) {
      std::string ask = "Question " + question.label + ": " + question.text + "\n";
      if (mode == BaselineMode::Cot && judgment == 1)
        ask += "Briefly reason about the evidence first, then ";
      else
        ask += "Please ";
      ask += "give judgment " + std::to_string(judgment) +
             " of 5 as a number between 0 and 100.";

      bool answered = false;
      for (int attempt = 0; attempt <= 3 && !answered; ++attempt) {
        msa::lm::CompletionRequest request;
        request.messages = conversation;
        request.messages.push_back({"user", ask});
        request.temperature = 1.0;
        request.n_candidates = 1;
        request.max_tokens = config.max_tokens;
        request.model_name = config.model_name;
        request.request_tag = vignette_id + "/" + participant_id + "/baseline/" +
                              question.label + "/" + std::to_string(judgment) + "/" +
                              std::to_string(attempt);
        request.seed = msa::ppl::derive_stream(seed, request.request_tag);
        auto completions = backend.complete(request);
        const std::string& completion = completions.at(0);
        run.transcript.push_back({"user", ask});
        run.transcript.push_back({"assistant", completion});
        auto number = first_number_in_range(completion);
        if (!number) continue;  // re-ask; the failed completion stays out of the conversation
        run.answers[question.label].push_back(*number);
        conversation.push_back({"user", ask});
        conversation.push_back({"assistant", completion});
        answered = true;
      }
      if (!answered) throw BaselineParseFailureError(question.label, judgment);
    }
  }
  return run;
}

inline nlohmann::json to_json(const BaselineRun& run) {
  nlohmann::json answers = nlohmann::json::object();
  for (const auto& [label, values] : run.answers) answers[label] = values;
  nlohmann::json transcript = nlohmann::json::array();
  for (const auto& m : run.transcript) transcript.push_back({{"role", m.role}, {"text", m.text}});
  return nlohmann::json{{"vignette_id", run.vignette_id},
                        {"participant_id", run.participant_id},
                        {"mode", to_string(run.mode)},
                        {"answers", answers},
                        {"transcript", transcript}};
}

inline BaselineRun baseline_run_from_json(const nlohmann::json& j) {
  BaselineRun run;
  run.vignette_id = j.at("vignette_id").get<std::string>();
  run.participant_id = j.at("participant_id").get<std::string>();
  run.mode = baseline_mode_from_string(j.at("mode").get<std::string>());
  for (const auto& [label, values] : j.at("answers").items())
    run.answers[label] = values.get<std::vector<double>>();
  return run;
}

}  // namespace msa::synth
