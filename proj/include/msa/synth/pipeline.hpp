#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "msa/lm/backend.hpp"
#include "msa/olympics/vignette.hpp"
#include "msa/ppl/parser.hpp"
#include "msa/ppl/rejection.hpp"
#include "msa/ppl/serialize.hpp"
#include "msa/synth/config.hpp"
#include "msa/synth/extract.hpp"
#include "msa/synth/fixtures.hpp"
#include "msa/util/program_assembly.hpp"

namespace msa::synth {

struct StageFailureError : std::runtime_error {
  StageFailureError(Stage stage, std::vector<std::string> diagnostics)
      : std::runtime_error(std::string("stage '") + to_string(stage) + "' failed after " +
                           std::to_string(diagnostics.size()) + " rejected candidate(s); first: " +
                           (diagnostics.empty() ? "<none>" : diagnostics.front())),
        stage(stage),
        diagnostics(std::move(diagnostics)) {}
  Stage stage;
  std::vector<std::string> diagnostics;
};

struct StageCandidate {
  std::string text;
  double score = 0;
};

struct StageOutput {
  Stage stage = Stage::Parse;
  std::vector<StageCandidate> candidates;  // well-formed candidates only
  std::size_t selected_index = 0;
  std::string prompt_fingerprint;
  std::vector<std::string> rejected;  // diagnostics for malformed candidates/retries

  const std::string& selected_text() const { return candidates.at(selected_index).text; }
};

struct SynthesizedModel {
  std::vector<std::string> pi_o;                            // condition expressions, verbatim
  std::vector<std::pair<std::string, std::string>> pi_q;    // (label, query expression)
  std::string b_aug;
  std::vector<ConceptNode> graph;
  std::string pi_b;                                         // definition block
  msa::ppl::SourceProgram combined;
  msa::ppl::Program combined_ast;
};

struct ParticipantRun {
  std::string participant_id;
  std::string vignette_id;
  SynthesizedModel model;
  msa::ppl::PosteriorEstimate posterior;
  std::vector<msa::lm::Message> transcript;
  StageOutput parse_output;
  StageOutput background_output;
};

// Scenario rendering shared by prompts and fixtures: background,
// observations (commentary last, when present), and the question palette.
inline std::string render_scenario(const msa::olympics::Vignette& v) {
  std::string out = "SPORT BACKGROUND:\n" + v.background + "\n\nOBSERVATIONS:\n";
  int n = 1;
  for (const auto& obs : v.observations) out += std::to_string(n++) + ". " + obs + "\n";
  if (v.commentary) out += std::to_string(n++) + ". " + *v.commentary + "\n";
  out += "\nQUESTIONS:\n";
  for (const auto& q : v.questions) out += q.label + ": " + q.text + "\n";
  return out;
}

inline std::string frame_name_for(Stage stage) {
  switch (stage) {
    case Stage::Parse: return "generate-parsing";
    case Stage::Background: return "generate-informal-background-knowledge-and-dependency-graph";
    case Stage::Model: return "generate-model";
    default: throw std::runtime_error("inference stage has no frame prompt");
  }
}

inline std::string judge_frame_name_for(Stage stage) {
  switch (stage) {
    case Stage::Parse: return "score-parsing";
    case Stage::Background: return "score-informal-background-and-dependency-graph";
    default: throw std::runtime_error("no judge frame for this stage");
  }
}

// Frame prompt for the stage with the held-out, seed-shuffled examples and
// the scenario filled in. Examples from the vignette's own sport are
// excluded; prior-stage tokens are left for the stage functions to fill.
inline std::string assemble_prompt(Stage stage, const msa::olympics::Vignette& vignette,
                                   const PipelineConfig& config, const FixtureLibrary& library,
                                   std::uint64_t seed) {
  std::string own = sport_fixture_id(vignette.sport);
  std::vector<std::string> pool;
  for (const auto& id : config.example_pool) {
    library.example(id);  // missing fixture fails loudly
    if (id != own) pool.push_back(id);
  }
  msa::ppl::Rng rng(msa::ppl::derive_stream(seed, std::string("examples-") + to_string(stage)));
  msa::ppl::deterministic_shuffle(pool, rng);

  std::string injected;
  for (const auto& id : pool) {
    injected += library.example(id).text_through(stage);
    if (!injected.empty() && injected.back() != '\n') injected += '\n';
    injected += '\n';
  }

  std::string prompt = library.frame(frame_name_for(stage));
  prompt = replace_token(std::move(prompt), kExamplesToken, injected);
  prompt = replace_token(std::move(prompt), kScenarioToken, render_scenario(vignette));
  return prompt;
}

namespace detail {

inline std::string fingerprint(const std::string& text) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(msa::ppl::fnv1a64(text)));
  return std::string(buf);
}

struct LmSession {
  msa::lm::Backend& backend;
  const PipelineConfig& config;
  std::vector<msa::lm::Message>* transcript = nullptr;

  std::vector<std::string> complete(const std::string& system_prompt, const std::string& user_prompt,
                                    double temperature, int n, const std::string& tag) {
    msa::lm::CompletionRequest request;
    if (!system_prompt.empty()) request.messages.push_back({"system", system_prompt});
    request.messages.push_back({"user", user_prompt});
    request.temperature = temperature;
    request.n_candidates = n;
    request.max_tokens = config.max_tokens;
    request.model_name = config.model_name;
    request.request_tag = tag;
    auto completions = backend.complete(request);
    if (transcript) {
      for (const auto& m : request.messages) transcript->push_back(m);
      for (const auto& c : completions) transcript->push_back({"assistant", c});
    }
    return completions;
  }
};

}  // namespace detail

// LM-judge scoring of candidates: integer 0-100 per candidate, 0 on
// unparseable judge output; order-aligned with the input.
inline std::vector<double> score_candidates(Stage stage, const std::vector<std::string>& candidates,
                                            const std::string& context,
                                            const FixtureLibrary& library,
                                            detail::LmSession& session, const std::string& tag) {
  std::vector<double> scores;
  const std::string& frame = library.frame(judge_frame_name_for(stage));
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::string prompt = replace_token(frame, kScenarioToken, context);
    prompt = replace_token(std::move(prompt), kCandidateToken, candidates[i]);
    auto completions = session.complete("", prompt, session.config.judge_temperature, 1,
                                        tag + "/judge/" + std::to_string(i));
    scores.push_back(judge_score(completions.at(0)));
  }
  return scores;
}

inline std::size_t argmax_lowest_index(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

struct ParseStageResult {
  StageOutput output;
  ExtractedParse parse;
};

inline ParseStageResult stage_parse(const msa::olympics::Vignette& vignette,
                                    const PipelineConfig& config, const FixtureLibrary& library,
                                    detail::LmSession& session, std::uint64_t seed,
                                    const std::string& tag_prefix) {
  std::string prompt = assemble_prompt(Stage::Parse, vignette, config, library, seed);
  const std::string& system_prompt = library.frame("system-prompt");

  StageOutput output;
  output.stage = Stage::Parse;
  output.prompt_fingerprint = detail::fingerprint(prompt);

  for (int round = 0; round <= config.retry_limit; ++round) {
    auto completions = session.complete(system_prompt, prompt, config.parse_temperature,
                                        config.k_parse,
                                        tag_prefix + "/parse/" + std::to_string(round));
    std::vector<std::string> valid_texts;
    std::vector<ExtractedParse> valid_parses;
    for (const auto& completion : completions) {
      try {
        valid_parses.push_back(extract_parse_block(completion, vignette));
        valid_texts.push_back(completion);
      } catch (const ExtractError& e) {
        output.rejected.push_back(e.what());
      }
    }
    if (valid_texts.empty()) continue;

    std::vector<double> scores(valid_texts.size(), 0.0);
    if (valid_texts.size() > 1)
      scores = score_candidates(Stage::Parse, valid_texts, render_scenario(vignette), library,
                                session, tag_prefix);
    for (std::size_t i = 0; i < valid_texts.size(); ++i)
      output.candidates.push_back({valid_texts[i], scores[i]});
    std::size_t selected = argmax_lowest_index(scores);
    output.selected_index = selected;
    return ParseStageResult{std::move(output), std::move(valid_parses[selected])};
  }
  throw StageFailureError(Stage::Parse, output.rejected);
}

// The selected parse rendered back into the stage block format, used to
// condition later stages.
inline std::string render_parse(const ExtractedParse& parse) {
  std::string out = "CONDITIONS:\n";
  for (const auto& c : parse.conditions) out += c + "\n";
  out += "QUERIES:\n";
  for (const auto& [label, expr] : parse.queries) out += label + ": " + expr + "\n";
  return out;
}

struct BackgroundStageResult {
  StageOutput output;
  ExtractedBackground background;
};

inline BackgroundStageResult stage_background(const msa::olympics::Vignette& vignette,
                                              const ExtractedParse& parse,
                                              const PipelineConfig& config,
                                              const FixtureLibrary& library,
                                              detail::LmSession& session, std::uint64_t seed,
                                              const std::string& tag_prefix) {
  std::string prompt = assemble_prompt(Stage::Background, vignette, config, library, seed);
  prompt = replace_token(std::move(prompt), kSelectedParseToken, render_parse(parse));
  const std::string& system_prompt = library.frame("system-prompt");

  StageOutput output;
  output.stage = Stage::Background;
  output.prompt_fingerprint = detail::fingerprint(prompt);

  for (int round = 0; round <= config.retry_limit; ++round) {
    auto completions =
        session.complete(system_prompt, prompt, config.relevance_temperature, config.k_relevance,
                         tag_prefix + "/background/" + std::to_string(round));
    std::vector<std::string> valid_texts;
    std::vector<ExtractedBackground> valid_backgrounds;
    for (const auto& completion : completions) {
      try {
        valid_backgrounds.push_back(extract_background_block(completion));
        valid_texts.push_back(completion);
      } catch (const ExtractError& e) {
        output.rejected.push_back(e.what());
      }
    }
    if (valid_texts.empty()) continue;

    std::vector<double> scores(valid_texts.size(), 0.0);
    if (valid_texts.size() > 1)
      scores = score_candidates(Stage::Background, valid_texts,
                                render_scenario(vignette) + "\n" + render_parse(parse), library,
                                session, tag_prefix);
    for (std::size_t i = 0; i < valid_texts.size(); ++i)
      output.candidates.push_back({valid_texts[i], scores[i]});
    std::size_t selected = argmax_lowest_index(scores);
    output.selected_index = selected;
    return BackgroundStageResult{std::move(output), std::move(valid_backgrounds[selected])};
  }
  throw StageFailureError(Stage::Background, output.rejected);
}

inline std::string render_background(const ExtractedBackground& background) {
  std::string out = background.b_aug + "\n<START_SCRATCHPAD>\n";
  for (const auto& node : background.graph) {
    out += "- " + node.concept_name + "\n";
    if (!node.depends_on.empty()) {
      out += "  - depends on: ";
      for (std::size_t i = 0; i < node.depends_on.size(); ++i) {
        if (i) out += ", ";
        out += node.depends_on[i];
      }
      out += "\n";
    }
  }
  return out;
}

// Model stage: samples definition candidates one at a time and returns the
// first that passes the executability gate (parses, no free functions, and
// completes a smoke inference run answering every label).
inline SynthesizedModel stage_model(const msa::olympics::Vignette& vignette,
                                    const ExtractedParse& parse,
                                    const ExtractedBackground& background,
                                    const PipelineConfig& config, const FixtureLibrary& library,
                                    detail::LmSession& session, std::uint64_t seed,
                                    const std::string& tag_prefix) {
  std::string prompt = assemble_prompt(Stage::Model, vignette, config, library, seed);
  prompt = replace_token(std::move(prompt), kSelectedParseToken, render_parse(parse));
  prompt = replace_token(std::move(prompt), kSelectedBackgroundToken, render_background(background));

  std::vector<std::string> diagnostics;
  for (int attempt = 0; attempt < config.k_program_attempts; ++attempt) {
    auto completions = session.complete("", prompt, config.program_temperature, 1,
                                        tag_prefix + "/model/" + std::to_string(attempt));
    std::string pi_b = strip_code_fences(completions.at(0));

    SynthesizedModel model;
    model.pi_o = parse.conditions;
    model.pi_q = parse.queries;
    model.b_aug = background.b_aug;
    model.graph = background.graph;
    model.pi_b = pi_b;
    model.combined.origin = msa::ppl::ProgramOrigin::Synthesized;
    model.combined.text = msa::util::assemble_model_program(pi_b, model.pi_o, model.pi_q);

    auto parsed = msa::ppl::parse_program(model.combined);
    if (!parsed.ok()) {
      diagnostics.push_back("candidate " + std::to_string(attempt) +
                            ": combined program does not parse: " + parsed.diagnostic->to_string());
      continue;
    }
    auto free = msa::ppl::free_functions_of_program(*parsed.value);
    if (!free.empty()) {
      std::string names;
      for (const auto& f : free) names += (names.empty() ? "" : ", ") + f;
      diagnostics.push_back("candidate " + std::to_string(attempt) + ": free functions: " + names);
      continue;
    }
    try {
      msa::ppl::RejectionOptions smoke;
      smoke.n_samples = config.smoke_samples;
      smoke.seed = msa::ppl::derive_stream(seed, "smoke-" + std::to_string(attempt));
      smoke.max_attempts_per_sample = config.smoke_max_attempts;
      smoke.limits.max_steps = config.smoke_max_steps_per_attempt;
      auto estimate = msa::ppl::run_rejection(*parsed.value, smoke);
      for (const auto& q : vignette.questions)
        if (!estimate.queries.count(q.label))
          throw msa::ppl::EvalError("smoke run answered no query labeled '" + q.label + "'");
    } catch (const std::exception& e) {
      diagnostics.push_back("candidate " + std::to_string(attempt) + ": smoke run failed: " +
                            e.what());
      continue;
    }
    model.combined_ast = std::move(*parsed.value);
    return model;
  }
  throw StageFailureError(Stage::Model, diagnostics);
}

// One simulated participant: all four stages, then the full-budget
// rejection run.
inline ParticipantRun simulate_participant(const msa::olympics::Vignette& vignette,
                                           const std::string& vignette_id,
                                           const std::string& participant_id,
                                           const PipelineConfig& config,
                                           const FixtureLibrary& library,
                                           msa::lm::Backend& backend, std::uint64_t seed) {
  config.validate();
  ParticipantRun run;
  run.participant_id = participant_id;
  run.vignette_id = vignette_id;
  detail::LmSession session{backend, config, &run.transcript};
  std::string tag_prefix = vignette_id + "/" + participant_id;

  auto parse = stage_parse(vignette, config, library, session,
                           msa::ppl::derive_stream(seed, "parse"), tag_prefix);
  auto background = stage_background(vignette, parse.parse, config, library, session,
                                     msa::ppl::derive_stream(seed, "background"), tag_prefix);
  run.model = stage_model(vignette, parse.parse, background.background, config, library, session,
                          msa::ppl::derive_stream(seed, "model"), tag_prefix);
  run.parse_output = std::move(parse.output);
  run.background_output = std::move(background.output);

  msa::ppl::RejectionOptions options;
  options.n_samples = config.k_samples;
  options.seed = msa::ppl::derive_stream(seed, "inference");
  options.max_attempts_per_sample = config.max_attempts_per_sample;
  run.posterior = msa::ppl::run_rejection(run.model.combined_ast, options);

  for (const auto& q : vignette.questions)
    if (!run.posterior.queries.count(q.label))
      throw msa::ppl::EvalError("posterior answered no query labeled '" + q.label + "'");
  return run;
}

struct RunOutcome {
  std::string vignette_id;
  std::string participant_id;
  bool ok = false;
  std::string error;
  std::optional<ParticipantRun> run;
};

// N participants per vignette with derived seeds; failures are isolated per
// participant; jobs > 1 fans participants out over a thread pool.
inline std::vector<RunOutcome> run_experiment(
    const std::vector<std::pair<std::string, msa::olympics::Vignette>>& vignettes,
    const PipelineConfig& config, const FixtureLibrary& library, msa::lm::Backend& backend,
    std::uint64_t seed, int jobs = 1) {
  struct Job {
    const msa::olympics::Vignette* vignette;
    std::string vignette_id;
    std::string participant_id;
    std::uint64_t seed;
  };
  std::vector<Job> jobs_list;
  for (const auto& [id, vignette] : vignettes)
    for (int p = 0; p < config.n_participants; ++p)
      jobs_list.push_back(Job{&vignette, id, "p" + std::to_string(p),
                              msa::ppl::derive_stream(seed, id + "/p" + std::to_string(p))});

  std::vector<RunOutcome> outcomes(jobs_list.size());
  auto work = [&](std::size_t i) {
    const Job& job = jobs_list[i];
    RunOutcome& outcome = outcomes[i];
    outcome.vignette_id = job.vignette_id;
    outcome.participant_id = job.participant_id;
    try {
      outcome.run = simulate_participant(*job.vignette, job.vignette_id, job.participant_id,
                                         config, library, backend, job.seed);
      outcome.ok = true;
    } catch (const std::exception& e) {
      outcome.error = e.what();
    }
  };

  if (jobs <= 1) {
    for (std::size_t i = 0; i < jobs_list.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = cursor.fetch_add(1);
          if (i >= jobs_list.size()) return;
          work(i);
        }
      });
    for (auto& t : pool) t.join();
  }
  return outcomes;
}

// --- ParticipantRun serialization ---

inline nlohmann::json to_json(const SynthesizedModel& model) {
  nlohmann::json graph = nlohmann::json::array();
  for (const auto& node : model.graph)
    graph.push_back({{"concept", node.concept_name}, {"depends_on", node.depends_on}});
  nlohmann::json queries = nlohmann::json::array();
  for (const auto& [label, expr] : model.pi_q)
    queries.push_back({{"label", label}, {"text", expr}});
  return nlohmann::json{{"pi_o", model.pi_o},
                        {"pi_q", queries},
                        {"b_aug", model.b_aug},
                        {"graph", graph},
                        {"pi_b", model.pi_b},
                        {"combined", model.combined.text}};
}

inline nlohmann::json to_json(const ParticipantRun& run) {
  nlohmann::json transcript = nlohmann::json::array();
  for (const auto& m : run.transcript) transcript.push_back({{"role", m.role}, {"text", m.text}});
  return nlohmann::json{{"participant_id", run.participant_id},
                        {"vignette_id", run.vignette_id},
                        {"model", to_json(run.model)},
                        {"posterior", msa::ppl::to_json(run.posterior)},
                        {"transcript", transcript}};
}

}  // namespace msa::synth
