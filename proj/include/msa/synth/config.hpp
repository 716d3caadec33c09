#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace msa::synth {

// Stage budgets and temperatures. Defaults are the paper configuration for
// experiments 1 and 2; e3_defaults() switches to the experiment-3 budget.
struct PipelineConfig {
  int k_parse = 1;
  double parse_temperature = 0.2;
  int k_relevance = 8;
  double relevance_temperature = 0.5;
  int k_program_attempts = 5;
  double program_temperature = 0.2;
  std::uint64_t k_samples = 1000;
  int n_participants = 10;
  std::uint64_t max_attempts_per_sample = 1'000'000;
  std::vector<std::string> example_pool = {"tug-of-war", "canoe-racing", "biathlon", "diving",
                                           "exam"};
  int retry_limit = 5;
  std::uint64_t smoke_samples = 10;
  std::uint64_t smoke_max_attempts = 50'000;
  std::uint64_t smoke_max_steps_per_attempt = 2'000'000;
  int max_tokens = 3072;
  double judge_temperature = 0.0;
  std::string model_name;  // empty = backend default

  static PipelineConfig e1_defaults() { return {}; }
  static PipelineConfig e2_defaults() { return {}; }
  static PipelineConfig e3_defaults() {
    PipelineConfig c;
    c.k_samples = 500;
    c.example_pool = {"tug-of-war", "canoe-racing", "biathlon", "diving"};
    return c;
  }

  void validate() const {
    if (k_parse < 1 || k_relevance < 1 || k_program_attempts < 1 || n_participants < 1)
      throw std::runtime_error("pipeline config: counts must be >= 1");
    for (double t : {parse_temperature, relevance_temperature, program_temperature,
                     judge_temperature})
      if (t < 0 || t > 2) throw std::runtime_error("pipeline config: temperatures must be in [0, 2]");
  }
};

inline nlohmann::json to_json(const PipelineConfig& c) {
  return nlohmann::json{{"k_parse", c.k_parse},
                        {"parse_temperature", c.parse_temperature},
                        {"k_relevance", c.k_relevance},
                        {"relevance_temperature", c.relevance_temperature},
                        {"k_program_attempts", c.k_program_attempts},
                        {"program_temperature", c.program_temperature},
                        {"k_samples", c.k_samples},
                        {"n_participants", c.n_participants},
                        {"max_attempts_per_sample", c.max_attempts_per_sample},
                        {"example_pool", c.example_pool},
                        {"retry_limit", c.retry_limit},
                        {"smoke_samples", c.smoke_samples},
                        {"smoke_max_attempts", c.smoke_max_attempts},
                        {"max_tokens", c.max_tokens},
                        {"judge_temperature", c.judge_temperature},
                        {"model_name", c.model_name}};
}

inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j,
                                                PipelineConfig base = {}) {
  PipelineConfig c = base;
  if (j.contains("k_parse")) c.k_parse = j.at("k_parse").get<int>();
  if (j.contains("parse_temperature")) c.parse_temperature = j.at("parse_temperature").get<double>();
  if (j.contains("k_relevance")) c.k_relevance = j.at("k_relevance").get<int>();
  if (j.contains("relevance_temperature"))
    c.relevance_temperature = j.at("relevance_temperature").get<double>();
  if (j.contains("k_program_attempts"))
    c.k_program_attempts = j.at("k_program_attempts").get<int>();
  if (j.contains("program_temperature"))
    c.program_temperature = j.at("program_temperature").get<double>();
  if (j.contains("k_samples")) c.k_samples = j.at("k_samples").get<std::uint64_t>();
  if (j.contains("n_participants")) c.n_participants = j.at("n_participants").get<int>();
  if (j.contains("max_attempts_per_sample"))
    c.max_attempts_per_sample = j.at("max_attempts_per_sample").get<std::uint64_t>();
  if (j.contains("example_pool"))
    c.example_pool = j.at("example_pool").get<std::vector<std::string>>();
  if (j.contains("retry_limit")) c.retry_limit = j.at("retry_limit").get<int>();
  if (j.contains("smoke_samples")) c.smoke_samples = j.at("smoke_samples").get<std::uint64_t>();
  if (j.contains("smoke_max_attempts"))
    c.smoke_max_attempts = j.at("smoke_max_attempts").get<std::uint64_t>();
  if (j.contains("max_tokens")) c.max_tokens = j.at("max_tokens").get<int>();
  if (j.contains("judge_temperature"))
    c.judge_temperature = j.at("judge_temperature").get<double>();
  if (j.contains("model_name")) c.model_name = j.at("model_name").get<std::string>();
  c.validate();
  return c;
}

}  // namespace msa::synth
