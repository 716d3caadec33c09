#pragma once

#include <string>

#include "json.hpp"
#include "msa/ppl/rejection.hpp"

namespace msa::ppl {

inline nlohmann::json to_json(const PosteriorEstimate& estimate) {
  nlohmann::json queries = nlohmann::json::object();
  for (const auto& [label, samples] : estimate.queries) queries[label] = samples;
  return nlohmann::json{{"seed", estimate.seed},
                        {"n_samples", estimate.n_samples},
                        {"n_rejected", estimate.n_rejected},
                        {"queries", queries}};
}

inline PosteriorEstimate posterior_from_json(const nlohmann::json& j) {
  PosteriorEstimate estimate;
  estimate.seed = j.at("seed").get<std::uint64_t>();
  estimate.n_samples = j.at("n_samples").get<std::uint64_t>();
  estimate.n_rejected = j.at("n_rejected").get<std::uint64_t>();
  for (const auto& [label, samples] : j.at("queries").items())
    estimate.queries[label] = samples.get<std::vector<double>>();
  return estimate;
}

}  // namespace msa::ppl
