#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "msa/olympics/vignette.hpp"
#include "msa/util/atomic_file.hpp"

namespace msa::synth {

struct MissingFixtureError : std::runtime_error {
  explicit MissingFixtureError(const std::string& what_fixture)
      : std::runtime_error("missing fixture: " + what_fixture) {}
};

enum class Stage { Parse, Background, Model, Inference };

inline const char* to_string(Stage s) {
  switch (s) {
    case Stage::Parse: return "parse";
    case Stage::Background: return "background";
    case Stage::Model: return "model";
    default: return "inference";
  }
}

// Section markers of the shipped example-scenario format. Each example file
// concatenates every pipeline stage for one held-out scenario.
inline constexpr const char* kScenarioMarker = "<START_SCENARIO>";
inline constexpr const char* kParseMarker = "<START_LANGUAGE_TO_WEBPPL_CODE>";
inline constexpr const char* kInformalMarker = "<START_INFORMAL_BACKGROUND_KNOWLEDGE>";
inline constexpr const char* kScratchpadMarker = "<START_SCRATCHPAD>";
inline constexpr const char* kModelMarker = "<START_WEBPPL_MODEL>";
inline constexpr const char* kExamplesToken = "<SHUFFLED EXAMPLES>";
inline constexpr const char* kScenarioToken = "<SCENARIO>";
inline constexpr const char* kSelectedParseToken = "<SELECTED_PARSE>";
inline constexpr const char* kSelectedBackgroundToken = "<SELECTED_BACKGROUND>";
inline constexpr const char* kCandidateToken = "<CANDIDATE>";

struct ExampleScenario {
  std::string id;    // e.g. "canoe-racing"
  std::string text;  // full marked-up content

  // Content injected for a stage: parse prompts see scenario+parse,
  // background prompts additionally see the informal text and graph, model
  // prompts see everything.
  std::string text_through(Stage stage) const {
    switch (stage) {
      case Stage::Parse: return cut_before(kInformalMarker);
      case Stage::Background: return cut_before(kModelMarker);
      default: return text;
    }
  }

  std::string section(const char* marker) const {
    auto begin = text.find(marker);
    if (begin == std::string::npos)
      throw MissingFixtureError("section " + std::string(marker) + " in example '" + id + "'");
    begin += std::string(marker).size();
    static const std::vector<std::string> all_markers = {kScenarioMarker, kParseMarker,
                                                         kInformalMarker, kScratchpadMarker,
                                                         kModelMarker};
    std::size_t end = text.size();
    for (const auto& m : all_markers) {
      auto pos = text.find(m, begin);
      if (pos != std::string::npos && pos < end) end = pos;
    }
    return text.substr(begin, end - begin);
  }

 private:
  std::string cut_before(const char* marker) const {
    auto pos = text.find(marker);
    return pos == std::string::npos ? text : text.substr(0, pos);
  }
};

// The fixture id an example must NOT have when prompting for a sport (the
// held-out rule).
inline std::string sport_fixture_id(msa::olympics::Sport sport) {
  switch (sport) {
    case msa::olympics::Sport::TugOfWar: return "tug-of-war";
    case msa::olympics::Sport::CanoeRacing: return "canoe-racing";
    default: return "biathlon";
  }
}

struct FixtureLibrary {
  std::map<std::string, std::string> frames;          // frame-prompt name -> text
  std::map<std::string, ExampleScenario> examples;    // fixture id -> scenario

  static FixtureLibrary load(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    FixtureLibrary lib;
    fs::path frames_dir = dir / "msa-frame-prompts";
    fs::path examples_dir = dir / "example-scenarios";
    fs::path baselines_dir = dir / "lm-only-baseline-prompts";
    if (!fs::exists(frames_dir)) throw MissingFixtureError("directory " + frames_dir.string());
    for (const auto& entry : fs::directory_iterator(frames_dir))
      if (entry.path().extension() == ".txt")
        lib.frames[entry.path().stem().string()] = msa::util::read_file(entry.path());
    if (fs::exists(baselines_dir))
      for (const auto& entry : fs::directory_iterator(baselines_dir))
        if (entry.path().extension() == ".txt")
          lib.frames["lm-" + entry.path().stem().string()] = msa::util::read_file(entry.path());
    if (!fs::exists(examples_dir)) throw MissingFixtureError("directory " + examples_dir.string());
    for (const auto& entry : fs::directory_iterator(examples_dir)) {
      if (entry.path().extension() != ".txt") continue;
      ExampleScenario example;
      example.id = entry.path().stem().string();
      example.text = msa::util::read_file(entry.path());
      lib.examples[example.id] = std::move(example);
    }
    return lib;
  }

  const std::string& frame(const std::string& name) const {
    auto it = frames.find(name);
    if (it == frames.end()) throw MissingFixtureError("frame prompt '" + name + "'");
    return it->second;
  }

  const ExampleScenario& example(const std::string& id) const {
    auto it = examples.find(id);
    if (it == examples.end()) throw MissingFixtureError("example scenario '" + id + "'");
    return it->second;
  }
};

inline std::string replace_token(std::string text, const std::string& token,
                                 const std::string& replacement) {
  for (auto pos = text.find(token); pos != std::string::npos; pos = text.find(token, pos))
    text.replace(pos, token.size(), replacement), pos += replacement.size();
  return text;
}

}  // namespace msa::synth
