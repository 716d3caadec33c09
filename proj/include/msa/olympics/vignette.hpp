#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "msa/olympics/motifs.hpp"
#include "msa/ppl/rng.hpp"

namespace msa::olympics {

struct UnknownSportError : std::runtime_error {
  explicit UnknownSportError(const std::string& name)
      : std::runtime_error("unknown sport '" + name + "'") {}
};

struct MissingCommentaryError : std::runtime_error {
  explicit MissingCommentaryError(int index)
      : std::runtime_error("experiment e3 requires a commentary fixture sentence for vignette index " +
                           std::to_string(index)) {}
};

enum class Sport { TugOfWar, CanoeRacing, Biathlon };
enum class BackgroundKind { Detailed, Underspecified, UnderspecifiedWithCommentary };
enum class QueryType { Constant, Temporal, Prediction };

inline const char* to_string(Sport s) {
  switch (s) {
    case Sport::TugOfWar: return "tug_of_war";
    case Sport::CanoeRacing: return "canoe_racing";
    default: return "biathlon";
  }
}

inline Sport sport_from_string(const std::string& s) {
  if (s == "tug_of_war") return Sport::TugOfWar;
  if (s == "canoe_racing") return Sport::CanoeRacing;
  if (s == "biathlon") return Sport::Biathlon;
  throw UnknownSportError(s);
}

inline const char* to_string(BackgroundKind k) {
  switch (k) {
    case BackgroundKind::Detailed: return "detailed";
    case BackgroundKind::Underspecified: return "underspecified";
    default: return "underspecified_with_commentary";
  }
}

inline BackgroundKind background_kind_from_string(const std::string& s) {
  if (s == "detailed") return BackgroundKind::Detailed;
  if (s == "underspecified") return BackgroundKind::Underspecified;
  if (s == "underspecified_with_commentary") return BackgroundKind::UnderspecifiedWithCommentary;
  throw std::runtime_error("unknown background kind '" + s + "'");
}

inline const char* to_string(QueryType t) {
  switch (t) {
    case QueryType::Constant: return "constant";
    case QueryType::Temporal: return "temporal";
    default: return "prediction";
  }
}

inline QueryType query_type_from_string(const std::string& s) {
  if (s == "constant") return QueryType::Constant;
  if (s == "temporal") return QueryType::Temporal;
  if (s == "prediction") return QueryType::Prediction;
  throw std::runtime_error("unknown query type '" + s + "'");
}

struct Question {
  std::string label;       // q1..q8
  std::string text;
  QueryType query_type = QueryType::Constant;
  double scale_lo = 0, scale_hi = 100;
};

struct Vignette {
  Sport sport = Sport::TugOfWar;
  BackgroundKind background_kind = BackgroundKind::Detailed;
  std::string background;
  std::vector<std::string> observations;
  std::optional<std::string> commentary;
  std::vector<Question> questions;
  std::map<char, std::string> athletes;  // role letter -> display name
  std::string motif_id;
  std::uint64_t seed = 0;

  const std::string& name_of(char role) const { return athletes.at(role); }
};

// Gender-neutral pool; display-cased. Code expressions use the lowercase form.
inline const std::vector<std::string>& name_pool() {
  static const std::vector<std::string> pool = {
      "Avery", "Blake",  "Casey", "Peyton", "Jordan", "Riley",  "Quinn", "Taylor",
      "Morgan", "Skyler", "Robin", "Kai",    "Ollie",  "Lane",   "Jamie", "Harper",
      "Gale",   "Ness",   "Val",   "Kay",    "Drew",   "Reese",  "Sage",  "Rowan"};
  return pool;
}

inline std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Sport-specific vocabulary.
inline const char* match_noun(Sport s) {
  switch (s) {
    case Sport::TugOfWar: return "match";
    case Sport::CanoeRacing: return "race";
    default: return "round";
  }
}

inline std::string ordinal_word(int n) {
  static const char* words[] = {"first", "second", "third", "fourth",
                                "fifth", "sixth", "seventh", "eighth"};
  if (n < 1 || n > 8) throw std::runtime_error("ordinal out of range");
  return words[n - 1];
}

namespace detail {

inline std::string join_names(const std::vector<std::string>& names) {
  if (names.size() == 1) return names[0];
  std::string out;
  for (std::size_t i = 0; i + 1 < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
  out += " and " + names.back();
  return out;
}

inline std::vector<std::string> team_names(const Vignette& v, const std::vector<char>& roles) {
  std::vector<std::string> out;
  for (char r : roles) out.push_back(v.name_of(r));
  return out;
}

}  // namespace detail

// --- background texts per sport and kind ---

inline std::string background_text(Sport sport, BackgroundKind kind) {
  const bool detailed = kind == BackgroundKind::Detailed;
  switch (sport) {
    case Sport::TugOfWar:
      if (detailed)
        return
            "In this event, the athletes compete in a tug-of-war tournament made up of a "
            "series of matches, either one-on-one or in teams.\n"
            "Each athlete has an intrinsic strength that stays the same across the whole "
            "tournament. Strength varies a lot from athlete to athlete: most are around "
            "average, with a few who are far weaker or far stronger.\n"
            "Athletes also differ in how much effort they put into each match. Usually an "
            "athlete pulls with a moderately high amount of effort, occasionally they barely "
            "try and pull at only a fraction of their strength, and occasionally they go all "
            "out and pull even harder than their intrinsic strength alone would allow. "
            "Stronger athletes are a bit more likely to put in extra-high effort.\n"
            "How hard a team pulls in a match is the total of what its athletes pull in that "
            "match, where each athlete's pull is their intrinsic strength scaled by the "
            "effort they put in. The team that pulls hardest wins the match.\n"
            "All matches take place on the same day.";
      return
          "In this event, the athletes compete in matches of tug-of-war.\n"
          "In each match, the winning team is decided by how hard the athletes on each side "
          "collectively pull, which comes from their intrinsic strength together with other "
          "factors such as how much effort they put into that match.\n"
          "Athletes compete either individually or as a team.\n"
          "All matches take place on the same day.";
    case Sport::CanoeRacing:
      if (detailed)
        return
            "In this event, the athletes compete in a canoe-racing tournament made up of a "
            "series of races between two boats, either solo or in crews.\n"
            "Each athlete has an intrinsic strength that stays the same across the whole "
            "tournament. Strength varies a lot from athlete to athlete: most are around "
            "average, with a few who are far weaker or far stronger.\n"
            "Athletes also differ in how much effort they put into each race. Usually an "
            "athlete paddles with a moderately high amount of effort, occasionally they "
            "barely try and paddle at only a fraction of their strength, and occasionally "
            "they go all out and paddle even harder than their intrinsic strength alone "
            "would allow. Stronger athletes are a bit more likely to put in extra-high "
            "effort.\n"
            "A boat's speed in a race is the average speed of the athletes in it, where each "
            "athlete's speed is their intrinsic strength scaled by the effort they put into "
            "that race. The faster boat wins the race.\n"
            "All races take place on the same day.";
      return
          "In this event, the athletes compete in canoe races.\n"
          "In each race, the winning boat is decided by how fast its athletes paddle, which "
          "comes from their intrinsic strength together with other factors such as how much "
          "effort they put into that race.\n"
          "Athletes compete either solo or as a crew.\n"
          "All races take place on the same day.";
    default:
      if (detailed)
        return
            "In this event, the athletes compete in a biathlon tournament: rounds that "
            "combine cross-country skiing with rifle shooting, raced between two teams.\n"
            "Each athlete has an intrinsic strength that stays the same across the whole "
            "tournament. Strength varies a lot from athlete to athlete: most are around "
            "average, with a few who are far weaker or far stronger. Stronger athletes ski "
            "faster.\n"
            "Athletes also differ in their shooting accuracy from round to round. Shooting "
            "accuracy runs from 0% to 100%, and stronger athletes tend to shoot somewhat "
            "more accurately.\n"
            "A team's score in a round adds its average skiing speed and its average "
            "shooting accuracy in that round, weighted equally. The team with the higher "
            "score wins the round.\n"
            "All rounds take place on the same day.";
      return
          "In this event, the athletes compete in rounds of a biathlon, a sport that "
          "combines cross-country skiing and rifle shooting.\n"
          "In each round, the winning team is decided by how fast its athletes ski, which "
          "depends on their intrinsic strength, together with each athlete's shooting "
          "accuracy in that particular round.\n"
          "Athletes compete either individually or as a team.\n"
          "All rounds take place on the same day.";
  }
}

// --- generation ---

inline Vignette generate_vignette(Sport sport, const std::string& motif_id, BackgroundKind kind,
                                  std::uint64_t seed,
                                  std::optional<std::string> commentary = std::nullopt) {
  const Motif& motif = find_motif(motif_id);
  if (kind == BackgroundKind::UnderspecifiedWithCommentary && !commentary)
    throw MissingCommentaryError(-1);

  Vignette v;
  v.sport = sport;
  v.background_kind = kind;
  v.background = background_text(sport, kind);
  v.motif_id = motif_id;
  v.seed = seed;
  if (kind == BackgroundKind::UnderspecifiedWithCommentary) v.commentary = commentary;

  // All roles needing names: evidence roles plus any fresh prediction roles.
  std::vector<char> all_roles = motif.roles;
  for (const auto& pred : motif.focus.predictions)
    for (const auto& team : {pred.team1, pred.team2})
      for (char r : team)
        if (std::find(all_roles.begin(), all_roles.end(), r) == all_roles.end())
          all_roles.push_back(r);

  std::vector<std::string> pool = name_pool();
  msa::ppl::Rng name_rng(msa::ppl::derive_stream(seed, "athlete-names"));
  msa::ppl::deterministic_shuffle(pool, name_rng);
  for (std::size_t i = 0; i < all_roles.size(); ++i) v.athletes[all_roles[i]] = pool.at(i);

  const char* noun = match_noun(sport);
  for (std::size_t i = 0; i < motif.matches.size(); ++i) {
    const auto& m = motif.matches[i];
    std::string t1 = detail::join_names(detail::team_names(v, m.team1));
    std::string t2 = detail::join_names(detail::team_names(v, m.team2));
    std::string verb = m.winner == 1 ? " beat " : " lost to ";
    v.observations.push_back("In the " + ordinal_word(static_cast<int>(i) + 1) + " " + noun +
                             ", " + t1 + verb + t2 + ".");
  }

  int q = 1;
  for (char role : motif.focus.constant_roles) {
    Question question;
    question.label = "q" + std::to_string(q++);
    question.query_type = QueryType::Constant;
    question.text = "Out of 100 random athletes, where do you think " + v.name_of(role) +
                    " ranks in terms of intrinsic strength?";
    v.questions.push_back(std::move(question));
  }
  for (const auto& probe : motif.focus.temporal_probes) {
    Question question;
    question.label = "q" + std::to_string(q++);
    question.query_type = QueryType::Temporal;
    if (sport == Sport::Biathlon) {
      question.text = "On a percentage scale from 0 to 100%, how accurate do you think " +
                      v.name_of(probe.role) + " was at shooting in the " +
                      ordinal_word(probe.match) + " round?";
    } else {
      question.text = "On a percentage scale from 0 to 100%, how much effort do you think " +
                      v.name_of(probe.role) + " put into the " + ordinal_word(probe.match) +
                      " " + noun + "?";
    }
    v.questions.push_back(std::move(question));
  }
  for (const auto& pred : motif.focus.predictions) {
    Question question;
    question.label = "q" + std::to_string(q++);
    question.query_type = QueryType::Prediction;
    question.text = "In a new " + std::string(noun) + " later this same day between " +
                    detail::join_names(detail::team_names(v, pred.team1)) + " (Team 1) and " +
                    detail::join_names(detail::team_names(v, pred.team2)) +
                    " (Team 2), who would win and by how much?";
    v.questions.push_back(std::move(question));
  }
  return v;
}

// --- commentary fixtures (for experiment e3) ---

struct CommentaryFixture {
  std::map<int, std::string> sentences;  // vignette index -> sentence
};

inline CommentaryFixture commentary_from_json(const nlohmann::json& j) {
  CommentaryFixture fixture;
  for (const auto& entry : j)
    fixture.sentences[entry.at("vignette_index").get<int>()] =
        entry.at("sentence").get<std::string>();
  return fixture;
}

// --- experiment sets ---

enum class Experiment { E1, E2, E3 };

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::E1: return "e1";
    case Experiment::E2: return "e2";
    default: return "e3";
  }
}

inline Experiment experiment_from_string(const std::string& s) {
  if (s == "e1") return Experiment::E1;
  if (s == "e2") return Experiment::E2;
  if (s == "e3") return Experiment::E3;
  throw std::runtime_error("unknown experiment '" + s + "' (expected e1, e2, or e3)");
}

inline std::vector<Vignette> sample_experiment_set(
    Experiment experiment, std::uint64_t seed,
    const std::optional<CommentaryFixture>& commentary = std::nullopt) {
  std::vector<Vignette> out;
  const auto& motifs = list_motifs();

  auto sample_motif_ids = [&](Sport sport, std::size_t count) {
    // Motif draws depend only on (seed, sport) so e2 reuses e1's draws.
    std::vector<std::string> ids;
    for (const auto& m : motifs) ids.push_back(m.id);
    msa::ppl::Rng rng(msa::ppl::derive_stream(seed, std::string("motifs-") + to_string(sport)));
    msa::ppl::deterministic_shuffle(ids, rng);
    ids.resize(count);
    return ids;
  };

  if (experiment == Experiment::E1 || experiment == Experiment::E2) {
    BackgroundKind kind = experiment == Experiment::E1 ? BackgroundKind::Detailed
                                                       : BackgroundKind::Underspecified;
    for (Sport sport : {Sport::TugOfWar, Sport::CanoeRacing, Sport::Biathlon}) {
      auto ids = sample_motif_ids(sport, 6);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        std::uint64_t vignette_seed = msa::ppl::derive_stream(
            seed, std::string(to_string(experiment)) + "-" + to_string(sport) + "-" +
                      std::to_string(i));
        out.push_back(generate_vignette(sport, ids[i], kind, vignette_seed));
      }
    }
    return out;
  }

  // e3: 9 vignettes over tug-of-war (5) and canoe racing (4), each extended
  // with a participant-written commentary sentence from the fixture file.
  int index = 0;
  for (auto [sport, count] : {std::pair{Sport::TugOfWar, 5}, std::pair{Sport::CanoeRacing, 4}}) {
    auto ids = sample_motif_ids(sport, static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < ids.size(); ++i, ++index) {
      if (!commentary || !commentary->sentences.count(index)) throw MissingCommentaryError(index);
      std::uint64_t vignette_seed = msa::ppl::derive_stream(
          seed, std::string("e3-") + to_string(sport) + "-" + std::to_string(i));
      out.push_back(generate_vignette(sport, ids[i], BackgroundKind::UnderspecifiedWithCommentary,
                                      vignette_seed, commentary->sentences.at(index)));
    }
  }
  return out;
}

// --- JSON schema {sport, background_kind, background, observations[],
//     commentary?, questions[], athletes{}, motif_id, seed} ---

inline nlohmann::json to_json(const Vignette& v) {
  nlohmann::json questions = nlohmann::json::array();
  for (const auto& q : v.questions)
    questions.push_back({{"label", q.label},
                         {"text", q.text},
                         {"query_type", to_string(q.query_type)},
                         {"scale", {q.scale_lo, q.scale_hi}}});
  nlohmann::json athletes = nlohmann::json::object();
  for (const auto& [role, name] : v.athletes) athletes[std::string(1, role)] = name;
  nlohmann::json j{{"sport", to_string(v.sport)},
                   {"background_kind", to_string(v.background_kind)},
                   {"background", v.background},
                   {"observations", v.observations},
                   {"questions", questions},
                   {"athletes", athletes},
                   {"motif_id", v.motif_id},
                   {"seed", v.seed}};
  if (v.commentary) j["commentary"] = *v.commentary;
  return j;
}

inline Vignette vignette_from_json(const nlohmann::json& j) {
  Vignette v;
  v.sport = sport_from_string(j.at("sport").get<std::string>());
  v.background_kind = background_kind_from_string(j.at("background_kind").get<std::string>());
  v.background = j.at("background").get<std::string>();
  v.observations = j.at("observations").get<std::vector<std::string>>();
  if (j.contains("commentary")) v.commentary = j.at("commentary").get<std::string>();
  for (const auto& q : j.at("questions")) {
    Question question;
    question.label = q.at("label").get<std::string>();
    question.text = q.at("text").get<std::string>();
    question.query_type = query_type_from_string(q.at("query_type").get<std::string>());
    question.scale_lo = q.at("scale")[0].get<double>();
    question.scale_hi = q.at("scale")[1].get<double>();
    v.questions.push_back(std::move(question));
  }
  for (const auto& [role, name] : j.at("athletes").items())
    v.athletes[role[0]] = name.get<std::string>();
  v.motif_id = j.at("motif_id").get<std::string>();
  v.seed = j.at("seed").get<std::uint64_t>();
  return v;
}

}  // namespace msa::olympics
