#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "msa/olympics/vignette.hpp"
#include "msa/ppl/parser.hpp"
#include "msa/ppl/pretty.hpp"
#include "msa/util/program_assembly.hpp"

namespace msa::olympics {

struct NoGoldModelError : std::runtime_error {
  NoGoldModelError()
      : std::runtime_error(
            "no gold model exists for commentary-extended vignettes "
            "(hand-crafted models cannot absorb novel variables)") {}
};

// Every free parameter of the hand-crafted causal models, in one overridable
// record. Defaults follow the causal story in the detailed backgrounds.
struct GoldParams {
  double strength_mean = 50;
  double strength_sd = 15;
  double strength_lo = 0;     // truncation bounds
  double strength_hi = 100;

  double p_low = 0.10;        // effort category probabilities at average strength
  double p_moderate = 0.75;
  double p_high = 0.15;
  double mult_low = 0.5;      // pull/paddle multipliers per effort category
  double mult_moderate = 1.0;
  double mult_high = 1.25;
  double effort_tilt = 0.1;   // added to p_high per +1 sd of strength (p_low mirrors)

  double report_low = 40;     // reported effort-percent centers per category
  double report_moderate = 75;
  double report_high = 95;
  double report_sd = 8;

  double shoot_intercept = 40;  // shooting accuracy ~ N(intercept + slope*strength, sd)
  double shoot_slope = 0.3;
  double shoot_sd = 15;

  // Slider gain per sport: one prior sd of a 2v2 score difference maps to
  // 25 slider points.
  double predict_gain_tug = 0.71;
  double predict_gain_canoe = 1.41;
  double predict_gain_biathlon = 1.02;

  void validate() const {
    if (!(strength_sd > 0) || !(report_sd > 0) || !(shoot_sd > 0))
      throw std::runtime_error("gold params: standard deviations must be > 0");
    if (!(strength_lo < strength_hi))
      throw std::runtime_error("gold params: truncation bounds must be ordered");
    double total = p_low + p_moderate + p_high;
    if (std::abs(total - 1.0) > 1e-9)
      throw std::runtime_error("gold params: effort category probabilities must sum to 1");
  }

  double gain(Sport sport) const {
    switch (sport) {
      case Sport::TugOfWar: return predict_gain_tug;
      case Sport::CanoeRacing: return predict_gain_canoe;
      default: return predict_gain_biathlon;
    }
  }
};

inline nlohmann::json to_json(const GoldParams& p) {
  return nlohmann::json{{"strength_mean", p.strength_mean},
                        {"strength_sd", p.strength_sd},
                        {"strength_lo", p.strength_lo},
                        {"strength_hi", p.strength_hi},
                        {"p_low", p.p_low},
                        {"p_moderate", p.p_moderate},
                        {"p_high", p.p_high},
                        {"mult_low", p.mult_low},
                        {"mult_moderate", p.mult_moderate},
                        {"mult_high", p.mult_high},
                        {"effort_tilt", p.effort_tilt},
                        {"report_low", p.report_low},
                        {"report_moderate", p.report_moderate},
                        {"report_high", p.report_high},
                        {"report_sd", p.report_sd},
                        {"shoot_intercept", p.shoot_intercept},
                        {"shoot_slope", p.shoot_slope},
                        {"shoot_sd", p.shoot_sd},
                        {"predict_gain_tug", p.predict_gain_tug},
                        {"predict_gain_canoe", p.predict_gain_canoe},
                        {"predict_gain_biathlon", p.predict_gain_biathlon}};
}

inline GoldParams gold_params_from_json(const nlohmann::json& j) {
  GoldParams p;
  auto get = [&](const char* key, double& field) {
    if (j.contains(key)) field = j.at(key).get<double>();
  };
  get("strength_mean", p.strength_mean);
  get("strength_sd", p.strength_sd);
  get("strength_lo", p.strength_lo);
  get("strength_hi", p.strength_hi);
  get("p_low", p.p_low);
  get("p_moderate", p.p_moderate);
  get("p_high", p.p_high);
  get("mult_low", p.mult_low);
  get("mult_moderate", p.mult_moderate);
  get("mult_high", p.mult_high);
  get("effort_tilt", p.effort_tilt);
  get("report_low", p.report_low);
  get("report_moderate", p.report_moderate);
  get("report_high", p.report_high);
  get("report_sd", p.report_sd);
  get("shoot_intercept", p.shoot_intercept);
  get("shoot_slope", p.shoot_slope);
  get("shoot_sd", p.shoot_sd);
  get("predict_gain_tug", p.predict_gain_tug);
  get("predict_gain_canoe", p.predict_gain_canoe);
  get("predict_gain_biathlon", p.predict_gain_biathlon);
  p.validate();
  return p;
}

namespace detail {

inline std::string fmt(double v) { return msa::ppl::format_number(v); }

inline std::string name_list(const Vignette& v, const std::vector<char>& roles) {
  std::string out = "[";
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (i) out += ", ";
    out += "'" + lowercase(v.name_of(roles[i])) + "'";
  }
  return out + "]";
}

// The per-sport key used inside argument records for temporal indices.
inline const char* time_key(Sport s) { return match_noun(s); }

}  // namespace detail

// Names of the latent-report function per sport, shared with the parse
// fixtures so gold queries and mock parses line up.
inline std::string temporal_query_function(Sport sport) {
  switch (sport) {
    case Sport::TugOfWar: return "effort_percent_in_match";
    case Sport::CanoeRacing: return "effort_percent_in_race";
    default: return "shooting_accuracy_in_round";
  }
}

// Condition expression encoding one observation sentence.
inline std::string encode_observation_condition(const Vignette& v, std::size_t index) {
  const Motif& motif = find_motif(v.motif_id);
  const auto& m = motif.matches.at(index);
  const char* key = detail::time_key(v.sport);
  std::string fn = m.winner == 1 ? "beat" : "lost";
  return "condition(" + fn + "({team1: " + detail::name_list(v, m.team1) +
         ", team2: " + detail::name_list(v, m.team2) + ", " + key + ": " +
         std::to_string(index + 1) + "}))";
}

// Query expression for the i-th question (0-based over the palette of 8).
inline std::string encode_query(const Vignette& v, std::size_t index) {
  const Motif& motif = find_motif(v.motif_id);
  const char* key = detail::time_key(v.sport);
  if (index < 3) {
    char role = motif.focus.constant_roles.at(index);
    return "intrinsic_strength_rank({athlete: '" + lowercase(v.name_of(role)) +
           "', out_of_n_athletes: 100})";
  }
  if (index < 6) {
    const auto& probe = motif.focus.temporal_probes.at(index - 3);
    return temporal_query_function(v.sport) + "({athlete: '" + lowercase(v.name_of(probe.role)) +
           "', " + key + ": " + std::to_string(probe.match) + "})";
  }
  const auto& pred = motif.focus.predictions.at(index - 6);
  int new_match = static_cast<int>(motif.matches.size()) + 1;
  return "who_would_win_by_how_much({team1: " + detail::name_list(v, pred.team1) +
         ", team2: " + detail::name_list(v, pred.team2) + ", " + key + ": " +
         std::to_string(new_match) + "})";
}

inline std::vector<std::string> encode_all_conditions(const Vignette& v) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.observations.size(); ++i)
    out.push_back(encode_observation_condition(v, i));
  return out;
}

inline std::vector<std::pair<std::string, std::string>> encode_all_queries(const Vignette& v) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < v.questions.size(); ++i)
    out.emplace_back(v.questions[i].label, encode_query(v, i));
  return out;
}

// The causal definitions for one sport, as PPL source (2-space indented for
// splicing into a model function).
inline std::string gold_definitions(Sport sport, const GoldParams& p = {}) {
  using detail::fmt;
  const char* key = detail::time_key(sport);
  std::string out;

  out +=
      "  var intrinsic_strength = mem(function({athlete}) {\n"
      "    var s = gaussian(" + fmt(p.strength_mean) + ", " + fmt(p.strength_sd) + ");\n"
      "    condition(s >= " + fmt(p.strength_lo) + " && s <= " + fmt(p.strength_hi) + ");\n"
      "    return s;\n"
      "  });\n"
      "  var intrinsic_strength_rank = function({athlete, out_of_n_athletes}) {\n"
      "    return round(out_of_n_athletes * normalCDF((intrinsic_strength({athlete: athlete}) - " +
      fmt(p.strength_mean) + ") / " + fmt(p.strength_sd) + "));\n"
      "  };\n";

  if (sport == Sport::Biathlon) {
    out +=
        "  var shooting_accuracy_in_round = mem(function({athlete, round}) {\n"
        "    var center = " + fmt(p.shoot_intercept) + " + " + fmt(p.shoot_slope) +
        " * intrinsic_strength({athlete: athlete});\n"
        "    return max(0, min(100, gaussian(center, " + fmt(p.shoot_sd) + ")));\n"
        "  });\n"
        "  var skiing_speed_in_round = function({athlete, round}) {\n"
        "    return intrinsic_strength({athlete: athlete});\n"
        "  };\n"
        "  var team_score_in_round = function({team, round}) {\n"
        "    var ski = mean(map(function(athlete) { return skiing_speed_in_round({athlete: athlete, round: round}); }, team));\n"
        "    var shoot = mean(map(function(athlete) { return shooting_accuracy_in_round({athlete: athlete, round: round}); }, team));\n"
        "    return ski + shoot;\n"
        "  };\n"
        "  var beat = function({team1, team2, round}) {\n"
        "    return team_score_in_round({team: team1, round: round}) > team_score_in_round({team: team2, round: round});\n"
        "  };\n"
        "  var lost = function({team1, team2, round}) {\n"
        "    return !beat({team1: team1, team2: team2, round: round});\n"
        "  };\n"
        "  var who_would_win_by_how_much = function({team1, team2, round}) {\n"
        "    var margin = team_score_in_round({team: team1, round: round}) - team_score_in_round({team: team2, round: round});\n"
        "    return max(0, min(100, 50 + " + fmt(p.gain(sport)) + " * margin));\n"
        "  };\n";
    return out;
  }

  // Tug-of-war and canoe racing share the strength/effort structure; they
  // differ in the time noun, the output verb, and team aggregation (tug
  // sums member pulls, canoe averages paddler speeds).
  std::string knounp = key;  // "match" or "race"
  std::string output_fn = sport == Sport::TugOfWar ? "pulling_output_in_match" : "paddling_speed_in_race";
  std::string team_fn = sport == Sport::TugOfWar ? "team_pull_in_match" : "boat_speed_in_race";
  std::string report_fn = temporal_query_function(sport);

  out +=
      "  var effort_level_in_" + knounp + " = mem(function({athlete, " + knounp + "}) {\n"
      "    var z = (intrinsic_strength({athlete: athlete}) - " + fmt(p.strength_mean) + ") / " +
      fmt(p.strength_sd) + ";\n"
      "    var p_high = max(0, min(0.5, " + fmt(p.p_high) + " + " + fmt(p.effort_tilt) + " * z));\n"
      "    var p_low = max(0, min(0.5, " + fmt(p.p_low) + " - " + fmt(p.effort_tilt) + " * z));\n"
      "    var p_moderate = 1 - p_high - p_low;\n"
      "    return categorical({ps: [p_low, p_moderate, p_high], vs: ['low', 'moderate', 'high']});\n"
      "  });\n"
      "  var effort_multiplier_in_" + knounp + " = function({athlete, " + knounp + "}) {\n"
      "    var level = effort_level_in_" + knounp + "({athlete: athlete, " + knounp + ": " + knounp + "});\n"
      "    return level == 'low' ? " + fmt(p.mult_low) + " : (level == 'moderate' ? " +
      fmt(p.mult_moderate) + " : " + fmt(p.mult_high) + ");\n"
      "  };\n"
      "  var " + report_fn + " = mem(function({athlete, " + knounp + "}) {\n"
      "    var level = effort_level_in_" + knounp + "({athlete: athlete, " + knounp + ": " + knounp + "});\n"
      "    var center = level == 'low' ? " + fmt(p.report_low) + " : (level == 'moderate' ? " +
      fmt(p.report_moderate) + " : " + fmt(p.report_high) + ");\n"
      "    return max(0, min(100, gaussian(center, " + fmt(p.report_sd) + ")));\n"
      "  });\n"
      "  var " + output_fn + " = function({athlete, " + knounp + "}) {\n"
      "    return intrinsic_strength({athlete: athlete}) * effort_multiplier_in_" + knounp +
      "({athlete: athlete, " + knounp + ": " + knounp + "});\n"
      "  };\n";

  if (sport == Sport::TugOfWar) {
    out +=
        "  var " + team_fn + " = function({team, " + knounp + "}) {\n"
        "    return sum(map(function(athlete) { return " + output_fn + "({athlete: athlete, " +
        knounp + ": " + knounp + "}); }, team));\n"
        "  };\n";
  } else {
    out +=
        "  var " + team_fn + " = function({team, " + knounp + "}) {\n"
        "    return mean(map(function(athlete) { return " + output_fn + "({athlete: athlete, " +
        knounp + ": " + knounp + "}); }, team));\n"
        "  };\n";
  }

  out +=
      "  var beat = function({team1, team2, " + knounp + "}) {\n"
      "    return " + team_fn + "({team: team1, " + knounp + ": " + knounp + "}) > " + team_fn +
      "({team: team2, " + knounp + ": " + knounp + "});\n"
      "  };\n"
      "  var lost = function({team1, team2, " + knounp + "}) {\n"
      "    return !beat({team1: team1, team2: team2, " + knounp + ": " + knounp + "});\n"
      "  };\n"
      "  var who_would_win_by_how_much = function({team1, team2, " + knounp + "}) {\n"
      "    var margin = " + team_fn + "({team: team1, " + knounp + ": " + knounp + "}) - " +
      team_fn + "({team: team2, " + knounp + ": " + knounp + "});\n"
      "    return max(0, min(100, 50 + " + fmt(p.gain(sport)) + " * margin));\n"
      "  };\n";
  return out;
}

// The hand-crafted probabilistic model for a vignette: causal definitions,
// conditions encoding its observations, and queries answering its palette.
inline msa::ppl::SourceProgram gold_model(const Vignette& v, const GoldParams& params = {}) {
  if (v.background_kind == BackgroundKind::UnderspecifiedWithCommentary) throw NoGoldModelError();
  params.validate();
  msa::ppl::SourceProgram source;
  source.origin = msa::ppl::ProgramOrigin::Gold;
  source.text = msa::util::assemble_model_program(gold_definitions(v.sport, params),
                                                  encode_all_conditions(v), encode_all_queries(v));
  return source;
}

}  // namespace msa::olympics
