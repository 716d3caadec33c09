#pragma once

#include <cctype>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "msa/olympics/vignette.hpp"
#include "msa/ppl/parser.hpp"

namespace msa::synth {

struct ExtractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string strip_code_fences(const std::string& text) {
  std::string out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("```", 0) == 0) continue;
    out += line;
    out += '\n';
  }
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// First number token whose value lies in [0, 100]; the documented scalar
// extraction rule for baselines ("between 60 and 70" -> 60).
inline std::optional<double> first_number_in_range(const std::string& text, double lo = 0,
                                                   double hi = 100) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool starts_number = std::isdigit(static_cast<unsigned char>(c)) ||
                         (c == '-' && i + 1 < text.size() &&
                          std::isdigit(static_cast<unsigned char>(text[i + 1])));
    if (!starts_number) continue;
    std::size_t j = i + (c == '-' ? 1 : 0);
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    if (j < text.size() && text[j] == '.' && j + 1 < text.size() &&
        std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
      ++j;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    }
    double value = std::stod(text.substr(i, j - i));
    if (value >= lo && value <= hi) return value;
    i = j - 1;
  }
  return std::nullopt;
}

// Judge output -> integer score in [0, 100]; anything unparseable scores 0.
inline double judge_score(const std::string& completion) {
  auto n = first_number_in_range(completion, 0, 100);
  return n ? std::floor(*n) : 0.0;
}

struct ExtractedParse {
  std::vector<std::string> conditions;                     // one per observation sentence
  std::vector<std::pair<std::string, std::string>> queries;  // (label, expression)
};

// Parses the CONDITIONS:/QUERIES: stage-output block and validates every
// expression against the vignette's observation and question counts.
inline ExtractedParse extract_parse_block(const std::string& completion,
                                          const msa::olympics::Vignette& vignette) {
  std::string text = strip_code_fences(completion);
  std::istringstream in(text);
  std::string line;
  enum class Section { Preamble, Conditions, Queries } section = Section::Preamble;
  ExtractedParse out;
  std::map<std::string, std::string> queries_by_label;

  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t == "CONDITIONS:") {
      section = Section::Conditions;
      continue;
    }
    if (t == "QUERIES:") {
      section = Section::Queries;
      continue;
    }
    if (t.empty()) continue;
    if (t.rfind("- ", 0) == 0) t = trim(t.substr(2));
    if (section == Section::Conditions) {
      auto parsed = msa::ppl::parse_expression(t);
      if (!parsed.ok())
        throw ExtractError("condition does not parse: " + parsed.diagnostic->to_string() +
                           " in '" + t + "'");
      if (!std::holds_alternative<msa::ppl::ConditionExpr>((*parsed.value)->node))
        throw ExtractError("expected a condition(...) expression, got '" + t + "'");
      out.conditions.push_back(t);
    } else if (section == Section::Queries) {
      auto colon = t.find(':');
      if (colon == std::string::npos) throw ExtractError("query line lacks a label: '" + t + "'");
      std::string label = trim(t.substr(0, colon));
      std::string expr = trim(t.substr(colon + 1));
      auto parsed = msa::ppl::parse_expression(expr);
      if (!parsed.ok())
        throw ExtractError("query does not parse: " + parsed.diagnostic->to_string() + " in '" +
                           expr + "'");
      if (queries_by_label.count(label)) throw ExtractError("duplicate query label '" + label + "'");
      queries_by_label[label] = expr;
    }
  }

  std::size_t expected_conditions =
      vignette.observations.size() + (vignette.commentary ? 1 : 0);
  if (out.conditions.size() != expected_conditions)
    throw ExtractError("expected " + std::to_string(expected_conditions) + " conditions, got " +
                       std::to_string(out.conditions.size()));
  for (const auto& q : vignette.questions) {
    auto it = queries_by_label.find(q.label);
    if (it == queries_by_label.end()) throw ExtractError("missing query for label " + q.label);
    out.queries.emplace_back(q.label, it->second);
  }
  if (queries_by_label.size() != vignette.questions.size())
    throw ExtractError("extra query labels beyond the vignette's palette");
  return out;
}

struct ConceptNode {
  std::string concept_name;
  std::vector<std::string> depends_on;
};

struct ExtractedBackground {
  std::string b_aug;  // augmented natural-language description
  std::vector<ConceptNode> graph;
};

inline bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

// Splits a background-stage completion at <START_SCRATCHPAD> and parses the
// dependency list ("- concept" lines with optional "- depends on: a, b").
inline ExtractedBackground extract_background_block(const std::string& completion) {
  std::string text = strip_code_fences(completion);
  auto marker = text.find("<START_SCRATCHPAD>");
  if (marker == std::string::npos)
    throw ExtractError("background candidate lacks a <START_SCRATCHPAD> graph block");
  ExtractedBackground out;
  out.b_aug = trim(text.substr(0, marker));
  if (out.b_aug.empty()) throw ExtractError("background candidate has empty description text");

  std::istringstream in(text.substr(marker + std::string("<START_SCRATCHPAD>").size()));
  std::string line;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.rfind("- ", 0) != 0) throw ExtractError("malformed graph line: '" + t + "'");
    std::string body = trim(t.substr(2));
    if (body.rfind("depends on:", 0) == 0) {
      if (out.graph.empty()) throw ExtractError("dependency line before any concept");
      std::string deps = body.substr(std::string("depends on:").size());
      std::istringstream dep_stream(deps);
      std::string dep;
      while (std::getline(dep_stream, dep, ',')) {
        dep = trim(dep);
        if (!dep.empty()) out.graph.back().depends_on.push_back(dep);
      }
    } else {
      if (!valid_identifier(body)) throw ExtractError("concept is not an identifier: '" + body + "'");
      if (!seen.insert(body).second) throw ExtractError("duplicate concept '" + body + "'");
      out.graph.push_back(ConceptNode{body, {}});
    }
  }
  if (out.graph.empty()) throw ExtractError("graph block lists no concepts");
  return out;
}

}  // namespace msa::synth
