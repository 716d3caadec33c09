#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace msa::olympics {

struct UnknownMotifError : std::runtime_error {
  explicit UnknownMotifError(const std::string& id)
      : std::runtime_error("unknown motif '" + id + "'") {}
};

enum class MotifCategory {
  RoundRobin,
  ConfoundedTeammates,
  StrongIndirect,
  WeakIndirect,
  Singles,
  Diverse,
  Anomalous,
};

inline const char* to_string(MotifCategory c) {
  switch (c) {
    case MotifCategory::RoundRobin: return "round_robin";
    case MotifCategory::ConfoundedTeammates: return "confounded_teammates";
    case MotifCategory::StrongIndirect: return "strong_indirect";
    case MotifCategory::WeakIndirect: return "weak_indirect";
    case MotifCategory::Singles: return "singles";
    case MotifCategory::Diverse: return "diverse";
    default: return "anomalous";
  }
}

struct MotifMatch {
  std::vector<char> team1;
  std::vector<char> team2;
  int winner = 1;  // 1 or 2
};

struct TemporalProbe {
  char role;
  int match;  // 1-based
};

struct PredictionSpec {
  std::vector<char> team1;
  std::vector<char> team2;  // may name a role absent from the evidence matches
};

struct MotifFocus {
  std::vector<char> constant_roles;        // exactly 3
  std::vector<TemporalProbe> temporal_probes;  // exactly 3
  std::vector<PredictionSpec> predictions;     // exactly 2
};

// A reusable tournament evidence pattern, instantiable in any sport.
struct Motif {
  std::string id;
  MotifCategory category = MotifCategory::RoundRobin;
  std::vector<char> roles;  // roles appearing in evidence matches
  std::vector<MotifMatch> matches;
  MotifFocus focus;
  // For anomalous motifs: the athlete whose surprising outcome wants
  // explaining away, and the match it happened in.
  char focal_role = 0;
  int anomalous_match = 0;

  bool participates(char role, int match_index) const {
    const auto& m = matches.at(static_cast<std::size_t>(match_index - 1));
    for (char r : m.team1)
      if (r == role) return true;
    for (char r : m.team2)
      if (r == role) return true;
    return false;
  }
};

inline const std::vector<Motif>& list_motifs() {
  static const std::vector<Motif> motifs = [] {
    std::vector<Motif> out;
    auto add = [&](Motif m) { out.push_back(std::move(m)); };

    add({"rr_loser", MotifCategory::RoundRobin, {'A', 'B', 'C', 'D'},
         {{{'A', 'B'}, {'C', 'D'}, 2}, {{'A', 'C'}, {'B', 'D'}, 2}, {{'A', 'D'}, {'B', 'C'}, 2}},
         {{'A', 'B', 'C'},
          {{'A', 2}, {'B', 2}, {'C', 3}},
          {{{'A', 'B'}, {'C', 'E'}}, {{'A', 'C'}, {'B', 'E'}}}}});

    add({"rr_winner", MotifCategory::RoundRobin, {'A', 'B', 'C', 'D'},
         {{{'A', 'B'}, {'C', 'D'}, 1}, {{'A', 'C'}, {'B', 'D'}, 1}, {{'A', 'D'}, {'B', 'C'}, 1}},
         {{'A', 'B', 'C'},
          {{'A', 1}, {'B', 2}, {'C', 3}},
          {{{'A', 'B'}, {'C', 'D'}}, {{'A', 'E'}, {'B', 'C'}}}}});

    add({"confounded_winners", MotifCategory::ConfoundedTeammates, {'A', 'B', 'C', 'D', 'E'},
         {{{'A', 'B'}, {'C', 'D'}, 1}, {{'A', 'B'}, {'C', 'E'}, 1}, {{'A', 'B'}, {'D', 'E'}, 1}},
         {{'A', 'B', 'C'},
          {{'A', 1}, {'B', 2}, {'C', 2}},
          {{{'A', 'B'}, {'C', 'F'}}, {{'A', 'C'}, {'B', 'D'}}}}});

    add({"confounded_losers", MotifCategory::ConfoundedTeammates, {'A', 'B', 'C', 'D', 'E'},
         {{{'A', 'B'}, {'C', 'D'}, 2}, {{'A', 'B'}, {'C', 'E'}, 2}, {{'A', 'B'}, {'D', 'E'}, 2}},
         {{'A', 'B', 'C'},
          {{'A', 1}, {'B', 2}, {'C', 2}},
          {{{'A', 'B'}, {'C', 'F'}}, {{'A', 'C'}, {'B', 'D'}}}}});

    add({"strong_indirect_chain", MotifCategory::StrongIndirect, {'A', 'B', 'C', 'D', 'E', 'F'},
         {{{'C', 'D'}, {'E', 'F'}, 1}, {{'A', 'B'}, {'C', 'D'}, 1}, {{'A', 'B'}, {'E', 'F'}, 1}},
         {{'A', 'C', 'E'},
          {{'A', 2}, {'C', 2}, {'E', 3}},
          {{{'A', 'C'}, {'E', 'G'}}, {{'A', 'B'}, {'C', 'D'}}}}});

    add({"strong_indirect_triangle", MotifCategory::StrongIndirect, {'A', 'B', 'C', 'D', 'E', 'F'},
         {{{'A', 'B'}, {'C', 'D'}, 2}, {{'C', 'D'}, {'E', 'F'}, 1}, {{'A', 'B'}, {'E', 'F'}, 1}},
         {{'A', 'C', 'E'},
          {{'A', 1}, {'C', 2}, {'E', 3}},
          {{{'C', 'D'}, {'E', 'F'}}, {{'A', 'B'}, {'C', 'G'}}}}});

    add({"weak_indirect_chain", MotifCategory::WeakIndirect, {'A', 'B', 'C', 'D', 'E', 'F'},
         {{{'C', 'D'}, {'E', 'F'}, 2}, {{'A', 'B'}, {'C', 'D'}, 1}, {{'A', 'B'}, {'E', 'F'}, 2}},
         {{'A', 'C', 'E'},
          {{'A', 2}, {'C', 1}, {'E', 3}},
          {{{'A', 'B'}, {'C', 'D'}}, {{'A', 'B'}, {'E', 'G'}}}}});

    add({"weak_indirect_cycle", MotifCategory::WeakIndirect, {'A', 'B', 'C', 'D', 'E', 'F'},
         {{{'A', 'B'}, {'C', 'D'}, 1}, {{'C', 'D'}, {'E', 'F'}, 1}, {{'E', 'F'}, {'A', 'B'}, 1}},
         {{'A', 'C', 'E'},
          {{'A', 1}, {'C', 2}, {'E', 3}},
          {{{'A', 'B'}, {'E', 'F'}}, {{'A', 'C'}, {'D', 'G'}}}}});

    add({"singles_chain", MotifCategory::Singles, {'A', 'B', 'C'},
         {{{'A'}, {'B'}, 1}, {{'B'}, {'C'}, 1}, {{'A'}, {'C'}, 1}},
         {{'A', 'B', 'C'},
          {{'A', 1}, {'B', 2}, {'C', 3}},
          {{{'B'}, {'D'}}, {{'A'}, {'C'}}}}});

    add({"singles_dominance", MotifCategory::Singles, {'A', 'B', 'C'},
         {{{'A'}, {'B'}, 1}, {{'A'}, {'C'}, 1}, {{'B'}, {'C'}, 2}},
         {{'A', 'B', 'C'},
          {{'A', 1}, {'B', 3}, {'C', 2}},
          {{{'A'}, {'C'}}, {{'B'}, {'D'}}}}});

    add({"diverse_partners", MotifCategory::Diverse, {'A', 'B', 'C', 'D', 'E'},
         {{{'A', 'B'}, {'C', 'D'}, 1}, {{'A', 'C'}, {'D', 'E'}, 1}, {{'A', 'D'}, {'B', 'E'}, 1}},
         {{'A', 'B', 'C'},
          {{'A', 1}, {'B', 1}, {'C', 2}},
          {{{'A', 'E'}, {'C', 'D'}}, {{'B', 'C'}, {'D', 'F'}}}}});

    add({"diverse_opponents", MotifCategory::Diverse, {'A', 'B', 'C', 'D', 'E'},
         {{{'A', 'B'}, {'C', 'D'}, 1}, {{'A', 'B'}, {'C', 'E'}, 1}, {{'A', 'D'}, {'C', 'E'}, 1}},
         {{'A', 'C', 'D'},
          {{'A', 1}, {'C', 2}, {'D', 3}},
          {{{'A', 'C'}, {'D', 'E'}}, {{'A', 'B'}, {'D', 'F'}}}}});

    {
      Motif m{"anomalous_loss_pair", MotifCategory::Anomalous, {'A', 'B', 'C', 'D', 'E'},
              {{{'A', 'B'}, {'C', 'D'}, 1}, {{'A', 'B'}, {'C', 'E'}, 1}, {{'A', 'B'}, {'C', 'D'}, 2}},
              {{'A', 'B', 'C'},
               {{'A', 1}, {'A', 2}, {'A', 3}},
               {{{'A', 'B'}, {'C', 'D'}}, {{'A', 'B'}, {'C', 'F'}}}}};
      m.focal_role = 'A';
      m.anomalous_match = 3;
      add(std::move(m));
    }

    {
      Motif m{"anomalous_win_pair", MotifCategory::Anomalous, {'A', 'B', 'C', 'D', 'E'},
              {{{'A', 'B'}, {'C', 'D'}, 2}, {{'A', 'B'}, {'C', 'E'}, 2}, {{'A', 'B'}, {'C', 'D'}, 1}},
              {{'C', 'A', 'D'},
               {{'C', 1}, {'C', 2}, {'C', 3}},
               {{{'A', 'B'}, {'C', 'D'}}, {{'C', 'D'}, {'A', 'F'}}}}};
      m.focal_role = 'C';
      m.anomalous_match = 3;
      add(std::move(m));
    }

    {
      Motif m{"anomalous_loss_single", MotifCategory::Anomalous, {'A', 'B', 'C'},
              {{{'A'}, {'B'}, 1}, {{'A'}, {'C'}, 1}, {{'A'}, {'B'}, 2}},
              {{'A', 'B', 'C'},
               {{'A', 1}, {'A', 2}, {'A', 3}},
               {{{'A'}, {'B'}}, {{'A'}, {'D'}}}}};
      m.focal_role = 'A';
      m.anomalous_match = 3;
      add(std::move(m));
    }

    {
      Motif m{"anomalous_streak", MotifCategory::Anomalous, {'A', 'B', 'C', 'D'},
              {{{'A', 'B'}, {'C', 'D'}, 1},
               {{'A', 'B'}, {'C', 'D'}, 1},
               {{'A', 'B'}, {'C', 'D'}, 1},
               {{'A', 'B'}, {'C', 'D'}, 2}},
              {{'A', 'B', 'C'},
               {{'A', 1}, {'A', 2}, {'A', 4}},
               {{{'A', 'B'}, {'C', 'D'}}, {{'A', 'C'}, {'B', 'D'}}}}};
      m.focal_role = 'A';
      m.anomalous_match = 4;
      add(std::move(m));
    }

    return out;
  }();
  return motifs;
}

inline const Motif& find_motif(const std::string& id) {
  for (const auto& m : list_motifs())
    if (m.id == id) return m;
  throw UnknownMotifError(id);
}

}  // namespace msa::olympics
