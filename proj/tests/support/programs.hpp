#pragma once

// Shared test fixtures: a corpus of discrete programs with an independent
// enumeration oracle, round-trip inputs, and span/TVD checkers.

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "msa/ppl/ast.hpp"
#include "msa/ppl/enumerate.hpp"
#include "msa/ppl/parser.hpp"
#include "msa/ppl/rejection.hpp"

namespace msa::testing {

struct NamedProgram {
  std::string name;
  std::string text;
};

// Discrete fixture programs: finite-support primitives only, numeric queries,
// suitable for both rejection sampling and exact enumeration.
inline const std::vector<NamedProgram>& discrete_fixtures() {
  static const std::vector<NamedProgram> fixtures = {
      {"single_flip", R"(var model = function() {
  return {q: flip(0.5) ? 1 : 0};
};
var posterior = Infer({ model: model, method: 'rejection'});
)"},
      {"biased_flip", R"(var model = function() {
  return {q: flip(0.85) ? 100 : 0};
};
var posterior = Infer({ model: model, method: 'rejection'});
)"},
      {"two_flip_disjunction", R"(var model = function() {
  var a = flip(0.5);
  var b = flip(0.5);
  condition(a || b);
  return {a: a ? 1 : 0};
};
var posterior = Infer({ model: model, method: 'rejection'});
)"},
      {"binomial_three", R"(var model = function() {
  var draws = map(function(i) { return flip(0.3) ? 1 : 0; }, [1, 2, 3]);
  return {total: sum(draws)};
};
var posterior = Infer({ model: model, method: 'rejection'});
)"},
      {"conditioned_binomial", R"(var model = function() {
  var draws = map(function(i) { return flip(0.25) ? 1 : 0; }, [1, 2, 3]);
  condition(sum(draws) >= 1);
  return {total: sum(draws)};
};
var posterior = Infer({ model: model, method: 'rejection'});
)"},
      {"categorical_excluded", R"(var model = function() {
  var v = categorical({ps: [0.1, 0.2, 0.3, 0.4], vs: [1, 2, 3, 4]});
  condition(v != 3);
  return {v: v};
};
var posterior = Infer({ model: model, method: 'rejection'});
)"},
      {"uniform_draw_filtered", R"(var model = function() {
  var x = uniformDraw([10, 20, 30]);
  condition(x != 20);
  return {x: x};
};
var posterior = Infer({ model: model, method: 'rejection'});
)"},
      {"memoized_pair", R"(var model = function() {
  var trait = mem(function({athlete}) { return flip(0.6); });
  var both = trait({athlete: 'kay'}) && trait({athlete: 'kai'});
  var again = trait({athlete: 'kay'});
  condition(again == trait({athlete: 'kay'}));
  return {both: both ? 1 : 0};
};
var posterior = Infer({ model: model, method: 'rejection'});
)"},
      {"branchy_if", R"(var helper = function(x) {
  if (x > 1) {
    return flip(0.9) ? 5 : 1;
  }
  return flip(0.2) ? 5 : 1;
};
var model = function() {
  var pick = uniformDraw([1, 2]);
  return {score: helper(pick)};
};
var posterior = Infer({ model: model, method: 'rejection'});
)"},
      {"temporal_injury", R"(var model = function() {
  var hurt = mem(function({t}) { return flip(0.3); });
  var weakened = any_previous_time_inclusive(function(s) { return hurt({t: s}); }, 2);
  condition(!hurt({t: 3}));
  return {weak: weakened ? 1 : 0};
};
var posterior = Infer({ model: model, method: 'rejection'});
)"},
      {"bounded_recursion", R"(var count_runs = function(n) {
  if (n >= 4) {
    return n;
  }
  return flip(0.5) ? n : count_runs(n + 1);
};
var model = function() {
  return {runs: count_runs(0)};
};
var posterior = Infer({ model: model, method: 'rejection'});
)"},
      {"reduce_pipeline", R"(var model = function() {
  var bits = map(function(i) { return flip(0.5) ? 1 : 0; }, [1, 2, 3, 4]);
  var total = reduce(function(acc, x) { return acc + x; }, 0, bits);
  condition(total <= 3);
  return {total: total, has_any: any(function(b) { return b == 1; }, bits) ? 1 : 0};
};
var posterior = Infer({ model: model, method: 'rejection'});
)"},
  };
  return fixtures;
}

// Programs exercising every grammar construct, for round-trip property tests.
inline std::vector<std::string> roundtrip_corpus() {
  std::vector<std::string> out;
  for (const auto& fixture : discrete_fixtures()) out.push_back(fixture.text);
  out.push_back(
      "var weird = function(a, b) {\n"
      "  var t = a < b == false;\n"
      "  var u = -a * (b + 2) % 3;\n"
      "  var v = !t && (u >= 1 || a != b);\n"
      "  var w = {nested: [{x: 1}, [2, 3], 'str\\'esc'], flag: true};\n"
      "  return v ? w : {nested: [], flag: false};\n"
      "};\n"
      "var posterior = Infer({model: function() { return {q: 1}; }});\n");
  return out;
}

inline msa::ppl::Program must_parse(const std::string& text) {
  auto r = msa::ppl::parse_program(text);
  if (!r.ok()) throw std::runtime_error("fixture failed to parse: " + r.diagnostic->to_string());
  return std::move(*r.value);
}

// --- span checking ---

namespace detail {

inline void collect_child_spans(const msa::ppl::Expr& e,
                                std::vector<const msa::ppl::Expr*>& children) {
  using namespace msa::ppl;
  if (const auto* list = std::get_if<ListLit>(&e.node)) {
    for (const auto& i : list->items) children.push_back(i.get());
  } else if (const auto* rec = std::get_if<RecordLit>(&e.node)) {
    for (const auto& f : rec->fields) children.push_back(f.value.get());
  } else if (const auto* call = std::get_if<Call>(&e.node)) {
    children.push_back(call->callee.get());
    for (const auto& a : call->args) children.push_back(a.get());
  } else if (const auto* un = std::get_if<UnaryExpr>(&e.node)) {
    children.push_back(un->operand.get());
  } else if (const auto* bin = std::get_if<BinaryExpr>(&e.node)) {
    children.push_back(bin->lhs.get());
    children.push_back(bin->rhs.get());
  } else if (const auto* ter = std::get_if<TernaryExpr>(&e.node)) {
    children.push_back(ter->cond.get());
    children.push_back(ter->then_branch.get());
    children.push_back(ter->else_branch.get());
  } else if (const auto* m = std::get_if<MemExpr>(&e.node)) {
    children.push_back(m->fn.get());
  } else if (const auto* c = std::get_if<ConditionExpr>(&e.node)) {
    children.push_back(c->arg.get());
  } else if (const auto* inf = std::get_if<InferExpr>(&e.node)) {
    children.push_back(inf->options.get());
  }
}

inline void check_expr_spans(const msa::ppl::Expr& e, std::size_t source_size);

inline void check_sibling_spans(const std::vector<const msa::ppl::Expr*>& siblings,
                                std::size_t source_size) {
  for (std::size_t i = 0; i < siblings.size(); ++i) {
    const auto& s = siblings[i]->span;
    if (s.end > source_size || s.begin > s.end)
      throw std::runtime_error("span out of source bounds");
    for (std::size_t j = i + 1; j < siblings.size(); ++j) {
      const auto& t = siblings[j]->span;
      bool disjoint = s.end <= t.begin || t.end <= s.begin;
      if (!disjoint) throw std::runtime_error("sibling spans overlap");
    }
    check_expr_spans(*siblings[i], source_size);
  }
}

inline void check_expr_spans(const msa::ppl::Expr& e, std::size_t source_size) {
  std::vector<const msa::ppl::Expr*> children;
  collect_child_spans(e, children);
  for (const auto* c : children) {
    if (c->span.begin < e.span.begin || c->span.end > e.span.end) {
      // Parenthesized children may start before the parent operator span?
      // No: parent spans always cover children in this grammar.
      throw std::runtime_error("child span escapes parent span");
    }
  }
  check_sibling_spans(children, source_size);
}

}  // namespace detail

inline void check_spans(const msa::ppl::Program& p, std::size_t source_size) {
  using namespace msa::ppl;
  std::vector<const Expr*> top;
  for (const auto& s : p.stmts) {
    if (s.span.end > source_size) throw std::runtime_error("stmt span out of bounds");
    if (const auto* d = std::get_if<VarDecl>(&s.node)) top.push_back(d->init.get());
    else if (const auto* es = std::get_if<ExprStmt>(&s.node)) top.push_back(es->expr.get());
    else if (const auto* r = std::get_if<ReturnStmt>(&s.node)) top.push_back(r->expr.get());
  }
  detail::check_sibling_spans(top, source_size);
}

// --- distribution comparison against the exact oracle ---

// Total variation distance between the empirical distribution of sampled
// values and the exact marginal for one query label.
inline double tvd_samples_vs_exact(const std::vector<double>& samples,
                                   const msa::ppl::ExactDistribution& exact,
                                   const std::string& label) {
  std::map<std::string, double> exact_marginal = exact.marginal(label);
  std::map<std::string, double> empirical;
  for (double s : samples)
    empirical[msa::ppl::canonical_encode(msa::ppl::Value::number(s))] +=
        1.0 / static_cast<double>(samples.size());
  std::set<std::string> keys;
  for (const auto& [k, _] : exact_marginal) keys.insert(k);
  for (const auto& [k, _] : empirical) keys.insert(k);
  double total = 0;
  for (const auto& k : keys) {
    double p = exact_marginal.count(k) ? exact_marginal.at(k) : 0.0;
    double q = empirical.count(k) ? empirical.at(k) : 0.0;
    total += std::abs(p - q);
  }
  return 0.5 * total;
}

// Worst-case TVD across all query labels of an estimate.
inline double tvd_estimate_vs_exact(const msa::ppl::PosteriorEstimate& estimate,
                                    const msa::ppl::ExactDistribution& exact) {
  double worst = 0;
  for (const auto& [label, samples] : estimate.queries)
    worst = std::max(worst, tvd_samples_vs_exact(samples, exact, label));
  return worst;
}

// TVD between two sampled estimates over a shared label (discrete values).
inline double tvd_between_estimates(const msa::ppl::PosteriorEstimate& a,
                                    const msa::ppl::PosteriorEstimate& b,
                                    const std::string& label) {
  std::map<std::string, double> pa, pb;
  const auto& xa = a.queries.at(label);
  const auto& xb = b.queries.at(label);
  for (double x : xa)
    pa[msa::ppl::canonical_encode(msa::ppl::Value::number(x))] += 1.0 / static_cast<double>(xa.size());
  for (double x : xb)
    pb[msa::ppl::canonical_encode(msa::ppl::Value::number(x))] += 1.0 / static_cast<double>(xb.size());
  std::set<std::string> keys;
  for (const auto& [k, _] : pa) keys.insert(k);
  for (const auto& [k, _] : pb) keys.insert(k);
  double total = 0;
  for (const auto& k : keys) {
    double p = pa.count(k) ? pa.at(k) : 0.0;
    double q = pb.count(k) ? pb.at(k) : 0.0;
    total += std::abs(p - q);
  }
  return 0.5 * total;
}

}  // namespace msa::testing
