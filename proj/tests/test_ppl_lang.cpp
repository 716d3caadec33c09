#include <catch2/catch_amalgamated.hpp>

#include "msa/ppl/parser.hpp"
#include "msa/ppl/pretty.hpp"

#include "support/programs.hpp"

using namespace msa::ppl;

namespace {

Program parse_ok(std::string_view text) {
  auto r = parse_program(text);
  std::string message = r.diagnostic ? r.diagnostic->to_string() : std::string("ok");
  INFO(message);
  REQUIRE(r.ok());
  return std::move(*r.value);
}

ExprPtr parse_expr_ok(std::string_view text) {
  auto r = parse_expression(text);
  std::string message = r.diagnostic ? r.diagnostic->to_string() : std::string("ok");
  INFO(message);
  REQUIRE(r.ok());
  return std::move(*r.value);
}

}  // namespace

TEST_CASE("minimal declaration parses to a flip call") {
  Program p = parse_ok("var x = flip(0.5);");
  auto decls = p.declarations();
  REQUIRE(decls.size() == 1);
  CHECK(decls[0]->name == "x");
  const auto& call = std::get<Call>(decls[0]->init->node);
  CHECK(std::get<Ident>(call.callee->node).name == "flip");
  REQUIRE(call.args.size() == 1);
  CHECK(std::get<NumberLit>(call.args[0]->node).value == 0.5);
}

TEST_CASE("Infer declaration carries model and method options") {
  Program p = parse_ok("var posterior = Infer({ model: model, method: 'rejection'});");
  auto decls = p.declarations();
  REQUIRE(decls.size() == 1);
  const auto& infer = std::get<InferExpr>(decls[0]->init->node);
  const auto& rec = std::get<RecordLit>(infer.options->node);
  REQUIRE(rec.fields.size() == 2);
  CHECK(rec.fields[0].key == "model");
  CHECK(rec.fields[1].key == "method");
  CHECK(std::get<StringLit>(rec.fields[1].value->node).value == "rejection");
}

TEST_CASE("missing identifier after var is a syntax diagnostic at line 1") {
  auto r = parse_program("var = 3;");
  REQUIRE_FALSE(r.ok());
  CHECK(r.diagnostic->kind == DiagnosticKind::Syntax);
  CHECK(r.diagnostic->line == 1);
  CHECK(r.diagnostic->message.find("identifier") != std::string::npos);
}

TEST_CASE("condition expression with nested record argument") {
  ExprPtr e = parse_expr_ok(
      "condition(lost({team1: ['fey', 'ollie'], team2: ['lane', 'jamie'], race: 1}))");
  const auto& cond = std::get<ConditionExpr>(e->node);
  const auto& call = std::get<Call>(cond.arg->node);
  CHECK(std::get<Ident>(call.callee->node).name == "lost");
  const auto& rec = std::get<RecordLit>(call.args[0]->node);
  REQUIRE(rec.fields.size() == 3);
  const auto& team1 = std::get<ListLit>(rec.fields[0].value->node);
  CHECK(std::get<StringLit>(team1.items[0]->node).value == "fey");
}

TEST_CASE("call with a free identifier parses") {
  ExprPtr e = parse_expr_ok("intrinsic_strength_rank({athlete: 'robin', out_of_n_athletes: 100})");
  const auto& call = std::get<Call>(e->node);
  CHECK(std::get<Ident>(call.callee->node).name == "intrinsic_strength_rank");
}

TEST_CASE("truncated input is a diagnostic") {
  auto r = parse_expression("1 +");
  REQUIRE_FALSE(r.ok());
  CHECK(r.diagnostic->kind == DiagnosticKind::Syntax);
}

TEST_CASE("trailing garbage after an expression is a diagnostic") {
  auto r = parse_expression("1 + 2 foo");
  REQUIRE_FALSE(r.ok());
}

TEST_CASE("empty source is rejected") {
  auto r = parse_program("");
  REQUIRE_FALSE(r.ok());
}

TEST_CASE("line comments are lexed and discarded") {
  Program p = parse_ok("// a comment\nvar x = 1; // trailing\n// tail\n");
  CHECK(p.declarations().size() == 1);
}

TEST_CASE("duplicate record keys are rejected") {
  auto r = parse_expression("{a: 1, a: 2}");
  REQUIRE_FALSE(r.ok());
  CHECK(r.diagnostic->message.find("duplicate") != std::string::npos);
}

TEST_CASE("lex errors carry exact spans") {
  auto r = parse_program("var x = 1;\nvar y = @;");
  REQUIRE_FALSE(r.ok());
  CHECK(r.diagnostic->kind == DiagnosticKind::Lex);
  CHECK(r.diagnostic->line == 2);
  CHECK(r.diagnostic->column == 9);
}

TEST_CASE("free_functions finds unbound call targets") {
  ExprPtr cond = parse_expr_ok("condition(beat({team1: ['a'], team2: ['b'], match: 1}))");
  Program defs = parse_ok("var model = function() { return 1; };");
  std::vector<const Expr*> exprs{cond.get()};
  CHECK(free_functions(exprs, defs) == std::vector<std::string>{"beat"});
}

TEST_CASE("free_functions on empty input is empty") {
  Program defs = parse_ok("var x = 1;");
  CHECK(free_functions({}, defs).empty());
}

TEST_CASE("free_functions respects bindings nested inside defs") {
  // Hand-listed binding table for this fixture: model, strength, beat (nested),
  // plus the standard library.
  Program defs = parse_ok(R"(var model = function() {
  var strength = mem(function({athlete}) { return gaussian(50, 15); });
  var beat = function({team1, team2, match}) { return flip(0.5); };
  return 1;
};)");
  ExprPtr e1 = parse_expr_ok("condition(beat({team1: ['a'], team2: ['b'], match: 1}))");
  ExprPtr e2 = parse_expr_ok("flip(0.5)");
  std::vector<const Expr*> exprs{e1.get(), e2.get()};
  CHECK(free_functions(exprs, defs).empty());
}

TEST_CASE("free_functions is sorted and deduplicated") {
  ExprPtr e1 = parse_expr_ok("zeta({x: 1}) && alpha({y: 2}) && zeta({x: 3})");
  Program defs = parse_ok("var unused = 1;");
  std::vector<const Expr*> exprs{e1.get()};
  CHECK(free_functions(exprs, defs) == std::vector<std::string>{"alpha", "zeta"});
}

TEST_CASE("free_functions ignores function-literal parameters inside the expression") {
  ExprPtr e = parse_expr_ok("any(function(pred) { return pred(1); }, [f(2)])");
  Program defs = parse_ok("var unused = 1;");
  std::vector<const Expr*> exprs{e.get()};
  CHECK(free_functions(exprs, defs) == std::vector<std::string>{"f"});
}

TEST_CASE("record key order is insignificant for AST equality") {
  ExprPtr a = parse_expr_ok("{a: 1, b: 2}");
  ExprPtr b = parse_expr_ok("{b: 2, a: 1}");
  ExprPtr c = parse_expr_ok("{a: 1, b: 3}");
  CHECK(ast_equal(*a, *b));
  CHECK_FALSE(ast_equal(*a, *c));
}

TEST_CASE("pretty printer golden output") {
  Program p = parse_ok(
      "var f = mem(function({athlete}) { var s = gaussian(50, 15); "
      "condition(s >= 0 && s <= 100); return s; });\n"
      "var model = function() { if (flip(0.5)) { return {q: 1}; } else { return {q: 0}; } };\n"
      "var posterior = Infer({ method: 'rejection', model: model });");
  const std::string expected =
      "var f = mem(function({athlete}) {\n"
      "  var s = gaussian(50, 15);\n"
      "  condition(s >= 0 && s <= 100);\n"
      "  return s;\n"
      "});\n"
      "var model = function() {\n"
      "  if (flip(0.5)) {\n"
      "    return {q: 1};\n"
      "  } else {\n"
      "    return {q: 0};\n"
      "  }\n"
      "};\n"
      "var posterior = Infer({method: 'rejection', model: model});\n";
  CHECK(pretty_print(p) == expected);
}

TEST_CASE("pretty printer sorts record keys canonically") {
  ExprPtr e = parse_expr_ok("{b: 2, a: 1}");
  CHECK(pretty_print(*e) == "{a: 1, b: 2}");
}

TEST_CASE("pretty printer parenthesizes by precedence") {
  auto roundtrip_text = [](std::string_view text) {
    auto e = parse_expression(text);
    REQUIRE(e.ok());
    return pretty_print(**e.value);
  };
  CHECK(roundtrip_text("(1 + 2) * 3") == "(1 + 2) * 3");
  CHECK(roundtrip_text("1 + 2 * 3") == "1 + 2 * 3");
  CHECK(roundtrip_text("1 - (2 - 3)") == "1 - (2 - 3)");
  CHECK(roundtrip_text("!(a && b)") == "!(a && b)");
  CHECK(roundtrip_text("a ? b : c ? d : e") == "a ? b : c ? d : e");
  CHECK(roundtrip_text("(a ? b : c) ? d : e") == "(a ? b : c) ? d : e");
}

TEST_CASE("round-trip: parse then pretty-print then parse is identity") {
  for (const auto& text : msa::testing::roundtrip_corpus()) {
    Program original = parse_ok(text);
    std::string printed = pretty_print(original);
    CAPTURE(printed);
    Program reparsed = parse_ok(printed);
    CHECK(ast_equal(original, reparsed));
    // The canonical form is a fixed point.
    CHECK(pretty_print(reparsed) == printed);
  }
}

TEST_CASE("node spans lie within source bounds and siblings do not overlap") {
  std::string source =
      "var x = flip(0.5);\nvar model = function() { var a = x ? 1 : 0; return {q: a + 2}; };\n";
  Program p = parse_ok(source);
  msa::testing::check_spans(p, source.size());
}

TEST_CASE("number formatting is shortest round-trip") {
  CHECK(format_number(3.0) == "3");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(100.0) == "100");
  CHECK(format_number(0.1) == "0.1");
}
