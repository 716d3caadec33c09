#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "msa/ppl/ast.hpp"
#include "msa/ppl/lexer.hpp"
#include "msa/ppl/stdlib_names.hpp"

namespace msa::ppl {

enum class ProgramOrigin { Gold, Synthesized, Fixture };

struct SourceProgram {
  std::string text;
  ProgramOrigin origin = ProgramOrigin::Fixture;
};

template <typename T>
struct ParseResult {
  std::optional<T> value;
  std::optional<ParseDiagnostic> diagnostic;
  bool ok() const { return value.has_value(); }
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {
    Lexer lexer(src);
    tokens_ = lexer.tokenize();
  }

  Program parse_program() {
    Program p;
    p.source = std::string(src_);
    while (!at(TokenKind::Eof)) p.stmts.push_back(parse_statement());
    return p;
  }

  ExprPtr parse_sole_expression() {
    ExprPtr e = parse_expr();
    expect(TokenKind::Eof, "end of input after expression");
    return e;
  }

 private:
  std::string_view src_;
  std::vector<Token> tokens_;
  std::size_t idx_ = 0;

  const Token& cur() const { return tokens_[idx_]; }
  bool at(TokenKind k) const { return cur().kind == k; }

  const Token& advance() { return tokens_[idx_++]; }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseAbort{{DiagnosticKind::Syntax, msg, cur().span.line, cur().span.column}};
  }

  const Token& expect(TokenKind k, const std::string& what) {
    if (!at(k)) fail("expected " + what);
    return advance();
  }

  bool accept(TokenKind k) {
    if (at(k)) {
      ++idx_;
      return true;
    }
    return false;
  }

  static Span join(Span a, Span b) { return {a.begin, b.end, a.line, a.column}; }

  ExprPtr make_expr(Span span, auto&& node) {
    auto e = std::make_unique<Expr>();
    e->span = span;
    e->node = std::forward<decltype(node)>(node);
    return e;
  }

  // --- statements ---

  Stmt parse_statement() {
    Span begin = cur().span;
    if (accept(TokenKind::KwVar)) {
      if (!at(TokenKind::Ident)) fail("an identifier after 'var'");
      std::string name(advance().text);
      expect(TokenKind::Assign, "'=' in var declaration");
      ExprPtr init = parse_expr();
      Span end = expect(TokenKind::Semicolon, "';' after declaration").span;
      return Stmt{join(begin, end), VarDecl{std::move(name), std::move(init)}};
    }
    if (accept(TokenKind::KwReturn)) {
      ExprPtr e = parse_expr();
      Span end = expect(TokenKind::Semicolon, "';' after return value").span;
      return Stmt{join(begin, end), ReturnStmt{std::move(e)}};
    }
    if (at(TokenKind::KwIf)) return parse_if();
    ExprPtr e = parse_expr();
    Span end = expect(TokenKind::Semicolon, "';' after expression statement").span;
    return Stmt{join(begin, end), ExprStmt{std::move(e)}};
  }

  Stmt parse_if() {
    Span begin = expect(TokenKind::KwIf, "'if'").span;
    expect(TokenKind::LParen, "'(' after 'if'");
    ExprPtr cond = parse_expr();
    expect(TokenKind::RParen, "')' after if condition");
    auto then_block = parse_block();
    std::unique_ptr<Block> else_block;
    Span end = then_block.second;
    if (accept(TokenKind::KwElse)) {
      if (at(TokenKind::KwIf)) {
        // else-if chains desugar to an else block holding a single if.
        Stmt nested = parse_if();
        end = nested.span;
        else_block = std::make_unique<Block>();
        else_block->stmts.push_back(std::move(nested));
      } else {
        auto blk = parse_block();
        else_block = std::move(blk.first);
        end = blk.second;
      }
    }
    return Stmt{join(begin, end),
                IfStmt{std::move(cond), std::move(then_block.first), std::move(else_block)}};
  }

  std::pair<std::unique_ptr<Block>, Span> parse_block() {
    Span begin = expect(TokenKind::LBrace, "'{' to open a block").span;
    auto block = std::make_unique<Block>();
    while (!at(TokenKind::RBrace)) {
      if (at(TokenKind::Eof)) fail("'}' to close the block");
      block->stmts.push_back(parse_statement());
    }
    Span end = advance().span;
    return {std::move(block), join(begin, end)};
  }

  // --- expressions, lowest to highest precedence ---

  ExprPtr parse_expr() { return parse_ternary(); }

  ExprPtr parse_ternary() {
    ExprPtr cond = parse_or();
    if (!accept(TokenKind::Question)) return cond;
    ExprPtr then_branch = parse_ternary();
    expect(TokenKind::Colon, "':' in conditional expression");
    ExprPtr else_branch = parse_ternary();
    Span span = join(cond->span, else_branch->span);
    return make_expr(span, TernaryExpr{std::move(cond), std::move(then_branch),
                                       std::move(else_branch)});
  }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (accept(TokenKind::OrOr)) {
      ExprPtr rhs = parse_and();
      Span span = join(lhs->span, rhs->span);
      lhs = make_expr(span, BinaryExpr{BinaryOp::Or, std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_equality();
    while (accept(TokenKind::AndAnd)) {
      ExprPtr rhs = parse_equality();
      Span span = join(lhs->span, rhs->span);
      lhs = make_expr(span, BinaryExpr{BinaryOp::And, std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  ExprPtr parse_equality() {
    ExprPtr lhs = parse_relational();
    for (;;) {
      BinaryOp op;
      if (accept(TokenKind::EqEq)) op = BinaryOp::Eq;
      else if (accept(TokenKind::NotEq)) op = BinaryOp::Ne;
      else return lhs;
      ExprPtr rhs = parse_relational();
      Span span = join(lhs->span, rhs->span);
      lhs = make_expr(span, BinaryExpr{op, std::move(lhs), std::move(rhs)});
    }
  }

  ExprPtr parse_relational() {
    ExprPtr lhs = parse_additive();
    for (;;) {
      BinaryOp op;
      if (accept(TokenKind::Lt)) op = BinaryOp::Lt;
      else if (accept(TokenKind::Le)) op = BinaryOp::Le;
      else if (accept(TokenKind::Gt)) op = BinaryOp::Gt;
      else if (accept(TokenKind::Ge)) op = BinaryOp::Ge;
      else return lhs;
      ExprPtr rhs = parse_additive();
      Span span = join(lhs->span, rhs->span);
      lhs = make_expr(span, BinaryExpr{op, std::move(lhs), std::move(rhs)});
    }
  }

  ExprPtr parse_additive() {
    ExprPtr lhs = parse_multiplicative();
    for (;;) {
      BinaryOp op;
      if (accept(TokenKind::Plus)) op = BinaryOp::Add;
      else if (accept(TokenKind::Minus)) op = BinaryOp::Sub;
      else return lhs;
      ExprPtr rhs = parse_multiplicative();
      Span span = join(lhs->span, rhs->span);
      lhs = make_expr(span, BinaryExpr{op, std::move(lhs), std::move(rhs)});
    }
  }

  ExprPtr parse_multiplicative() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      BinaryOp op;
      if (accept(TokenKind::Star)) op = BinaryOp::Mul;
      else if (accept(TokenKind::Slash)) op = BinaryOp::Div;
      else if (accept(TokenKind::Percent)) op = BinaryOp::Mod;
      else return lhs;
      ExprPtr rhs = parse_unary();
      Span span = join(lhs->span, rhs->span);
      lhs = make_expr(span, BinaryExpr{op, std::move(lhs), std::move(rhs)});
    }
  }

  ExprPtr parse_unary() {
    if (at(TokenKind::Not) || at(TokenKind::Minus)) {
      Token op = advance();
      ExprPtr operand = parse_unary();
      Span span = join(op.span, operand->span);
      UnaryOp uop = op.kind == TokenKind::Not ? UnaryOp::Not : UnaryOp::Neg;
      return make_expr(span, UnaryExpr{uop, std::move(operand)});
    }
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_primary();
    while (at(TokenKind::LParen)) {
      advance();
      std::vector<ExprPtr> args;
      if (!at(TokenKind::RParen)) {
        do {
          args.push_back(parse_expr());
        } while (accept(TokenKind::Comma));
      }
      Span end = expect(TokenKind::RParen, "')' after call arguments").span;
      Span span = join(e->span, end);

      if (const auto* id = std::get_if<Ident>(&e->node)) {
        if (id->name == "mem") {
          if (args.size() != 1) fail("mem takes exactly one argument");
          e = make_expr(span, MemExpr{std::move(args[0])});
          continue;
        }
        if (id->name == "condition") {
          if (args.size() != 1) fail("condition takes exactly one argument");
          e = make_expr(span, ConditionExpr{std::move(args[0])});
          continue;
        }
        if (id->name == "Infer") {
          if (args.size() != 1) fail("Infer takes exactly one options record");
          e = make_expr(span, InferExpr{std::move(args[0])});
          continue;
        }
      }
      e = make_expr(span, Call{std::move(e), std::move(args)});
    }
    return e;
  }

  ExprPtr parse_primary() {
    Span begin = cur().span;
    if (at(TokenKind::Number)) {
      Token t = advance();
      return make_expr(t.span, NumberLit{t.number});
    }
    if (at(TokenKind::String)) {
      Token t = advance();
      return make_expr(t.span, StringLit{std::move(t.string)});
    }
    if (accept(TokenKind::KwTrue)) return make_expr(begin, BoolLit{true});
    if (accept(TokenKind::KwFalse)) return make_expr(begin, BoolLit{false});
    if (at(TokenKind::Ident)) {
      Token t = advance();
      return make_expr(t.span, Ident{std::string(t.text)});
    }
    if (accept(TokenKind::LParen)) {
      ExprPtr inner = parse_expr();
      expect(TokenKind::RParen, "')' to close parenthesized expression");
      return inner;
    }
    if (at(TokenKind::LBracket)) return parse_list();
    if (at(TokenKind::LBrace)) return parse_record();
    if (at(TokenKind::KwFunction)) return parse_function();
    fail("an expression");
  }

  ExprPtr parse_list() {
    Span begin = expect(TokenKind::LBracket, "'['").span;
    ListLit list;
    if (!at(TokenKind::RBracket)) {
      do {
        list.items.push_back(parse_expr());
      } while (accept(TokenKind::Comma));
    }
    Span end = expect(TokenKind::RBracket, "']' to close list literal").span;
    return make_expr(join(begin, end), std::move(list));
  }

  ExprPtr parse_record() {
    Span begin = expect(TokenKind::LBrace, "'{'").span;
    RecordLit rec;
    std::set<std::string> seen;
    if (!at(TokenKind::RBrace)) {
      do {
        std::string key;
        if (at(TokenKind::Ident)) {
          key = std::string(advance().text);
        } else if (at(TokenKind::String)) {
          key = advance().string;
        } else {
          fail("a record key");
        }
        if (!seen.insert(key).second) fail("duplicate record key '" + key + "'");
        expect(TokenKind::Colon, "':' after record key");
        rec.fields.push_back(RecordField{std::move(key), parse_expr()});
      } while (accept(TokenKind::Comma));
    }
    Span end = expect(TokenKind::RBrace, "'}' to close record literal").span;
    return make_expr(join(begin, end), std::move(rec));
  }

  ExprPtr parse_function() {
    Span begin = expect(TokenKind::KwFunction, "'function'").span;
    expect(TokenKind::LParen, "'(' after 'function'");
    ParamList params;
    if (accept(TokenKind::LBrace)) {
      params.destructured = true;
      std::set<std::string> seen;
      if (!at(TokenKind::RBrace)) {
        do {
          if (!at(TokenKind::Ident)) fail("a parameter name in destructuring pattern");
          std::string name(advance().text);
          if (!seen.insert(name).second) fail("duplicate parameter '" + name + "'");
          params.names.push_back(std::move(name));
        } while (accept(TokenKind::Comma));
      }
      expect(TokenKind::RBrace, "'}' to close destructuring pattern");
    } else if (!at(TokenKind::RParen)) {
      std::set<std::string> seen;
      do {
        if (!at(TokenKind::Ident)) fail("a parameter name");
        std::string name(advance().text);
        if (!seen.insert(name).second) fail("duplicate parameter '" + name + "'");
        params.names.push_back(std::move(name));
      } while (accept(TokenKind::Comma));
    }
    expect(TokenKind::RParen, "')' after parameter list");
    auto body = parse_block();
    return make_expr(join(begin, body.second), FnLit{std::move(params), std::move(body.first)});
  }
};

}  // namespace detail

inline ParseResult<Program> parse_program(std::string_view text) {
  ParseResult<Program> result;
  if (text.empty()) {
    result.diagnostic = ParseDiagnostic{DiagnosticKind::Syntax, "empty source", 1, 1};
    return result;
  }
  try {
    detail::Parser p(text);
    result.value = p.parse_program();
  } catch (const ParseAbort& abort) {
    result.diagnostic = abort.diagnostic;
  }
  return result;
}

inline ParseResult<Program> parse_program(const SourceProgram& src) {
  return parse_program(std::string_view(src.text));
}

inline ParseResult<ExprPtr> parse_expression(std::string_view text) {
  ParseResult<ExprPtr> result;
  try {
    detail::Parser p(text);
    result.value = p.parse_sole_expression();
  } catch (const ParseAbort& abort) {
    result.diagnostic = abort.diagnostic;
  }
  return result;
}

// --- free-function analysis ---

namespace detail {

struct ScopeStack {
  std::vector<std::vector<std::string>> frames;

  bool bound(const std::string& name) const {
    for (const auto& f : frames)
      for (const auto& n : f)
        if (n == name) return true;
    return false;
  }
};

void collect_free_calls(const Expr& e, ScopeStack& scope, std::set<std::string>& out);

inline void collect_free_calls(const Block& block, ScopeStack& scope,
                               std::set<std::string>& out) {
  scope.frames.emplace_back();
  for (const auto& s : block.stmts) {
    if (const auto* d = std::get_if<VarDecl>(&s.node)) {
      // Bind before walking the initializer so recursive definitions resolve.
      scope.frames.back().push_back(d->name);
      collect_free_calls(*d->init, scope, out);
    } else if (const auto* es = std::get_if<ExprStmt>(&s.node)) {
      collect_free_calls(*es->expr, scope, out);
    } else if (const auto* r = std::get_if<ReturnStmt>(&s.node)) {
      collect_free_calls(*r->expr, scope, out);
    } else {
      const auto& f = std::get<IfStmt>(s.node);
      collect_free_calls(*f.cond, scope, out);
      collect_free_calls(*f.then_block, scope, out);
      if (f.else_block) collect_free_calls(*f.else_block, scope, out);
    }
  }
  scope.frames.pop_back();
}

inline void collect_free_calls(const Expr& e, ScopeStack& scope, std::set<std::string>& out) {
  if (const auto* list = std::get_if<ListLit>(&e.node)) {
    for (const auto& item : list->items) collect_free_calls(*item, scope, out);
  } else if (const auto* rec = std::get_if<RecordLit>(&e.node)) {
    for (const auto& f : rec->fields) collect_free_calls(*f.value, scope, out);
  } else if (const auto* fn = std::get_if<FnLit>(&e.node)) {
    scope.frames.push_back(fn->params.names);
    collect_free_calls(*fn->body, scope, out);
    scope.frames.pop_back();
  } else if (const auto* call = std::get_if<Call>(&e.node)) {
    if (const auto* id = std::get_if<Ident>(&call->callee->node)) {
      if (!is_stdlib_name(id->name) && !scope.bound(id->name)) out.insert(id->name);
    } else {
      collect_free_calls(*call->callee, scope, out);
    }
    for (const auto& a : call->args) collect_free_calls(*a, scope, out);
  } else if (const auto* un = std::get_if<UnaryExpr>(&e.node)) {
    collect_free_calls(*un->operand, scope, out);
  } else if (const auto* bin = std::get_if<BinaryExpr>(&e.node)) {
    collect_free_calls(*bin->lhs, scope, out);
    collect_free_calls(*bin->rhs, scope, out);
  } else if (const auto* ter = std::get_if<TernaryExpr>(&e.node)) {
    collect_free_calls(*ter->cond, scope, out);
    collect_free_calls(*ter->then_branch, scope, out);
    collect_free_calls(*ter->else_branch, scope, out);
  } else if (const auto* m = std::get_if<MemExpr>(&e.node)) {
    collect_free_calls(*m->fn, scope, out);
  } else if (const auto* c = std::get_if<ConditionExpr>(&e.node)) {
    collect_free_calls(*c->arg, scope, out);
  } else if (const auto* inf = std::get_if<InferExpr>(&e.node)) {
    collect_free_calls(*inf->options, scope, out);
  }
}

inline void collect_bound_names(const Block& block, std::vector<std::string>& out);

inline void collect_bound_names(const Expr& e, std::vector<std::string>& out) {
  if (const auto* fn = std::get_if<FnLit>(&e.node)) {
    collect_bound_names(*fn->body, out);
  } else if (const auto* list = std::get_if<ListLit>(&e.node)) {
    for (const auto& item : list->items) collect_bound_names(*item, out);
  } else if (const auto* rec = std::get_if<RecordLit>(&e.node)) {
    for (const auto& f : rec->fields) collect_bound_names(*f.value, out);
  } else if (const auto* call = std::get_if<Call>(&e.node)) {
    collect_bound_names(*call->callee, out);
    for (const auto& a : call->args) collect_bound_names(*a, out);
  } else if (const auto* un = std::get_if<UnaryExpr>(&e.node)) {
    collect_bound_names(*un->operand, out);
  } else if (const auto* bin = std::get_if<BinaryExpr>(&e.node)) {
    collect_bound_names(*bin->lhs, out);
    collect_bound_names(*bin->rhs, out);
  } else if (const auto* ter = std::get_if<TernaryExpr>(&e.node)) {
    collect_bound_names(*ter->cond, out);
    collect_bound_names(*ter->then_branch, out);
    collect_bound_names(*ter->else_branch, out);
  } else if (const auto* m = std::get_if<MemExpr>(&e.node)) {
    collect_bound_names(*m->fn, out);
  } else if (const auto* c = std::get_if<ConditionExpr>(&e.node)) {
    collect_bound_names(*c->arg, out);
  } else if (const auto* inf = std::get_if<InferExpr>(&e.node)) {
    collect_bound_names(*inf->options, out);
  }
}

inline void collect_bound_names(const Block& block, std::vector<std::string>& out) {
  for (const auto& s : block.stmts) {
    if (const auto* d = std::get_if<VarDecl>(&s.node)) {
      out.push_back(d->name);
      collect_bound_names(*d->init, out);
    } else if (const auto* es = std::get_if<ExprStmt>(&s.node)) {
      collect_bound_names(*es->expr, out);
    } else if (const auto* r = std::get_if<ReturnStmt>(&s.node)) {
      collect_bound_names(*r->expr, out);
    } else {
      const auto& f = std::get<IfStmt>(s.node);
      collect_bound_names(*f.cond, out);
      collect_bound_names(*f.then_block, out);
      if (f.else_block) collect_bound_names(*f.else_block, out);
    }
  }
}

}  // namespace detail

// Call-target identifiers appearing in `exprs` that are bound neither by a
// `var` declaration anywhere in `defs` (the parse expressions get spliced
// into the model body, so nested bindings count) nor by the standard
// library. Sorted and deduplicated.
inline std::vector<std::string> free_functions(const std::vector<const Expr*>& exprs,
                                               const Program& defs) {
  detail::ScopeStack scope;
  scope.frames.emplace_back();
  {
    for (const auto& s : defs.stmts) {
      if (const auto* d = std::get_if<VarDecl>(&s.node)) {
        scope.frames.back().push_back(d->name);
        detail::collect_bound_names(*d->init, scope.frames.back());
      } else if (const auto* es = std::get_if<ExprStmt>(&s.node)) {
        detail::collect_bound_names(*es->expr, scope.frames.back());
      } else if (const auto* r = std::get_if<ReturnStmt>(&s.node)) {
        detail::collect_bound_names(*r->expr, scope.frames.back());
      } else {
        const auto& f = std::get<IfStmt>(s.node);
        detail::collect_bound_names(*f.cond, scope.frames.back());
        detail::collect_bound_names(*f.then_block, scope.frames.back());
        if (f.else_block) detail::collect_bound_names(*f.else_block, scope.frames.back());
      }
    }
  }
  std::set<std::string> out;
  for (const Expr* e : exprs) detail::collect_free_calls(*e, scope, out);
  return std::vector<std::string>(out.begin(), out.end());
}

// Free call targets of a whole program against its own bindings plus the
// standard library (used by the synthesis executability gate).
inline std::vector<std::string> free_functions_of_program(const Program& program) {
  std::vector<const Expr*> exprs;
  std::vector<ExprPtr> owned;
  detail::ScopeStack scope;
  scope.frames.emplace_back();
  for (const auto& s : program.stmts)
    if (const auto* d = std::get_if<VarDecl>(&s.node)) {
      scope.frames.back().push_back(d->name);
      detail::collect_bound_names(*d->init, scope.frames.back());
    }
  std::set<std::string> out;
  for (const auto& s : program.stmts) {
    if (const auto* d = std::get_if<VarDecl>(&s.node))
      detail::collect_free_calls(*d->init, scope, out);
    else if (const auto* es = std::get_if<ExprStmt>(&s.node))
      detail::collect_free_calls(*es->expr, scope, out);
    else if (const auto* r = std::get_if<ReturnStmt>(&s.node))
      detail::collect_free_calls(*r->expr, scope, out);
    else {
      const auto& f = std::get<IfStmt>(s.node);
      detail::collect_free_calls(*f.cond, scope, out);
      detail::collect_free_calls(*f.then_block, scope, out);
      if (f.else_block) detail::collect_free_calls(*f.else_block, scope, out);
    }
  }
  return std::vector<std::string>(out.begin(), out.end());
}

}  // namespace msa::ppl
