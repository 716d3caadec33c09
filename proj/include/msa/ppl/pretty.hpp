#pragma once

#include <charconv>
#include <string>
#include <variant>
#include <vector>

#include "msa/ppl/ast.hpp"

namespace msa::ppl {

// Shortest round-trip decimal form; integral values print without a point.
inline std::string format_number(double v) {
  if (v == 0) return "0";  // normalizes -0
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

namespace detail {

// Precedence levels, higher binds tighter.
inline int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 3;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 4;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 5;
    default: return 6;
  }
}

inline const char* op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    default: return "||";
  }
}

class Printer {
 public:
  std::string print_program(const Program& p) {
    for (const auto& s : p.stmts) stmt(s);
    return std::move(out_);
  }

  std::string print_expr(const Expr& e) {
    expr(e, 0);
    return std::move(out_);
  }

 private:
  std::string out_;
  int indent_ = 0;

  void line_start() { out_.append(static_cast<std::size_t>(indent_) * 2, ' '); }

  void stmt(const Stmt& s) {
    if (const auto* d = std::get_if<VarDecl>(&s.node)) {
      line_start();
      out_ += "var " + d->name + " = ";
      expr(*d->init, 0);
      out_ += ";\n";
    } else if (const auto* es = std::get_if<ExprStmt>(&s.node)) {
      line_start();
      expr(*es->expr, 0);
      out_ += ";\n";
    } else if (const auto* r = std::get_if<ReturnStmt>(&s.node)) {
      line_start();
      out_ += "return ";
      expr(*r->expr, 0);
      out_ += ";\n";
    } else {
      const auto& f = std::get<IfStmt>(s.node);
      line_start();
      out_ += "if (";
      expr(*f.cond, 0);
      out_ += ") {\n";
      ++indent_;
      for (const auto& inner : f.then_block->stmts) stmt(inner);
      --indent_;
      line_start();
      out_ += "}";
      if (f.else_block) {
        out_ += " else {\n";
        ++indent_;
        for (const auto& inner : f.else_block->stmts) stmt(inner);
        --indent_;
        line_start();
        out_ += "}";
      }
      out_ += "\n";
    }
  }

  // `min_prec` is the loosest precedence printable without parentheses.
  void expr(const Expr& e, int min_prec) {
    if (const auto* n = std::get_if<NumberLit>(&e.node)) {
      out_ += format_number(n->value);
    } else if (const auto* b = std::get_if<BoolLit>(&e.node)) {
      out_ += b->value ? "true" : "false";
    } else if (const auto* s = std::get_if<StringLit>(&e.node)) {
      out_ += '\'';
      for (char c : s->value) {
        switch (c) {
          case '\'': out_ += "\\'"; break;
          case '\\': out_ += "\\\\"; break;
          case '\n': out_ += "\\n"; break;
          case '\t': out_ += "\\t"; break;
          default: out_ += c;
        }
      }
      out_ += '\'';
    } else if (const auto* list = std::get_if<ListLit>(&e.node)) {
      out_ += '[';
      for (std::size_t i = 0; i < list->items.size(); ++i) {
        if (i) out_ += ", ";
        expr(*list->items[i], 0);
      }
      out_ += ']';
    } else if (const auto* rec = std::get_if<RecordLit>(&e.node)) {
      // Canonical form sorts record keys.
      std::vector<const RecordField*> fields;
      for (const auto& f : rec->fields) fields.push_back(&f);
      std::sort(fields.begin(), fields.end(),
                [](const RecordField* a, const RecordField* b) { return a->key < b->key; });
      out_ += '{';
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ += ", ";
        out_ += fields[i]->key + ": ";
        expr(*fields[i]->value, 0);
      }
      out_ += '}';
    } else if (const auto* id = std::get_if<Ident>(&e.node)) {
      out_ += id->name;
    } else if (const auto* fn = std::get_if<FnLit>(&e.node)) {
      out_ += "function(";
      if (fn->params.destructured) {
        out_ += '{';
        for (std::size_t i = 0; i < fn->params.names.size(); ++i) {
          if (i) out_ += ", ";
          out_ += fn->params.names[i];
        }
        out_ += '}';
      } else {
        for (std::size_t i = 0; i < fn->params.names.size(); ++i) {
          if (i) out_ += ", ";
          out_ += fn->params.names[i];
        }
      }
      out_ += ") {\n";
      ++indent_;
      for (const auto& s : fn->body->stmts) stmt(s);
      --indent_;
      line_start();
      out_ += '}';
    } else if (const auto* call = std::get_if<Call>(&e.node)) {
      expr(*call->callee, 7);
      out_ += '(';
      for (std::size_t i = 0; i < call->args.size(); ++i) {
        if (i) out_ += ", ";
        expr(*call->args[i], 0);
      }
      out_ += ')';
    } else if (const auto* un = std::get_if<UnaryExpr>(&e.node)) {
      bool parens = min_prec > 6;
      if (parens) out_ += '(';
      out_ += un->op == UnaryOp::Not ? "!" : "-";
      expr(*un->operand, 7);
      if (parens) out_ += ')';
    } else if (const auto* bin = std::get_if<BinaryExpr>(&e.node)) {
      int prec = precedence(bin->op);
      bool parens = prec < min_prec;
      if (parens) out_ += '(';
      expr(*bin->lhs, prec);
      out_ += ' ';
      out_ += op_text(bin->op);
      out_ += ' ';
      expr(*bin->rhs, prec + 1);  // left-associative
      if (parens) out_ += ')';
    } else if (const auto* ter = std::get_if<TernaryExpr>(&e.node)) {
      bool parens = min_prec > 0;
      if (parens) out_ += '(';
      expr(*ter->cond, 1);
      out_ += " ? ";
      expr(*ter->then_branch, 0);
      out_ += " : ";
      expr(*ter->else_branch, 0);
      if (parens) out_ += ')';
    } else if (const auto* m = std::get_if<MemExpr>(&e.node)) {
      out_ += "mem(";
      expr(*m->fn, 0);
      out_ += ')';
    } else if (const auto* c = std::get_if<ConditionExpr>(&e.node)) {
      out_ += "condition(";
      expr(*c->arg, 0);
      out_ += ')';
    } else {
      const auto& inf = std::get<InferExpr>(e.node);
      out_ += "Infer(";
      expr(*inf.options, 0);
      out_ += ')';
    }
  }
};

}  // namespace detail

inline std::string pretty_print(const Program& p) {
  detail::Printer pr;
  return pr.print_program(p);
}

inline std::string pretty_print(const Expr& e) {
  detail::Printer pr;
  return pr.print_expr(e);
}

}  // namespace msa::ppl
