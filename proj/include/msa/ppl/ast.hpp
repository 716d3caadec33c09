#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "msa/ppl/errors.hpp"

namespace msa::ppl {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class UnaryOp { Not, Neg };

struct NumberLit { double value = 0; };
struct BoolLit { bool value = false; };
struct StringLit { std::string value; };
struct ListLit { std::vector<ExprPtr> items; };

struct RecordField {
  std::string key;
  ExprPtr value;
};
struct RecordLit { std::vector<RecordField> fields; };  // source order

struct Ident { std::string name; };

// Either a plain positional parameter list or a single destructured-record
// parameter: function(a, b) vs function({athlete, match}).
struct ParamList {
  bool destructured = false;
  std::vector<std::string> names;
};

struct Block;

struct FnLit {
  ParamList params;
  std::unique_ptr<Block> body;
};

struct Call {
  ExprPtr callee;
  std::vector<ExprPtr> args;
};

struct UnaryExpr {
  UnaryOp op;
  ExprPtr operand;
};

struct BinaryExpr {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct TernaryExpr {
  ExprPtr cond;
  ExprPtr then_branch;
  ExprPtr else_branch;
};

struct MemExpr { ExprPtr fn; };
struct ConditionExpr { ExprPtr arg; };
struct InferExpr { ExprPtr options; };

struct Expr {
  Span span;
  std::variant<NumberLit, BoolLit, StringLit, ListLit, RecordLit, Ident, FnLit,
               Call, UnaryExpr, BinaryExpr, TernaryExpr, MemExpr, ConditionExpr,
               InferExpr>
      node;
};

struct VarDecl {
  std::string name;
  ExprPtr init;
};
struct ExprStmt { ExprPtr expr; };
struct ReturnStmt { ExprPtr expr; };
struct IfStmt {
  ExprPtr cond;
  std::unique_ptr<Block> then_block;
  std::unique_ptr<Block> else_block;  // null when there is no else
};

struct Stmt {
  Span span;
  std::variant<VarDecl, ExprStmt, ReturnStmt, IfStmt> node;
};

struct Block {
  std::vector<Stmt> stmts;
};

struct Program {
  std::vector<Stmt> stmts;
  std::string source;

  // Top-level `var` bindings in source order.
  std::vector<const VarDecl*> declarations() const {
    std::vector<const VarDecl*> out;
    for (const auto& s : stmts)
      if (const auto* d = std::get_if<VarDecl>(&s.node)) out.push_back(d);
    return out;
  }
};

// --- structural equality (spans ignored; record-literal key order ignored) ---

bool ast_equal(const Expr& a, const Expr& b);
bool ast_equal(const Block& a, const Block& b);
bool ast_equal(const Stmt& a, const Stmt& b);

inline bool ast_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return ast_equal(*a, *b);
}

inline bool ast_equal(const Stmt& a, const Stmt& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* va = std::get_if<VarDecl>(&a.node)) {
    const auto& vb = std::get<VarDecl>(b.node);
    return va->name == vb.name && ast_equal(va->init, vb.init);
  }
  if (const auto* ea = std::get_if<ExprStmt>(&a.node))
    return ast_equal(ea->expr, std::get<ExprStmt>(b.node).expr);
  if (const auto* ra = std::get_if<ReturnStmt>(&a.node))
    return ast_equal(ra->expr, std::get<ReturnStmt>(b.node).expr);
  const auto& ia = std::get<IfStmt>(a.node);
  const auto& ib = std::get<IfStmt>(b.node);
  if (!ast_equal(ia.cond, ib.cond)) return false;
  if (!ast_equal(*ia.then_block, *ib.then_block)) return false;
  if (!ia.else_block || !ib.else_block) return !ia.else_block && !ib.else_block;
  return ast_equal(*ia.else_block, *ib.else_block);
}

inline bool ast_equal(const Block& a, const Block& b) {
  if (a.stmts.size() != b.stmts.size()) return false;
  for (std::size_t i = 0; i < a.stmts.size(); ++i)
    if (!ast_equal(a.stmts[i], b.stmts[i])) return false;
  return true;
}

inline bool ast_equal(const Program& a, const Program& b) {
  if (a.stmts.size() != b.stmts.size()) return false;
  for (std::size_t i = 0; i < a.stmts.size(); ++i)
    if (!ast_equal(a.stmts[i], b.stmts[i])) return false;
  return true;
}

inline bool ast_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  switch (a.node.index()) {
    case 0:
      return std::get<NumberLit>(a.node).value == std::get<NumberLit>(b.node).value;
    case 1:
      return std::get<BoolLit>(a.node).value == std::get<BoolLit>(b.node).value;
    case 2:
      return std::get<StringLit>(a.node).value == std::get<StringLit>(b.node).value;
    case 3: {
      const auto& la = std::get<ListLit>(a.node).items;
      const auto& lb = std::get<ListLit>(b.node).items;
      if (la.size() != lb.size()) return false;
      for (std::size_t i = 0; i < la.size(); ++i)
        if (!ast_equal(la[i], lb[i])) return false;
      return true;
    }
    case 4: {
      // Key order is insignificant: compare fields under sorted keys.
      const auto& ra = std::get<RecordLit>(a.node).fields;
      const auto& rb = std::get<RecordLit>(b.node).fields;
      if (ra.size() != rb.size()) return false;
      std::vector<const RecordField*> sa, sb;
      for (const auto& f : ra) sa.push_back(&f);
      for (const auto& f : rb) sb.push_back(&f);
      auto by_key = [](const RecordField* x, const RecordField* y) { return x->key < y->key; };
      std::sort(sa.begin(), sa.end(), by_key);
      std::sort(sb.begin(), sb.end(), by_key);
      for (std::size_t i = 0; i < sa.size(); ++i) {
        if (sa[i]->key != sb[i]->key) return false;
        if (!ast_equal(sa[i]->value, sb[i]->value)) return false;
      }
      return true;
    }
    case 5:
      return std::get<Ident>(a.node).name == std::get<Ident>(b.node).name;
    case 6: {
      const auto& fa = std::get<FnLit>(a.node);
      const auto& fb = std::get<FnLit>(b.node);
      return fa.params.destructured == fb.params.destructured &&
             fa.params.names == fb.params.names && ast_equal(*fa.body, *fb.body);
    }
    case 7: {
      const auto& ca = std::get<Call>(a.node);
      const auto& cb = std::get<Call>(b.node);
      if (!ast_equal(ca.callee, cb.callee)) return false;
      if (ca.args.size() != cb.args.size()) return false;
      for (std::size_t i = 0; i < ca.args.size(); ++i)
        if (!ast_equal(ca.args[i], cb.args[i])) return false;
      return true;
    }
    case 8: {
      const auto& ua = std::get<UnaryExpr>(a.node);
      const auto& ub = std::get<UnaryExpr>(b.node);
      return ua.op == ub.op && ast_equal(ua.operand, ub.operand);
    }
    case 9: {
      const auto& ba = std::get<BinaryExpr>(a.node);
      const auto& bb = std::get<BinaryExpr>(b.node);
      return ba.op == bb.op && ast_equal(ba.lhs, bb.lhs) && ast_equal(ba.rhs, bb.rhs);
    }
    case 10: {
      const auto& ta = std::get<TernaryExpr>(a.node);
      const auto& tb = std::get<TernaryExpr>(b.node);
      return ast_equal(ta.cond, tb.cond) && ast_equal(ta.then_branch, tb.then_branch) &&
             ast_equal(ta.else_branch, tb.else_branch);
    }
    case 11:
      return ast_equal(std::get<MemExpr>(a.node).fn, std::get<MemExpr>(b.node).fn);
    case 12:
      return ast_equal(std::get<ConditionExpr>(a.node).arg, std::get<ConditionExpr>(b.node).arg);
    default:
      return ast_equal(std::get<InferExpr>(a.node).options, std::get<InferExpr>(b.node).options);
  }
}

}  // namespace msa::ppl
