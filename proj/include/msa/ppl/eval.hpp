#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "msa/ppl/ast.hpp"
#include "msa/ppl/errors.hpp"
#include "msa/ppl/rng.hpp"
#include "msa/ppl/value.hpp"

namespace msa::ppl {

// Source of randomness for one trace. Sampling runs draw from an Rng;
// enumeration replays forced choice prefixes and refuses continuous draws.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual bool continuous_ok() const = 0;
  virtual double uniform01() = 0;
  virtual bool bernoulli(double p) = 0;
  // Weights need not be normalized; they must be non-negative with a
  // positive sum.
  virtual std::size_t choose_weighted(const double* ws, std::size_t n) = 0;
  virtual std::size_t choose_uniform(std::size_t n) = 0;
};

class SampleSource final : public RandomSource {
 public:
  explicit SampleSource(Rng rng) : rng_(std::move(rng)) {}

  bool continuous_ok() const override { return true; }
  double uniform01() override { return rng_.uniform01(); }
  bool bernoulli(double p) override { return rng_.bernoulli(p); }

  std::size_t choose_weighted(const double* ws, std::size_t n) override {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) total += ws[i];
    double u = rng_.uniform01() * total;
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += ws[i];
      if (u < acc) return i;
    }
    return n - 1;
  }

  std::size_t choose_uniform(std::size_t n) override {
    auto i = static_cast<std::size_t>(rng_.uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  Rng& rng() { return rng_; }

 private:
  Rng rng_;
};

// Thrown when a condition() fails; unwinds the attempt so no further random
// choices are drawn.
struct TraceRejected {};

struct EvalLimits {
  std::uint64_t max_steps = 0;     // 0 = unlimited; counts expression evaluations
  std::uint32_t max_call_depth = 512;
};

struct TraceStats {
  std::uint64_t steps = 0;
  std::uint64_t memo_hits = 0;
  std::uint64_t memo_inserts = 0;
};

class Interpreter {
 public:
  Interpreter(RandomSource& source, EvalLimits limits = {},
              std::uint64_t* shared_step_counter = nullptr)
      : source_(source), limits_(limits), shared_steps_(shared_step_counter) {}

  static EnvPtr make_global_env() {
    auto env = std::make_shared<Env>();
    bind_builtin(*env, "flip", BuiltinFn::Flip);
    bind_builtin(*env, "gaussian", BuiltinFn::Gaussian);
    bind_builtin(*env, "uniform", BuiltinFn::Uniform);
    bind_builtin(*env, "beta", BuiltinFn::Beta);
    bind_builtin(*env, "categorical", BuiltinFn::Categorical);
    bind_builtin(*env, "uniformDraw", BuiltinFn::UniformDraw);
    bind_builtin(*env, "map", BuiltinFn::Map);
    bind_builtin(*env, "filter", BuiltinFn::Filter);
    bind_builtin(*env, "reduce", BuiltinFn::Reduce);
    bind_builtin(*env, "sum", BuiltinFn::Sum);
    bind_builtin(*env, "mean", BuiltinFn::Mean);
    bind_builtin(*env, "length", BuiltinFn::Length);
    bind_builtin(*env, "any", BuiltinFn::Any);
    bind_builtin(*env, "all", BuiltinFn::All);
    bind_builtin(*env, "indexOf", BuiltinFn::IndexOf);
    bind_builtin(*env, "min", BuiltinFn::Min);
    bind_builtin(*env, "max", BuiltinFn::Max);
    bind_builtin(*env, "abs", BuiltinFn::Abs);
    bind_builtin(*env, "floor", BuiltinFn::Floor);
    bind_builtin(*env, "round", BuiltinFn::Round);
    bind_builtin(*env, "exp", BuiltinFn::Exp);
    bind_builtin(*env, "log", BuiltinFn::Log);
    bind_builtin(*env, "normalCDF", BuiltinFn::NormalCdf);
    bind_builtin(*env, "any_previous_time_inclusive", BuiltinFn::AnyPreviousInclusive);
    bind_builtin(*env, "any_previous_time_exclusive", BuiltinFn::AnyPreviousExclusive);
    return env;
  }

  // Executes top-level statements, returning the value of the last Infer
  // declaration encountered (if any).
  Value run_top_level(const Program& program, EnvPtr env) {
    Value last_infer;
    bool saw_infer = false;
    for (const auto& stmt : program.stmts) {
      if (const auto* d = std::get_if<VarDecl>(&stmt.node)) {
        Value v = eval(*d->init, env);
        if (v.is_infer()) {
          last_infer = v;
          saw_infer = true;
        }
        env->bind(d->name, std::move(v));
      } else if (const auto* es = std::get_if<ExprStmt>(&stmt.node)) {
        Value v = eval(*es->expr, env);
        if (v.is_infer()) {
          last_infer = v;
          saw_infer = true;
        }
      } else if (std::get_if<ReturnStmt>(&stmt.node)) {
        throw EvalError("'return' outside of a function body", stmt.span);
      } else {
        exec_if(std::get<IfStmt>(stmt.node), env);
      }
    }
    if (!saw_infer) throw EvalError("program contains no Infer declaration");
    return last_infer;
  }

  Value eval(const Expr& e, const EnvPtr& env) {
    bump_steps(e.span);
    if (const auto* n = std::get_if<NumberLit>(&e.node)) return Value::number(n->value);
    if (const auto* b = std::get_if<BoolLit>(&e.node)) return Value::boolean(b->value);
    if (const auto* s = std::get_if<StringLit>(&e.node)) return Value::text(s->value);
    if (const auto* id = std::get_if<Ident>(&e.node)) {
      if (const Value* v = env->lookup(id->name)) return *v;
      throw EvalError("unbound identifier '" + id->name + "'", e.span);
    }
    if (const auto* list = std::get_if<ListLit>(&e.node)) {
      ValueList items;
      items.reserve(list->items.size());
      for (const auto& item : list->items) items.push_back(eval(*item, env));
      return Value::list(std::move(items));
    }
    if (const auto* rec = std::get_if<RecordLit>(&e.node)) {
      ValueRecord fields;
      fields.reserve(rec->fields.size());
      for (const auto& f : rec->fields) fields.emplace_back(f.key, eval(*f.value, env));
      return Value::record(std::move(fields));
    }
    if (const auto* fn = std::get_if<FnLit>(&e.node)) {
      auto callable = std::make_shared<const Callable>(Callable{Closure{fn, env}});
      return Value::callable(std::move(callable));
    }
    if (const auto* call = std::get_if<Call>(&e.node)) {
      Value callee = eval(*call->callee, env);
      std::vector<Value> args;
      args.reserve(call->args.size());
      for (const auto& a : call->args) args.push_back(eval(*a, env));
      return this->call(callee, std::move(args), e.span);
    }
    if (const auto* un = std::get_if<UnaryExpr>(&e.node)) {
      Value v = eval(*un->operand, env);
      if (un->op == UnaryOp::Not) {
        if (!v.is_bool()) throw EvalError(std::string("operator '!' expects a boolean, got ") + v.type_name(), e.span);
        return Value::boolean(!v.as_bool());
      }
      if (!v.is_number()) throw EvalError(std::string("unary '-' expects a number, got ") + v.type_name(), e.span);
      return Value::number(-v.as_number());
    }
    if (const auto* bin = std::get_if<BinaryExpr>(&e.node)) return eval_binary(*bin, env, e.span);
    if (const auto* ter = std::get_if<TernaryExpr>(&e.node)) {
      Value c = eval(*ter->cond, env);
      if (!c.is_bool())
        throw EvalError(std::string("conditional test must be a boolean, got ") + c.type_name(), e.span);
      return c.as_bool() ? eval(*ter->then_branch, env) : eval(*ter->else_branch, env);
    }
    if (const auto* m = std::get_if<MemExpr>(&e.node)) {
      Value inner = eval(*m->fn, env);
      if (!inner.is_callable())
        throw EvalError(std::string("mem expects a function, got ") + inner.type_name(), e.span);
      auto callable = std::make_shared<const Callable>(
          Callable{MemoizedCallable{std::move(inner), next_memo_id_++}});
      return Value::callable(std::move(callable));
    }
    if (const auto* c = std::get_if<ConditionExpr>(&e.node)) {
      Value v = eval(*c->arg, env);
      if (!v.is_bool())
        throw EvalError(std::string("condition expects a boolean, got ") + v.type_name(), e.span);
      if (!v.as_bool()) throw TraceRejected{};
      return Value::boolean(true);
    }
    const auto& inf = std::get<InferExpr>(e.node);
    Value opts = eval(*inf.options, env);
    if (!opts.is_record()) throw EvalError("Infer expects an options record", e.span);
    const Value* model = opts.record_field("model");
    if (!model || !model->is_callable())
      throw EvalError("Infer options must bind 'model' to a function", e.span);
    std::string method = "rejection";
    if (const Value* m = opts.record_field("method")) {
      if (!m->is_text()) throw EvalError("Infer 'method' must be a string", e.span);
      method = m->as_text();
    }
    return Value::infer(std::make_shared<const InferSpec>(InferSpec{*model, method}));
  }

  Value call(const Value& callee, std::vector<Value> args, Span at) {
    if (!callee.is_callable())
      throw EvalError(std::string("attempted to call a ") + callee.type_name() + " value", at);
    if (++call_depth_ > limits_.max_call_depth) {
      --call_depth_;
      throw EvalError("call depth exceeded " + std::to_string(limits_.max_call_depth) +
                          " (possible unbounded recursion)",
                      at);
    }
    struct DepthGuard {
      std::uint32_t& d;
      ~DepthGuard() { --d; }
    } guard{call_depth_};

    const Callable& c = *callee.as_callable();
    if (const auto* closure = std::get_if<Closure>(&c.impl)) return call_closure(*closure, std::move(args), at);
    if (const auto* builtin = std::get_if<BuiltinCallable>(&c.impl)) return call_builtin(*builtin, args, at);
    const auto& memo = std::get<MemoizedCallable>(c.impl);
    std::string key = std::to_string(memo.memo_id);
    key += '|';
    for (const auto& a : args) {
      canonical_encode(a, key);
      key += ';';
    }
    auto it = memo_table_.find(key);
    if (it != memo_table_.end()) {
      ++stats_.memo_hits;
      return it->second;
    }
    Value result = call(memo.inner, std::move(args), at);
    ++stats_.memo_inserts;
    memo_table_.emplace(std::move(key), result);
    return result;
  }

  TraceStats& stats() { return stats_; }
  const std::unordered_map<std::string, Value>& memo_table() const { return memo_table_; }

 private:
  RandomSource& source_;
  EvalLimits limits_;
  std::uint64_t* shared_steps_;
  std::uint64_t next_memo_id_ = 1;
  std::uint32_t call_depth_ = 0;
  std::unordered_map<std::string, Value> memo_table_;
  TraceStats stats_;

  static void bind_builtin(Env& env, const char* name, BuiltinFn fn) {
    env.bind(name, Value::callable(std::make_shared<const Callable>(Callable{BuiltinCallable{fn, name}})));
  }

  void bump_steps(Span at) {
    ++stats_.steps;
    if (shared_steps_) {
      if (limits_.max_steps && ++*shared_steps_ > limits_.max_steps)
        throw BudgetExceededError(limits_.max_steps);
    } else if (limits_.max_steps && stats_.steps > limits_.max_steps) {
      throw EvalError("evaluation exceeded " + std::to_string(limits_.max_steps) + " steps", at);
    }
  }

  static double require_number(const Value& v, const char* what, Span at) {
    if (!v.is_number()) throw EvalError(std::string(what) + " expects a number, got " + v.type_name(), at);
    return v.as_number();
  }

  static void check_finite_result(double d, const char* what, Span at) {
    if (std::isnan(d)) throw EvalError(std::string(what) + " produced NaN", at);
  }

  void exec_if(const IfStmt& stmt, const EnvPtr&) {
    throw EvalError("if statements are only allowed inside function bodies", stmt.cond->span);
  }

  Value call_closure(const Closure& closure, std::vector<Value> args, Span at) {
    const FnLit& fn = *closure.fn;
    auto frame = std::make_shared<Env>();
    frame->parent = closure.env;
    if (fn.params.destructured) {
      if (args.size() != 1 || !args[0].is_record())
        throw EvalError("function with a destructured parameter expects a single record argument", at);
      for (const auto& name : fn.params.names) {
        const Value* field = args[0].record_field(name);
        if (!field)
          throw EvalError("record argument is missing field '" + name + "'", at);
        frame->bind(name, *field);
      }
    } else {
      if (args.size() != fn.params.names.size())
        throw EvalError("function expects " + std::to_string(fn.params.names.size()) +
                            " arguments but got " + std::to_string(args.size()),
                        at);
      for (std::size_t i = 0; i < args.size(); ++i)
        frame->bind(fn.params.names[i], std::move(args[i]));
    }
    Value result;
    if (!exec_block(*fn.body, frame, result))
      throw EvalError("function body finished without returning a value", at);
    return result;
  }

  // Returns true when a return statement fired; result holds its value.
  bool exec_block(const Block& block, const EnvPtr& parent, Value& result) {
    auto env = std::make_shared<Env>();
    env->parent = parent;
    return exec_stmts(block.stmts, env, result);
  }

  bool exec_stmts(const std::vector<Stmt>& stmts, const EnvPtr& env, Value& result) {
    for (const auto& stmt : stmts) {
      if (const auto* d = std::get_if<VarDecl>(&stmt.node)) {
        env->bind(d->name, eval(*d->init, env));
      } else if (const auto* es = std::get_if<ExprStmt>(&stmt.node)) {
        eval(*es->expr, env);
      } else if (const auto* r = std::get_if<ReturnStmt>(&stmt.node)) {
        result = eval(*r->expr, env);
        return true;
      } else {
        const auto& f = std::get<IfStmt>(stmt.node);
        Value c = eval(*f.cond, env);
        if (!c.is_bool())
          throw EvalError(std::string("if condition must be a boolean, got ") + c.type_name(),
                          f.cond->span);
        if (c.as_bool()) {
          if (exec_block(*f.then_block, env, result)) return true;
        } else if (f.else_block) {
          if (exec_block(*f.else_block, env, result)) return true;
        }
      }
    }
    return false;
  }

  Value eval_binary(const BinaryExpr& bin, const EnvPtr& env, Span at) {
    if (bin.op == BinaryOp::And || bin.op == BinaryOp::Or) {
      Value lhs = eval(*bin.lhs, env);
      if (!lhs.is_bool())
        throw EvalError(std::string("logical operator expects booleans, got ") + lhs.type_name(), at);
      if (bin.op == BinaryOp::And && !lhs.as_bool()) return Value::boolean(false);
      if (bin.op == BinaryOp::Or && lhs.as_bool()) return Value::boolean(true);
      Value rhs = eval(*bin.rhs, env);
      if (!rhs.is_bool())
        throw EvalError(std::string("logical operator expects booleans, got ") + rhs.type_name(), at);
      return rhs;
    }
    Value lhs = eval(*bin.lhs, env);
    Value rhs = eval(*bin.rhs, env);
    if (bin.op == BinaryOp::Eq) return Value::boolean(lhs == rhs);
    if (bin.op == BinaryOp::Ne) return Value::boolean(lhs != rhs);
    double a = require_number(lhs, "arithmetic/comparison operator", at);
    double b = require_number(rhs, "arithmetic/comparison operator", at);
    switch (bin.op) {
      case BinaryOp::Lt: return Value::boolean(a < b);
      case BinaryOp::Le: return Value::boolean(a <= b);
      case BinaryOp::Gt: return Value::boolean(a > b);
      case BinaryOp::Ge: return Value::boolean(a >= b);
      case BinaryOp::Add: {
        double r = a + b;
        check_finite_result(r, "'+'", at);
        return Value::number(r);
      }
      case BinaryOp::Sub: {
        double r = a - b;
        check_finite_result(r, "'-'", at);
        return Value::number(r);
      }
      case BinaryOp::Mul: {
        double r = a * b;
        check_finite_result(r, "'*'", at);
        return Value::number(r);
      }
      case BinaryOp::Div: {
        double r = a / b;
        check_finite_result(r, "'/'", at);
        return Value::number(r);
      }
      default: {
        double r = std::fmod(a, b);
        check_finite_result(r, "'%'", at);
        return Value::number(r);
      }
    }
  }

  Value call_builtin(const BuiltinCallable& builtin, std::vector<Value>& args, Span at) {
    auto arity = [&](std::size_t n) {
      if (args.size() != n)
        throw EvalError(std::string(builtin.name) + " expects " + std::to_string(n) +
                            " argument(s) but got " + std::to_string(args.size()),
                        at);
    };
    auto num = [&](std::size_t i) { return require_number(args[i], builtin.name, at); };
    auto need_list = [&](std::size_t i) -> const ValueList& {
      if (!args[i].is_list())
        throw EvalError(std::string(builtin.name) + " expects a list, got " + args[i].type_name(), at);
      return args[i].as_list();
    };
    auto need_continuous = [&] {
      if (!source_.continuous_ok()) throw UnsupportedContinuousError(builtin.name, at);
    };

    switch (builtin.fn) {
      case BuiltinFn::Flip: {
        arity(1);
        double p = num(0);
        if (p < 0 || p > 1) throw EvalError("flip probability must be in [0, 1]", at);
        if (p <= 0) return Value::boolean(false);
        if (p >= 1) return Value::boolean(true);
        return Value::boolean(source_.bernoulli(p));
      }
      case BuiltinFn::Gaussian: {
        arity(2);
        need_continuous();
        double mu = num(0), sigma = num(1);
        if (!(sigma > 0)) throw EvalError("gaussian standard deviation must be > 0", at);
        double u1 = 1.0 - source_.uniform01();
        double u2 = source_.uniform01();
        double r = mu + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        check_finite_result(r, builtin.name, at);
        return Value::number(r);
      }
      case BuiltinFn::Uniform: {
        arity(2);
        need_continuous();
        double lo = num(0), hi = num(1);
        if (!(lo <= hi)) throw EvalError("uniform bounds must satisfy lo <= hi", at);
        return Value::number(lo + source_.uniform01() * (hi - lo));
      }
      case BuiltinFn::Beta: {
        arity(2);
        need_continuous();
        double a = num(0), b = num(1);
        if (!(a > 0) || !(b > 0)) throw EvalError("beta parameters must be > 0", at);
        double x = gamma_draw(a);
        double y = gamma_draw(b);
        double r = x / (x + y);
        check_finite_result(r, builtin.name, at);
        return Value::number(r);
      }
      case BuiltinFn::Categorical: {
        arity(1);
        if (!args[0].is_record()) throw EvalError("categorical expects {ps, vs}", at);
        const Value* ps = args[0].record_field("ps");
        const Value* vs = args[0].record_field("vs");
        if (!ps || !vs || !ps->is_list() || !vs->is_list())
          throw EvalError("categorical expects {ps: [..], vs: [..]}", at);
        const auto& probs = ps->as_list();
        const auto& values = vs->as_list();
        if (probs.size() != values.size() || probs.empty())
          throw EvalError("categorical ps and vs must be non-empty lists of equal length", at);
        std::vector<double> ws(probs.size());
        double total = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
          ws[i] = require_number(probs[i], builtin.name, at);
          if (ws[i] < 0) throw EvalError("categorical probabilities must be >= 0", at);
          total += ws[i];
        }
        if (!(total > 0)) throw EvalError("categorical probabilities must sum to > 0", at);
        return values[source_.choose_weighted(ws.data(), ws.size())];
      }
      case BuiltinFn::UniformDraw: {
        arity(1);
        const auto& items = need_list(0);
        if (items.empty()) throw EvalError("uniformDraw expects a non-empty list", at);
        return items[source_.choose_uniform(items.size())];
      }
      case BuiltinFn::Map: {
        arity(2);
        const auto& items = need_list(1);
        ValueList out;
        out.reserve(items.size());
        for (const auto& item : items) out.push_back(call(args[0], {item}, at));
        return Value::list(std::move(out));
      }
      case BuiltinFn::Filter: {
        arity(2);
        const auto& items = need_list(1);
        ValueList out;
        for (const auto& item : items) {
          Value keep = call(args[0], {item}, at);
          if (!keep.is_bool()) throw EvalError("filter predicate must return a boolean", at);
          if (keep.as_bool()) out.push_back(item);
        }
        return Value::list(std::move(out));
      }
      case BuiltinFn::Reduce: {
        arity(3);
        const auto& items = need_list(2);
        Value acc = args[1];
        for (const auto& item : items) acc = call(args[0], {acc, item}, at);
        return acc;
      }
      case BuiltinFn::Sum: {
        arity(1);
        const auto& items = need_list(0);
        double total = 0;
        for (const auto& item : items) total += require_number(item, builtin.name, at);
        check_finite_result(total, builtin.name, at);
        return Value::number(total);
      }
      case BuiltinFn::Mean: {
        arity(1);
        const auto& items = need_list(0);
        if (items.empty()) throw EvalError("mean of an empty list", at);
        double total = 0;
        for (const auto& item : items) total += require_number(item, builtin.name, at);
        return Value::number(total / static_cast<double>(items.size()));
      }
      case BuiltinFn::Length: {
        arity(1);
        return Value::number(static_cast<double>(need_list(0).size()));
      }
      case BuiltinFn::Any: {
        arity(2);
        const auto& items = need_list(1);
        for (const auto& item : items) {
          Value v = call(args[0], {item}, at);
          if (!v.is_bool()) throw EvalError("any predicate must return a boolean", at);
          if (v.as_bool()) return Value::boolean(true);
        }
        return Value::boolean(false);
      }
      case BuiltinFn::All: {
        arity(2);
        const auto& items = need_list(1);
        for (const auto& item : items) {
          Value v = call(args[0], {item}, at);
          if (!v.is_bool()) throw EvalError("all predicate must return a boolean", at);
          if (!v.as_bool()) return Value::boolean(false);
        }
        return Value::boolean(true);
      }
      case BuiltinFn::IndexOf: {
        arity(2);
        const auto& items = need_list(1);
        for (std::size_t i = 0; i < items.size(); ++i)
          if (items[i] == args[0]) return Value::number(static_cast<double>(i));
        return Value::number(-1);
      }
      case BuiltinFn::Min: {
        arity(2);
        return Value::number(std::min(num(0), num(1)));
      }
      case BuiltinFn::Max: {
        arity(2);
        return Value::number(std::max(num(0), num(1)));
      }
      case BuiltinFn::Abs: {
        arity(1);
        return Value::number(std::abs(num(0)));
      }
      case BuiltinFn::Floor: {
        arity(1);
        return Value::number(std::floor(num(0)));
      }
      case BuiltinFn::Round: {
        arity(1);
        return Value::number(std::floor(num(0) + 0.5));
      }
      case BuiltinFn::Exp: {
        arity(1);
        return Value::number(std::exp(num(0)));
      }
      case BuiltinFn::Log: {
        arity(1);
        double x = num(0);
        if (x < 0) throw EvalError("log of a negative number", at);
        return Value::number(std::log(x));
      }
      case BuiltinFn::NormalCdf: {
        arity(1);
        return Value::number(0.5 * std::erfc(-num(0) / std::sqrt(2.0)));
      }
      case BuiltinFn::AnyPreviousInclusive:
      case BuiltinFn::AnyPreviousExclusive: {
        arity(2);
        if (!args[0].is_callable())
          throw EvalError(std::string(builtin.name) + " expects a predicate over time indices", at);
        double t = require_number(args[1], builtin.name, at);
        double last = builtin.fn == BuiltinFn::AnyPreviousInclusive ? std::floor(t) : std::floor(t) - 1;
        if (last > 100000) throw EvalError("time index too large for temporal helper", at);
        for (double s = 1; s <= last; ++s) {
          Value v = call(args[0], {Value::number(s)}, at);
          if (!v.is_bool())
            throw EvalError(std::string(builtin.name) + " predicate must return a boolean", at);
          if (v.as_bool()) return Value::boolean(true);
        }
        return Value::boolean(false);
      }
    }
    throw EvalError("unknown builtin", at);
  }

  // Marsaglia-Tsang via the trace's random source so enumeration stays in
  // control of every draw (it will have rejected continuous use already).
  double gamma_draw(double shape) {
    if (shape < 1.0) {
      double u = source_.uniform01();
      while (u <= 0.0) u = source_.uniform01();
      return gamma_draw(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double u1 = 1.0 - source_.uniform01();
      double u2 = source_.uniform01();
      double x = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = source_.uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }
};

// Spec-shaped convenience: evaluates `callable(args)` against an existing
// interpreter trace.
inline Value eval_call(Interpreter& trace, const Value& callable, std::vector<Value> args,
                       Span at = {}) {
  return trace.call(callable, std::move(args), at);
}

}  // namespace msa::ppl
