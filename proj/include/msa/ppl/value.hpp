#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "msa/ppl/ast.hpp"
#include "msa/ppl/pretty.hpp"

namespace msa::ppl {

class Value;
struct Callable;
struct InferSpec;

using ValueList = std::vector<Value>;
using ValueRecord = std::vector<std::pair<std::string, Value>>;  // sorted by key

class Value {
 public:
  using StrPtr = std::shared_ptr<const std::string>;
  using ListPtr = std::shared_ptr<const ValueList>;
  using RecordPtr = std::shared_ptr<const ValueRecord>;
  using CallPtr = std::shared_ptr<const Callable>;
  using InferPtr = std::shared_ptr<const InferSpec>;

  Value() : v_(false) {}
  static Value number(double d) { return Value(d); }
  static Value boolean(bool b) { return Value(b); }
  static Value text(std::string s) { return Value(std::make_shared<const std::string>(std::move(s))); }
  static Value list(ValueList items) { return Value(std::make_shared<const ValueList>(std::move(items))); }
  static Value record(ValueRecord fields) {
    std::sort(fields.begin(), fields.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return Value(std::make_shared<const ValueRecord>(std::move(fields)));
  }
  static Value callable(CallPtr c) { return Value(std::move(c)); }
  static Value infer(InferPtr i) { return Value(std::move(i)); }

  bool is_number() const { return std::holds_alternative<double>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_text() const { return std::holds_alternative<StrPtr>(v_); }
  bool is_list() const { return std::holds_alternative<ListPtr>(v_); }
  bool is_record() const { return std::holds_alternative<RecordPtr>(v_); }
  bool is_callable() const { return std::holds_alternative<CallPtr>(v_); }
  bool is_infer() const { return std::holds_alternative<InferPtr>(v_); }

  double as_number() const { return std::get<double>(v_); }
  bool as_bool() const { return std::get<bool>(v_); }
  const std::string& as_text() const { return *std::get<StrPtr>(v_); }
  const ValueList& as_list() const { return *std::get<ListPtr>(v_); }
  const ValueRecord& as_record() const { return *std::get<RecordPtr>(v_); }
  const CallPtr& as_callable() const { return std::get<CallPtr>(v_); }
  const InferPtr& as_infer() const { return std::get<InferPtr>(v_); }

  const Value* record_field(const std::string& key) const {
    const auto& rec = as_record();
    auto it = std::lower_bound(rec.begin(), rec.end(), key,
                               [](const auto& f, const std::string& k) { return f.first < k; });
    if (it != rec.end() && it->first == key) return &it->second;
    return nullptr;
  }

  const char* type_name() const {
    switch (v_.index()) {
      case 0: return "number";
      case 1: return "boolean";
      case 2: return "text";
      case 3: return "list";
      case 4: return "record";
      case 5: return "callable";
      default: return "inference";
    }
  }

  bool operator==(const Value& o) const {
    if (v_.index() != o.v_.index()) return false;
    switch (v_.index()) {
      case 0: return as_number() == o.as_number();
      case 1: return as_bool() == o.as_bool();
      case 2: return as_text() == o.as_text();
      case 3: {
        const auto& a = as_list();
        const auto& b = o.as_list();
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
          if (!(a[i] == b[i])) return false;
        return true;
      }
      case 4: {
        const auto& a = as_record();
        const auto& b = o.as_record();
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
          if (a[i].first != b[i].first || !(a[i].second == b[i].second)) return false;
        return true;
      }
      case 5: return std::get<CallPtr>(v_) == std::get<CallPtr>(o.v_);
      default: return std::get<InferPtr>(v_) == std::get<InferPtr>(o.v_);
    }
  }
  bool operator!=(const Value& o) const { return !(*this == o); }

 private:
  explicit Value(double d) : v_(d) {}
  explicit Value(bool b) : v_(b) {}
  explicit Value(StrPtr s) : v_(std::move(s)) {}
  explicit Value(ListPtr l) : v_(std::move(l)) {}
  explicit Value(RecordPtr r) : v_(std::move(r)) {}
  explicit Value(CallPtr c) : v_(std::move(c)) {}
  explicit Value(InferPtr i) : v_(std::move(i)) {}

  std::variant<double, bool, StrPtr, ListPtr, RecordPtr, CallPtr, InferPtr> v_;
};

struct Env;
using EnvPtr = std::shared_ptr<Env>;

struct Env {
  EnvPtr parent;
  std::vector<std::pair<std::string, Value>> bindings;

  const Value* lookup(const std::string& name) const {
    for (const Env* e = this; e; e = e->parent.get()) {
      for (auto it = e->bindings.rbegin(); it != e->bindings.rend(); ++it)
        if (it->first == name) return &it->second;
    }
    return nullptr;
  }

  void bind(std::string name, Value v) { bindings.emplace_back(std::move(name), std::move(v)); }
};

enum class BuiltinFn {
  Flip, Gaussian, Uniform, Beta, Categorical, UniformDraw,
  Map, Filter, Reduce, Sum, Mean, Length, Any, All, IndexOf,
  Min, Max, Abs, Floor, Round, Exp, Log, NormalCdf,
  AnyPreviousInclusive, AnyPreviousExclusive,
};

struct Closure {
  const FnLit* fn = nullptr;
  EnvPtr env;
};

struct BuiltinCallable {
  BuiltinFn fn;
  const char* name;
};

struct MemoizedCallable {
  Value inner;           // must itself be callable
  std::uint64_t memo_id = 0;
};

struct Callable {
  std::variant<Closure, BuiltinCallable, MemoizedCallable> impl;
};

struct InferSpec {
  Value model;         // callable
  std::string method;  // e.g. "rejection"
};

// Type-tagged, key-sorted, shortest-round-trip serialization. Length
// prefixes keep the encoding injective.
inline void canonical_encode(const Value& v, std::string& out) {
  if (v.is_number()) {
    out += "n:";
    out += format_number(v.as_number());
  } else if (v.is_bool()) {
    out += v.as_bool() ? "b:1" : "b:0";
  } else if (v.is_text()) {
    const auto& s = v.as_text();
    out += "s:";
    out += std::to_string(s.size());
    out += ':';
    out += s;
  } else if (v.is_list()) {
    out += "l:[";
    for (const auto& item : v.as_list()) {
      canonical_encode(item, out);
      out += ',';
    }
    out += ']';
  } else if (v.is_record()) {
    out += "r:{";
    for (const auto& [key, val] : v.as_record()) {
      out += std::to_string(key.size());
      out += ':';
      out += key;
      out += '=';
      canonical_encode(val, out);
      out += ',';
    }
    out += '}';
  } else {
    throw EvalError(std::string("cannot canonicalize a ") + v.type_name() + " value");
  }
}

inline std::string canonical_encode(const Value& v) {
  std::string out;
  canonical_encode(v, out);
  return out;
}

// Human-readable rendering for diagnostics and JSON-ish dumps.
inline std::string to_display(const Value& v) {
  if (v.is_number()) return format_number(v.as_number());
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  if (v.is_text()) return "'" + v.as_text() + "'";
  if (v.is_list()) {
    std::string out = "[";
    const auto& items = v.as_list();
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ", ";
      out += to_display(items[i]);
    }
    return out + "]";
  }
  if (v.is_record()) {
    std::string out = "{";
    const auto& rec = v.as_record();
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (i) out += ", ";
      out += rec[i].first + ": " + to_display(rec[i].second);
    }
    return out + "}";
  }
  return std::string("<") + v.type_name() + ">";
}

}  // namespace msa::ppl
