#pragma once

#include <array>
#include <string_view>

namespace msa::ppl {

// Every name the evaluator binds (or treats as a construct). Used both to
// populate the global environment and to decide which call targets count as
// "free" during synthesis gating.
inline constexpr std::array<std::string_view, 28> kStdlibNames = {
    "flip",        "gaussian",  "uniform",  "beta",     "categorical",
    "uniformDraw", "mem",       "condition", "Infer",
    "map",         "filter",    "reduce",   "sum",      "mean",
    "length",      "any",       "all",      "indexOf",
    "min",         "max",       "abs",      "floor",    "round",
    "exp",         "log",       "normalCDF",
    "any_previous_time_inclusive", "any_previous_time_exclusive",
};

inline bool is_stdlib_name(std::string_view name) {
  for (auto n : kStdlibNames)
    if (n == name) return true;
  return false;
}

}  // namespace msa::ppl
