#pragma once

#include <string>
#include <utility>
#include <vector>

namespace msa::util {

// Stitches definition statements, condition expressions, and labeled query
// expressions into a runnable program. Condition and query texts are spliced
// verbatim; the result is the canonical shape shared by gold models and
// synthesized models.
inline std::string assemble_model_program(const std::string& definitions,
                                          const std::vector<std::string>& conditions,
                                          const std::vector<std::pair<std::string, std::string>>& queries) {
  std::string out = "var model = function() {\n";
  out += definitions;
  if (!definitions.empty() && definitions.back() != '\n') out += '\n';
  for (const auto& condition : conditions) {
    out += "  ";
    out += condition;
    out += ";\n";
  }
  out += "  return {\n";
  for (std::size_t i = 0; i < queries.size(); ++i) {
    out += "    ";
    out += queries[i].first;
    out += ": ";
    out += queries[i].second;
    out += i + 1 < queries.size() ? ",\n" : "\n";
  }
  out += "  };\n";
  out += "};\n";
  out += "var posterior = Infer({ model: model, method: 'rejection'});\n";
  return out;
}

}  // namespace msa::util
