#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lila/datalog/ast.hpp"
#include "lila/diagnostics.hpp"

namespace lila::datalog::detail {

struct ArgSpec {
  enum class Kind { constant, bound, bind, wildcard };
  Kind kind = Kind::wildcard;
  Value constant;
  int slot = -1;
};

struct AtomStep {
  std::string predicate;
  std::vector<ArgSpec> args;
  std::size_t prefix = 0;  // leading args that are constant or bound (range-scan key)
};

struct CompiledExpr {
  enum class Kind { constant, slot, add, sub, mul, div, min, max };
  Kind kind = Kind::constant;
  Value constant;
  int slot = -1;
  std::vector<CompiledExpr> operands;
  std::optional<AtomStep> pattern;  // min/max; args use `bind` for the aggregated column
  std::size_t column = 0;
};

struct BuiltinStep {
  enum class Mode { compare, bind };
  BuiltInOp op = BuiltInOp::eq;
  Mode mode = Mode::compare;
  int bind_slot = -1;  // Mode::bind
  CompiledExpr lhs;
  CompiledExpr rhs;
};

struct Step {
  bool is_atom = true;
  AtomStep atom;
  BuiltinStep builtin;
};

struct Plan {
  std::string head_predicate;
  std::vector<ArgSpec> head;  // constant or bound
  std::vector<Step> steps;
  std::size_t slot_count = 0;
};

struct RuleAnalysis {
  Diagnostics diagnostics;
  std::optional<Plan> plan;  // set when diagnostics has no errors
};

/// Orders body literals so every built-in runs once its inputs are bound,
/// decides `=` between comparison and binding, and checks range restriction.
RuleAnalysis analyze_rule(const Rule& rule);

}  // namespace lila::datalog::detail
