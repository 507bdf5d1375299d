#pragma once

#include "lila/datalog/ast.hpp"
#include "lila/diagnostics.hpp"

namespace lila::datalog {

/// Arity conflicts across facts, rule atoms and queries; range restriction;
/// built-ins whose variables are never bound. Empty result means valid.
Diagnostics validate(const Program& program);

/// Rule-local checks only (range restriction, built-in binding).
Diagnostics validate_rule(const Rule& rule);

}  // namespace lila::datalog
