#pragma once

#include <string>
#include <string_view>

#include "lila/datalog/ast.hpp"

namespace lila::datalog {

/// Parses textual Datalog: `p(a,...).` facts, `h(...):-b(...),....` rules and
/// `?-g(...).` queries; `%` starts a line comment. Throws lila::Error with
/// code "syntax" and the offending position.
Program parse_program(std::string_view text);
Rule parse_rule(std::string_view text);
Atom parse_atom(std::string_view text);

/// Canonical text: facts (sorted), then rules, then queries, one per line.
std::string print_program(const Program& program);
std::string print_facts(const FactSet& facts);

}  // namespace lila::datalog
