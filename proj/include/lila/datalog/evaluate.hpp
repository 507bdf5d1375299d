#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "lila/datalog/ast.hpp"
#include "lila/diagnostics.hpp"

namespace lila::datalog {

struct EvalOptions {
  /// Fixpoint rounds before evaluation is abandoned as non-terminating.
  std::size_t max_iterations = 10000;
};

/// Thrown for non-termination, arithmetic on strings, division by zero and
/// rules that cannot be evaluated (unbound built-in variables, range
/// restriction).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// A rule set compiled once and evaluated against many fact sets (each
/// message of a route runs the same rules).
class RuleSet {
 public:
  RuleSet();
  explicit RuleSet(std::vector<Rule> rules, EvalOptions options = {});
  RuleSet(const RuleSet&);
  RuleSet(RuleSet&&) noexcept;
  RuleSet& operator=(const RuleSet&);
  RuleSet& operator=(RuleSet&&) noexcept;
  ~RuleSet();

  const std::vector<Rule>& rules() const;

  /// Least fixpoint of the rules over `facts` (input facts included).
  FactSet evaluate(FactSet facts) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Naive bottom-up evaluation to the least fixpoint: EDB plus all derived facts.
FactSet evaluate(const Program& program, const EvalOptions& options = {});

/// Facts of `facts` that unify with `goal`: constants select, repeated
/// variables must agree.
FactSet select(const FactSet& facts, const Atom& goal);
bool matches(const Atom& goal, const Tuple& args);

/// select(evaluate(program), goal)
FactSet query(const Program& program, const Atom& goal, const EvalOptions& options = {});

}  // namespace lila::datalog
