#include "lila/datalog/evaluate.hpp"

#include <optional>

#include "datalog/planner.hpp"

namespace lila::datalog {

using detail::ArgSpec;
using detail::AtomStep;
using detail::BuiltinStep;
using detail::CompiledExpr;
using detail::Plan;

namespace {

[[noreturn]] void fail(const std::string& msg, const Rule& rule) {
  throw EvaluationError(make_error("evaluation", msg + " in rule " + rule.to_string(), rule.span));
}

using Env = std::vector<Value>;

// Calls `fn` for every tuple of the relation that agrees with the step's
// constant and bound arguments, after binding its free arguments into `env`.
template <typename Fn>
void scan(const FactSet& facts, const AtomStep& step, Env& env, Fn&& fn) {
  const auto& rel = facts.relation(step.predicate);
  if (rel.empty()) return;
  Tuple key;
  key.reserve(step.prefix);
  for (std::size_t i = 0; i < step.prefix; ++i) {
    const ArgSpec& a = step.args[i];
    key.push_back(a.kind == ArgSpec::Kind::constant ? a.constant : env[a.slot]);
  }
  auto it = step.prefix ? rel.lower_bound(key) : rel.begin();
  for (; it != rel.end(); ++it) {
    const Tuple& t = *it;
    if (t.size() < step.prefix || !std::equal(key.begin(), key.end(), t.begin())) {
      if (step.prefix) break;
      continue;
    }
    if (t.size() != step.args.size()) continue;
    bool ok = true;
    for (std::size_t i = step.prefix; i < t.size() && ok; ++i) {
      const ArgSpec& a = step.args[i];
      switch (a.kind) {
        case ArgSpec::Kind::constant: ok = t[i] == a.constant; break;
        case ArgSpec::Kind::bound: ok = t[i] == env[a.slot]; break;
        case ArgSpec::Kind::bind: env[a.slot] = t[i]; break;
        case ArgSpec::Kind::wildcard: break;
      }
    }
    if (ok) fn(t);
  }
}

Value arithmetic(CompiledExpr::Kind k, const Value& a, const Value& b, const Rule& rule) {
  if (!a.is_numeric() || !b.is_numeric()) {
    fail("arithmetic on non-numeric value " + (a.is_numeric() ? b : a).to_literal(), rule);
  }
  if (a.kind() == Value::Kind::integer && b.kind() == Value::Kind::integer) {
    const Integer& x = a.as_integer();
    const Integer& y = b.as_integer();
    switch (k) {
      case CompiledExpr::Kind::add: return Value{Integer(x + y)};
      case CompiledExpr::Kind::sub: return Value{Integer(x - y)};
      case CompiledExpr::Kind::mul: return Value{Integer(x * y)};
      case CompiledExpr::Kind::div:
        if (y == 0) fail("division by zero", rule);
        return Value{Integer(x / y)};
      default: break;
    }
  }
  double x = a.to_double();
  double y = b.to_double();
  switch (k) {
    case CompiledExpr::Kind::add: return Value{x + y};
    case CompiledExpr::Kind::sub: return Value{x - y};
    case CompiledExpr::Kind::mul: return Value{x * y};
    case CompiledExpr::Kind::div:
      if (y == 0) fail("division by zero", rule);
      return Value{x / y};
    default: break;
  }
  fail("unsupported operator", rule);
}

std::optional<Value> eval_expr(const CompiledExpr& e, const FactSet& facts, Env& env,
                               const Rule& rule) {
  switch (e.kind) {
    case CompiledExpr::Kind::constant: return e.constant;
    case CompiledExpr::Kind::slot: return env[e.slot];
    case CompiledExpr::Kind::min:
    case CompiledExpr::Kind::max: {
      std::optional<Value> best;
      bool want_min = e.kind == CompiledExpr::Kind::min;
      scan(facts, *e.pattern, env, [&](const Tuple& t) {
        const Value& v = t[e.column];
        if (!best || (want_min ? v < *best : v > *best)) best = v;
      });
      return best;
    }
    default: break;
  }
  auto a = eval_expr(e.operands[0], facts, env, rule);
  if (!a) return std::nullopt;
  auto b = eval_expr(e.operands[1], facts, env, rule);
  if (!b) return std::nullopt;
  return arithmetic(e.kind, *a, *b, rule);
}

bool compare(BuiltInOp op, const Value& a, const Value& b) {
  switch (op) {
    case BuiltInOp::lt: return a < b;
    case BuiltInOp::gt: return a > b;
    case BuiltInOp::le: return a <= b;
    case BuiltInOp::ge: return a >= b;
    case BuiltInOp::eq:
    case BuiltInOp::assign:
    case BuiltInOp::equals: return Value::numerically_equal(a, b);
    case BuiltInOp::contains: return a.to_text().find(b.to_text()) != std::string::npos;
    case BuiltInOp::startswith: return a.to_text().starts_with(b.to_text());
    case BuiltInOp::endswith: return a.to_text().ends_with(b.to_text());
  }
  return false;
}

struct CompiledRule {
  Rule rule;
  Plan plan;
};

class Run {
 public:
  Run(const CompiledRule& r, const FactSet& facts, FactSet& out)
      : r_(r), facts_(facts), out_(out), env_(r.plan.slot_count) {}

  std::size_t go() {
    step(0);
    return derived_;
  }

 private:
  void step(std::size_t i) {
    const Plan& plan = r_.plan;
    if (i == plan.steps.size()) {
      emit();
      return;
    }
    const auto& s = plan.steps[i];
    if (s.is_atom) {
      scan(facts_, s.atom, env_, [&](const Tuple&) { step(i + 1); });
      return;
    }
    const BuiltinStep& b = s.builtin;
    if (b.mode == BuiltinStep::Mode::bind) {
      auto v = eval_expr(b.rhs, facts_, env_, r_.rule);
      if (!v) return;
      env_[b.bind_slot] = std::move(*v);
      step(i + 1);
      return;
    }
    auto lhs = eval_expr(b.lhs, facts_, env_, r_.rule);
    if (!lhs) return;
    auto rhs = eval_expr(b.rhs, facts_, env_, r_.rule);
    if (!rhs) return;
    if (compare(b.op, *lhs, *rhs)) step(i + 1);
  }

  void emit() {
    Tuple t;
    t.reserve(r_.plan.head.size());
    for (const auto& a : r_.plan.head) {
      t.push_back(a.kind == ArgSpec::Kind::constant ? a.constant : env_[a.slot]);
    }
    if (facts_.contains(r_.plan.head_predicate, t)) return;
    if (out_.insert(r_.plan.head_predicate, std::move(t))) ++derived_;
  }

  const CompiledRule& r_;
  const FactSet& facts_;
  FactSet& out_;
  Env env_;
  std::size_t derived_ = 0;
};

}  // namespace

struct RuleSet::Impl {
  std::vector<Rule> rules;
  std::vector<CompiledRule> compiled;
  EvalOptions options;
};

RuleSet::RuleSet() : impl_(std::make_shared<Impl>()) {}

RuleSet::RuleSet(std::vector<Rule> rules, EvalOptions options) {
  auto impl = std::make_shared<Impl>();
  impl->options = options;
  for (const auto& r : rules) {
    auto analysis = detail::analyze_rule(r);
    for (const auto& d : analysis.diagnostics) {
      if (d.is_error()) throw EvaluationError(d);
    }
    impl->compiled.push_back({r, std::move(*analysis.plan)});
  }
  impl->rules = std::move(rules);
  impl_ = std::move(impl);
}

RuleSet::RuleSet(const RuleSet&) = default;
RuleSet::RuleSet(RuleSet&&) noexcept = default;
RuleSet& RuleSet::operator=(const RuleSet&) = default;
RuleSet& RuleSet::operator=(RuleSet&&) noexcept = default;
RuleSet::~RuleSet() = default;

const std::vector<Rule>& RuleSet::rules() const { return impl_->rules; }

FactSet RuleSet::evaluate(FactSet facts) const {
  const auto& compiled = impl_->compiled;
  if (compiled.empty()) return facts;
  for (std::size_t round = 0;; ++round) {
    FactSet delta;
    const CompiledRule* last = nullptr;
    for (const auto& r : compiled) {
      if (Run(r, facts, delta).go() > 0) last = &r;
    }
    if (delta.empty()) return facts;
    if (round + 1 >= impl_->options.max_iterations) {
      throw EvaluationError(make_error(
          "non-termination",
          "evaluation did not reach a fixpoint after " +
              std::to_string(impl_->options.max_iterations) +
              " iterations; last rule deriving new facts: " + last->rule.to_string(),
          last->rule.span));
    }
    facts.merge(delta);
  }
}

FactSet evaluate(const Program& program, const EvalOptions& options) {
  return RuleSet(program.rules, options).evaluate(program.facts);
}

bool matches(const Atom& goal, const Tuple& args) {
  if (goal.terms.size() != args.size()) return false;
  std::map<std::string, const Value*> seen;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const Term& t = goal.terms[i];
    if (t.is_constant()) {
      if (!(t.constant() == args[i])) return false;
    } else if (!t.variable().anonymous()) {
      auto [it, fresh] = seen.emplace(t.variable().name, &args[i]);
      if (!fresh && !(*it->second == args[i])) return false;
    }
  }
  return true;
}

FactSet select(const FactSet& facts, const Atom& goal) {
  FactSet out;
  for (const auto& t : facts.relation(goal.predicate)) {
    if (matches(goal, t)) out.insert(goal.predicate, t);
  }
  return out;
}

FactSet query(const Program& program, const Atom& goal, const EvalOptions& options) {
  return select(evaluate(program, options), goal);
}

}  // namespace lila::datalog
