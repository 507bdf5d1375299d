#include "datalog/planner.hpp"

#include <set>

namespace lila::datalog::detail {

namespace {

using Counts = std::map<std::string, int>;

void count_term(const Term& t, Counts& counts) {
  if (t.is_variable() && !t.variable().anonymous()) ++counts[t.variable().name];
}

void count_expr(const Expr& e, Counts& counts) {
  if (e.kind == Expr::Kind::term) {
    count_term(e.term, counts);
    return;
  }
  if (e.pattern) {
    for (const auto& t : e.pattern->terms) count_term(t, counts);
  }
  for (const auto& o : e.operands) count_expr(o, counts);
}

class Planner {
 public:
  explicit Planner(const Rule& rule) : rule_(rule) {
    for (const auto& t : rule.head.terms) count_term(t, counts_);
    for (const auto& lit : rule.body) {
      if (const auto* a = std::get_if<Atom>(&lit)) {
        for (const auto& t : a->terms) count_term(t, counts_);
      } else {
        const auto& b = std::get<BuiltIn>(lit);
        count_expr(b.lhs, counts_);
        count_expr(b.rhs, counts_);
      }
    }
  }

  RuleAnalysis run() {
    RuleAnalysis out;
    if (rule_.body.empty()) {
      out.diagnostics.push_back(make_error(
          "empty-body", "rule for " + rule_.head.predicate + " has an empty body", rule_.span));
      return out;
    }
    std::vector<const BuiltIn*> pending;
    for (const auto& lit : rule_.body) {
      if (const auto* b = std::get_if<BuiltIn>(&lit)) {
        check_patterns(*b, out.diagnostics);
        pending.push_back(b);
      }
    }
    flush(pending);
    for (const auto& lit : rule_.body) {
      if (const auto* a = std::get_if<Atom>(&lit)) {
        Step s;
        s.is_atom = true;
        s.atom = compile_atom(*a, nullptr);
        plan_.steps.push_back(std::move(s));
        flush(pending);
      }
    }
    for (const BuiltIn* b : pending) {
      std::set<std::string> vars;
      needed(b->lhs, vars);
      needed(b->rhs, vars);
      std::string names;
      for (const auto& v : vars) {
        if (slots_.count(v)) continue;
        if (!names.empty()) names += ", ";
        names += v;
      }
      if (names.empty()) names = "_";
      out.diagnostics.push_back(make_error("unbound-builtin",
                                           "built-in " + b->to_string() +
                                               " uses variables that are never bound: " + names,
                                           b->span));
    }
    plan_.head_predicate = rule_.head.predicate;
    for (const auto& t : rule_.head.terms) {
      ArgSpec a;
      if (t.is_constant()) {
        a.kind = ArgSpec::Kind::constant;
        a.constant = t.constant();
      } else if (auto it = slots_.find(t.variable().name);
                 !t.variable().anonymous() && it != slots_.end()) {
        a.kind = ArgSpec::Kind::bound;
        a.slot = it->second;
      } else {
        out.diagnostics.push_back(make_error(
            "range-restriction",
            "head variable " + t.variable().name + " of " + rule_.head.predicate +
                " is not bound by a body atom or an assignment",
            rule_.head.span));
        continue;
      }
      plan_.head.push_back(std::move(a));
    }
    plan_.slot_count = slots_.size();
    if (!has_errors(out.diagnostics)) out.plan = std::move(plan_);
    return out;
  }

 private:
  bool is_local(const Atom& pattern, const std::string& var) const {
    int inside = 0;
    for (const auto& t : pattern.terms) {
      if (t.is_variable() && t.variable().name == var) ++inside;
    }
    auto it = counts_.find(var);
    return it != counts_.end() && it->second == inside;
  }

  std::set<std::string> locals(const Atom& pattern) const {
    std::set<std::string> out;
    for (const auto& t : pattern.terms) {
      if (t.is_variable() && !t.variable().anonymous() && is_local(pattern, t.variable().name)) {
        out.insert(t.variable().name);
      }
    }
    return out;
  }

  void check_expr_patterns(const Expr& e, const BuiltIn& b, Diagnostics& diags) const {
    if (e.pattern && locals(*e.pattern).size() != 1) {
      diags.push_back(make_error("aggregate-pattern",
                                 e.to_string() +
                                     " needs exactly one variable that appears nowhere else in the rule",
                                 b.span));
    }
    for (const auto& o : e.operands) check_expr_patterns(o, b, diags);
  }

  void check_patterns(const BuiltIn& b, Diagnostics& diags) const {
    check_expr_patterns(b.lhs, b, diags);
    check_expr_patterns(b.rhs, b, diags);
  }

  // Variables that must be bound before the expression can be computed.
  void needed(const Expr& e, std::set<std::string>& out) const {
    if (e.kind == Expr::Kind::term) {
      if (e.term.is_variable()) out.insert(e.term.variable().name);
      return;
    }
    if (e.pattern) {
      for (const auto& t : e.pattern->terms) {
        if (t.is_variable() && !t.variable().anonymous() &&
            !is_local(*e.pattern, t.variable().name)) {
          out.insert(t.variable().name);
        }
      }
    }
    for (const auto& o : e.operands) needed(o, out);
  }

  bool ready(const Expr& e) const {
    std::set<std::string> vars;
    needed(e, vars);
    for (const auto& v : vars) {
      if (!slots_.count(v)) return false;
    }
    return true;
  }

  bool unbound_var(const Expr& e) const {
    return e.is_variable() && !e.term.variable().anonymous() &&
           !slots_.count(e.term.variable().name);
  }

  int bind(const std::string& name) {
    int slot = static_cast<int>(slots_.size());
    slots_.emplace(name, slot);
    return slot;
  }

  AtomStep compile_atom(const Atom& a, std::size_t* column) {
    AtomStep s;
    s.predicate = a.predicate;
    bool prefix_open = true;
    bool column_set = false;
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
      const Term& t = a.terms[i];
      ArgSpec spec;
      if (t.is_constant()) {
        spec.kind = ArgSpec::Kind::constant;
        spec.constant = t.constant();
      } else if (t.variable().anonymous()) {
        spec.kind = ArgSpec::Kind::wildcard;
      } else if (column && is_local(a, t.variable().name)) {
        spec.kind = ArgSpec::Kind::wildcard;
        if (!column_set) {
          *column = i;
          column_set = true;
        }
      } else if (auto it = slots_.find(t.variable().name); it != slots_.end()) {
        spec.kind = ArgSpec::Kind::bound;
        spec.slot = it->second;
      } else {
        spec.kind = ArgSpec::Kind::bind;
        spec.slot = bind(t.variable().name);
      }
      bool keyed = spec.kind == ArgSpec::Kind::constant || spec.kind == ArgSpec::Kind::bound;
      if (prefix_open && keyed) {
        ++s.prefix;
      } else {
        prefix_open = false;
      }
      s.args.push_back(std::move(spec));
    }
    return s;
  }

  CompiledExpr compile_expr(const Expr& e) {
    CompiledExpr c;
    switch (e.kind) {
      case Expr::Kind::term:
        if (e.term.is_constant()) {
          c.kind = CompiledExpr::Kind::constant;
          c.constant = e.term.constant();
        } else {
          c.kind = CompiledExpr::Kind::slot;
          c.slot = slots_.at(e.term.variable().name);
        }
        return c;
      case Expr::Kind::add: c.kind = CompiledExpr::Kind::add; break;
      case Expr::Kind::sub: c.kind = CompiledExpr::Kind::sub; break;
      case Expr::Kind::mul: c.kind = CompiledExpr::Kind::mul; break;
      case Expr::Kind::div: c.kind = CompiledExpr::Kind::div; break;
      case Expr::Kind::min:
      case Expr::Kind::max:
        c.kind = e.kind == Expr::Kind::min ? CompiledExpr::Kind::min : CompiledExpr::Kind::max;
        c.pattern = compile_atom(*e.pattern, &c.column);
        return c;
    }
    for (const auto& o : e.operands) c.operands.push_back(compile_expr(o));
    return c;
  }

  bool try_schedule(const BuiltIn& b) {
    BuiltinStep step;
    step.op = b.op;
    bool lhs_ready = ready(b.lhs);
    bool rhs_ready = ready(b.rhs);
    if (b.op == BuiltInOp::assign) {
      if (!b.lhs.is_variable() || b.lhs.term.variable().anonymous() || !rhs_ready) return false;
      if (lhs_ready) {
        step.mode = BuiltinStep::Mode::compare;
        step.lhs = compile_expr(b.lhs);
        step.rhs = compile_expr(b.rhs);
      } else {
        step.mode = BuiltinStep::Mode::bind;
        step.rhs = compile_expr(b.rhs);
        step.bind_slot = bind(b.lhs.term.variable().name);
      }
    } else if (lhs_ready && rhs_ready) {
      step.mode = BuiltinStep::Mode::compare;
      step.lhs = compile_expr(b.lhs);
      step.rhs = compile_expr(b.rhs);
    } else if (b.op == BuiltInOp::eq && rhs_ready && unbound_var(b.lhs)) {
      step.mode = BuiltinStep::Mode::bind;
      step.rhs = compile_expr(b.rhs);
      step.bind_slot = bind(b.lhs.term.variable().name);
    } else if (b.op == BuiltInOp::eq && lhs_ready && unbound_var(b.rhs)) {
      step.mode = BuiltinStep::Mode::bind;
      step.rhs = compile_expr(b.lhs);
      step.bind_slot = bind(b.rhs.term.variable().name);
    } else {
      return false;
    }
    Step s;
    s.is_atom = false;
    s.builtin = std::move(step);
    plan_.steps.push_back(std::move(s));
    return true;
  }

  void flush(std::vector<const BuiltIn*>& pending) {
    bool progress = true;
    while (progress) {
      progress = false;
      for (auto it = pending.begin(); it != pending.end(); ++it) {
        if (try_schedule(**it)) {
          pending.erase(it);
          progress = true;
          break;
        }
      }
    }
  }

  const Rule& rule_;
  Counts counts_;
  std::map<std::string, int> slots_;
  Plan plan_;
};

}  // namespace

RuleAnalysis analyze_rule(const Rule& rule) { return Planner(rule).run(); }

}  // namespace lila::datalog::detail
