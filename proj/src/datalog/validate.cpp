#include "lila/datalog/validate.hpp"

#include <map>

#include "datalog/planner.hpp"

namespace lila::datalog {

namespace {

class ArityCheck {
 public:
  explicit ArityCheck(Diagnostics& diags) : diags_(diags) {}

  void see(const std::string& pred, std::size_t arity, SourceSpan span) {
    auto [it, fresh] = arity_.emplace(pred, arity);
    if (fresh || it->second == arity) return;
    diags_.push_back(make_error("arity-conflict",
                                "predicate " + pred + " used with arity " + std::to_string(arity) +
                                    " but earlier with arity " + std::to_string(it->second),
                                span));
  }

  void see(const Atom& a) { see(a.predicate, a.arity(), a.span); }

  void see(const Expr& e) {
    if (e.pattern) see(*e.pattern);
    for (const auto& o : e.operands) see(o);
  }

 private:
  Diagnostics& diags_;
  std::map<std::string, std::size_t> arity_;
};

}  // namespace

Diagnostics validate_rule(const Rule& rule) { return detail::analyze_rule(rule).diagnostics; }

Diagnostics validate(const Program& program) {
  Diagnostics diags;
  ArityCheck arity(diags);
  for (const auto& [pred, rel] : program.facts.relations()) {
    for (const auto& t : rel) arity.see(pred, t.size(), {});
  }
  for (const auto& r : program.rules) {
    arity.see(r.head);
    for (const auto& lit : r.body) {
      if (const auto* a = std::get_if<Atom>(&lit)) {
        arity.see(*a);
      } else {
        const auto& b = std::get<BuiltIn>(lit);
        arity.see(b.lhs);
        arity.see(b.rhs);
      }
    }
    auto rd = validate_rule(r);
    diags.insert(diags.end(), rd.begin(), rd.end());
  }
  for (const auto& q : program.queries) arity.see(q);
  return diags;
}

}  // namespace lila::datalog
