#include "lila/cdm/message.hpp"

#include <algorithm>

namespace lila::cdm {

using datalog::Value;

std::vector<std::string> parameter_names(const MetaFacts& meta, const std::string& predicate) {
  std::map<std::size_t, std::string> by_pos;
  auto it = meta.lower_bound(MetaFact{predicate, "", 0});
  for (; it != meta.end() && it->predicate == predicate; ++it) by_pos[it->position] = it->name;
  std::vector<std::string> out;
  for (auto& [_, name] : by_pos) out.push_back(name);
  return out;
}

void declare(MetaFacts& meta, const std::string& predicate, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) meta.insert({predicate, names[i], i + 1});
}

std::set<std::string> described_predicates(const MetaFacts& meta) {
  std::set<std::string> out;
  for (const auto& m : meta) out.insert(m.predicate);
  return out;
}

std::optional<std::string> check_meta(const MetaFacts& meta) {
  for (const auto& pred : described_predicates(meta)) {
    std::map<std::size_t, std::set<std::string>> by_pos;
    std::set<std::string> names;
    auto it = meta.lower_bound(MetaFact{pred, "", 0});
    for (; it != meta.end() && it->predicate == pred; ++it) {
      by_pos[it->position].insert(it->name);
      if (!names.insert(it->name).second) {
        return "parameter name " + it->name + " used twice for " + pred;
      }
    }
    std::size_t expect = 1;
    for (const auto& [pos, ns] : by_pos) {
      if (pos != expect) return "meta-facts of " + pred + " skip position " + std::to_string(expect);
      if (ns.size() > 1) return "position " + std::to_string(pos) + " of " + pred + " has several names";
      ++expect;
    }
  }
  return std::nullopt;
}

std::vector<std::string> merge_meta(MetaFacts& into, const MetaFacts& from) {
  std::vector<std::string> conflicts;
  for (const auto& pred : described_predicates(from)) {
    auto theirs = parameter_names(from, pred);
    auto ours = parameter_names(into, pred);
    if (ours.empty()) {
      declare(into, pred, theirs);
    } else if (ours != theirs) {
      conflicts.push_back(pred);
    }
  }
  return conflicts;
}

datalog::FactSet meta_facts(const MetaFacts& meta) {
  datalog::FactSet out;
  for (const auto& m : meta) {
    out.insert("meta", {Value{m.predicate}, Value{m.name}, Value{static_cast<long long>(m.position)}});
  }
  return out;
}

MetaFacts lift_meta(datalog::FactSet& facts) {
  MetaFacts out;
  if (!facts.has_predicate("meta")) return out;
  datalog::FactSet rest;
  for (const auto& f : facts.to_vector()) {
    if (f.predicate == "meta" && f.args.size() == 3 && f.args[0].is_string() &&
        f.args[1].is_string() && f.args[2].kind() == Value::Kind::integer &&
        f.args[2].as_integer() >= 1) {
      out.insert({f.args[0].as_string(), f.args[1].as_string(),
                  f.args[2].as_integer().convert_to<std::size_t>()});
    } else {
      rest.insert(f);
    }
  }
  facts = std::move(rest);
  return out;
}

bool references_meta(const std::vector<datalog::Rule>& rules) {
  for (const auto& r : rules) {
    if (r.body_predicates().count("meta")) return true;
  }
  return false;
}

datalog::FactSet evaluation_facts(const Message& msg, const std::vector<datalog::Rule>& rules) {
  if (msg.header.meta.empty() || !references_meta(rules)) return msg.body.facts;
  datalog::FactSet facts = msg.body.facts;
  facts.merge(meta_facts(msg.header.meta));
  return facts;
}

std::vector<datalog::Rule> bind_named_parameters(std::vector<datalog::Rule> rules,
                                                 const MetaFacts& meta) {
  for (auto& r : rules) {
    std::set<std::string> body_vars;
    for (const auto& lit : r.body) {
      if (const auto* a = std::get_if<datalog::Atom>(&lit)) {
        for (const auto& t : a->terms) {
          if (t.is_variable()) body_vars.insert(t.variable().name);
        }
      } else {
        const auto& b = std::get<datalog::BuiltIn>(lit);
        b.lhs.collect_variables(body_vars);
        b.rhs.collect_variables(body_vars);
      }
    }
    std::vector<datalog::Literal> extra;
    std::set<std::string> done;
    for (const auto& ht : r.head.terms) {
      if (!ht.is_variable() || ht.variable().anonymous()) continue;
      const std::string& var = ht.variable().name;
      if (body_vars.count(var) || done.count(var)) continue;
      for (const auto& lit : r.body) {
        const auto* a = std::get_if<datalog::Atom>(&lit);
        if (!a) continue;
        auto names = parameter_names(meta, a->predicate);
        if (names.size() != a->terms.size()) continue;
        auto it = std::find(names.begin(), names.end(), var);
        if (it == names.end()) continue;
        const auto& t = a->terms[static_cast<std::size_t>(it - names.begin())];
        if (!t.is_constant()) continue;
        datalog::BuiltIn eq;
        eq.op = datalog::BuiltInOp::eq;
        eq.lhs = datalog::Expr::of(datalog::Term::var(var));
        eq.rhs = datalog::Expr::of(t);
        eq.span = a->span;
        extra.emplace_back(std::move(eq));
        done.insert(var);
        break;
      }
    }
    r.body.insert(r.body.end(), extra.begin(), extra.end());
  }
  return rules;
}

}  // namespace lila::cdm
