#pragma once

// Random aggregator/splitter-free LiLa programs with fixtures: JSON mock
// sources, an optional file enricher, optional inline facts, 1-5 rule
// groups and datalog-format mock goals. Every rule reads at least one
// predicate that arrives with messages, so each processor has an input.

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lila/datalog/ast.hpp"

namespace lila::test_support {

struct RandomLila {
  std::string text;
  std::map<std::string, std::vector<std::string>> mock_inputs;  // source name -> payloads
  std::map<std::string, std::string> files;                     // enricher files
  datalog::FactSet facts;                                       // everything the program can see
  std::vector<datalog::Rule> rules;
  std::map<std::string, std::vector<std::string>> goals;  // mock sink -> exposed
};

inline RandomLila random_lila(std::mt19937& rng) {
  using namespace datalog;
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  RandomLila out;

  int nbase = pick(2, 4);
  std::vector<int> arity(nbase);
  for (auto& a : arity) a = pick(1, 2);
  auto base = [](int i) { return "b" + std::to_string(i); };
  auto decl = [&](int i) {
    std::string s = base(i) + "(";
    for (int k = 0; k < arity[i]; ++k) s += (k ? "," : "") + base(i) + "_c" + std::to_string(k);
    return s + ")";
  };
  auto random_tuples = [&](int i) {
    std::set<Tuple> ts;
    int n = pick(0, 5);
    for (int j = 0; j < n; ++j) {
      Tuple t;
      for (int k = 0; k < arity[i]; ++k) t.push_back(Value{pick(0, 3)});
      ts.insert(t);
    }
    return ts;
  };
  auto json_records = [&](int i, const std::set<Tuple>& ts) {
    std::string s;
    for (const auto& t : ts) {
      s += s.empty() ? "{" : ",{";
      for (int k = 0; k < arity[i]; ++k) {
        s += (k ? "," : "") + std::string("\"") + base(i) + "_c" + std::to_string(k) + "\":" + t[k].to_literal();
      }
      s += "}";
    }
    return s;
  };

  // Role of each base predicate: 0 source, 1 enricher, 2 inline facts.
  std::vector<int> role(nbase, 0);
  std::set<std::string> flowing;
  int nsources = pick(1, 2);
  bool enricher = pick(0, 1) == 1 && nbase > 2;
  bool inline_facts = pick(0, 1) == 1 && nbase > 2;
  if (enricher) role[nbase - 1] = 1;
  if (inline_facts) role[enricher ? nbase - 2 : nbase - 1] = 2;

  std::vector<std::vector<int>> source_rels(nsources);
  for (int i = 0; i < nbase; ++i) {
    if (role[i] == 0) source_rels[pick(0, nsources - 1)].push_back(i);
  }
  for (int s = 0; s < nsources; ++s) {
    if (source_rels[s].empty()) continue;
    std::string name = "src" + std::to_string(s);
    out.text += "@from(mock:" + name + ",json)\n{";
    std::string records;
    for (auto i : source_rels[s]) {
      out.text += decl(i) + ". ";
      flowing.insert(base(i));
      auto ts = random_tuples(i);
      for (const auto& t : ts) out.facts.insert(base(i), t);
      auto r = json_records(i, ts);
      if (!r.empty()) records += (records.empty() ? "" : ",") + r;
    }
    out.text += "}\n\n";
    out.mock_inputs[name] = {"[" + records + "]"};
  }
  for (int i = 0; i < nbase; ++i) {
    auto ts = random_tuples(i);
    if (role[i] == 1) {
      out.text += "@enrich(enrich" + std::to_string(i) + ".json,json)\n{" + decl(i) + ".}\n\n";
      out.files["enrich" + std::to_string(i) + ".json"] = "[" + json_records(i, ts) + "]";
      for (const auto& t : ts) out.facts.insert(base(i), t);
    } else if (role[i] == 2) {
      if (ts.empty()) ts.insert(Tuple(static_cast<std::size_t>(arity[i]), Value{1}));
      for (const auto& t : ts) {
        out.facts.insert(base(i), t);
        out.text += Fact{base(i), t}.to_string() + "\n";
      }
      out.text += "\n";
    }
  }

  // Derived predicates.
  std::map<std::string, int> ar;
  for (int i = 0; i < nbase; ++i) ar[base(i)] = arity[i];
  std::vector<std::string> all_preds;
  for (int i = 0; i < nbase; ++i) all_preds.push_back(base(i));
  const std::vector<std::string> vars = {"x", "y", "z"};
  int nderived = pick(1, 3);
  int rules_left = 5;
  for (int d = 0; d < nderived && rules_left > 0; ++d) {
    std::string head = "d" + std::to_string(d);
    int harity = pick(1, 2);
    int nrules = std::min(rules_left, pick(1, 2));
    bool made = false;
    for (int r = 0; r < nrules; ++r) {
      Rule rule;
      std::vector<std::string> bound;
      auto add_atom = [&](const std::string& p) {
        Atom a;
        a.predicate = p;
        for (int k = 0; k < ar.at(p); ++k) {
          if (pick(0, 6) == 0) {
            a.terms.emplace_back(Value{pick(0, 3)});
          } else {
            auto v = vars[pick(0, 2)];
            bound.push_back(v);
            a.terms.push_back(Term::var(v));
          }
        }
        rule.body.emplace_back(std::move(a));
      };
      std::vector<std::string> f(flowing.begin(), flowing.end());
      add_atom(f[pick(0, static_cast<int>(f.size()) - 1)]);
      int extra = pick(0, 2);
      for (int e = 0; e < extra; ++e) {
        if (made && pick(0, 3) == 0) {
          ar[head] = harity;
          add_atom(head);  // recursion
        } else {
          add_atom(all_preds[pick(0, static_cast<int>(all_preds.size()) - 1)]);
        }
      }
      if (bound.empty()) continue;
      if (pick(0, 3) == 0) {
        BuiltIn b;
        b.op = pick(0, 1) ? BuiltInOp::lt : BuiltInOp::ge;
        b.lhs = Expr::of(Term::var(bound[pick(0, static_cast<int>(bound.size()) - 1)]));
        b.rhs = Expr::of(Term{Value{pick(0, 3)}});
        rule.body.emplace_back(b);
      }
      rule.head.predicate = head;
      for (int k = 0; k < harity; ++k) {
        rule.head.terms.push_back(Term::var(bound[pick(0, static_cast<int>(bound.size()) - 1)]));
      }
      out.text += rule.to_string() + "\n";
      out.rules.push_back(rule);
      made = true;
      --rules_left;
    }
    if (made) {
      ar[head] = harity;
      flowing.insert(head);
      all_preds.push_back(head);
    }
  }

  // Goals over predicates that arrive with messages.
  std::vector<std::string> exposable(flowing.begin(), flowing.end());
  int ngoals = pick(1, 2);
  for (int g = 0; g < ngoals; ++g) {
    std::set<std::string> exposed;
    int n = pick(1, 2);
    for (int k = 0; k < n; ++k) exposed.insert(exposable[pick(0, static_cast<int>(exposable.size()) - 1)]);
    std::string name = "g" + std::to_string(g);
    out.text += "\n@to(mock:" + name + ",datalog)\n{";
    bool first = true;
    for (const auto& e : exposed) {
      out.text += (first ? "" : "\n ") + e;
      first = false;
    }
    out.text += "}\n";
    out.goals[name] = {exposed.begin(), exposed.end()};
  }
  return out;
}

}  // namespace lila::test_support
