#pragma once

// Random positive Datalog programs and a brute-force evaluator that grounds
// every rule over the program's constant domain. Shared by unit and
// acceptance tests.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lila/datalog/ast.hpp"

namespace lila::test_support {

struct RandomProgramShape {
  int max_predicates = 4;
  int max_arity = 3;
  int max_facts = 20;
  int max_rules = 5;
  int max_body_atoms = 3;
};

inline datalog::Program random_program(std::mt19937& rng, const RandomProgramShape& shape = {}) {
  using namespace datalog;
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  int npred = pick(1, shape.max_predicates);
  std::vector<int> arity(npred);
  for (auto& a : arity) a = pick(1, shape.max_arity);
  auto pred = [](int i) { return "p" + std::to_string(i); };

  std::vector<Value> domain = {Value{0}, Value{1}, Value{2}, Value{3}, Value{"a"}, Value{"b"}};
  auto constant = [&] { return domain[pick(0, static_cast<int>(domain.size()) - 1)]; };

  Program prog;
  int nfacts = pick(0, shape.max_facts);
  for (int i = 0; i < nfacts; ++i) {
    int p = pick(0, npred - 1);
    Tuple t;
    for (int k = 0; k < arity[p]; ++k) t.push_back(constant());
    prog.facts.insert(pred(p), std::move(t));
  }

  const std::vector<std::string> vars = {"x", "y", "z", "w"};
  int nrules = pick(0, shape.max_rules);
  for (int i = 0; i < nrules; ++i) {
    Rule r;
    std::vector<std::string> body_vars;
    int natoms = pick(1, shape.max_body_atoms);
    for (int j = 0; j < natoms; ++j) {
      int p = pick(0, npred - 1);
      Atom a;
      a.predicate = pred(p);
      for (int k = 0; k < arity[p]; ++k) {
        if (pick(0, 5) == 0) {
          a.terms.emplace_back(constant());
        } else {
          std::string v = vars[pick(0, static_cast<int>(vars.size()) - 1)];
          body_vars.push_back(v);
          a.terms.push_back(Term::var(v));
        }
      }
      r.body.emplace_back(std::move(a));
    }
    int h = pick(0, npred - 1);
    r.head.predicate = pred(h);
    for (int k = 0; k < arity[h]; ++k) {
      if (body_vars.empty() || pick(0, 6) == 0) {
        r.head.terms.emplace_back(constant());
      } else {
        r.head.terms.push_back(Term::var(body_vars[pick(0, static_cast<int>(body_vars.size()) - 1)]));
      }
    }
    prog.rules.push_back(std::move(r));
  }
  return prog;
}

// Grounds each rule over every assignment of its variables to constants of
// the program and iterates to a fixpoint. Positive atoms only.
inline datalog::FactSet brute_force_fixpoint(const datalog::Program& prog) {
  using namespace datalog;
  std::set<Value> domain;
  for (const auto& f : prog.facts.to_vector()) domain.insert(f.args.begin(), f.args.end());
  for (const auto& r : prog.rules) {
    auto add_terms = [&](const Atom& a) {
      for (const auto& t : a.terms) {
        if (t.is_constant()) domain.insert(t.constant());
      }
    };
    add_terms(r.head);
    for (const auto& lit : r.body) add_terms(std::get<Atom>(lit));
  }
  std::vector<Value> dom(domain.begin(), domain.end());

  FactSet facts = prog.facts;
  for (bool changed = true; changed;) {
    changed = false;
    FactSet next = facts;
    for (const auto& r : prog.rules) {
      std::vector<std::string> names;
      auto collect = [&](const Atom& a) {
        for (const auto& t : a.terms) {
          if (t.is_variable() &&
              std::find(names.begin(), names.end(), t.variable().name) == names.end()) {
            names.push_back(t.variable().name);
          }
        }
      };
      collect(r.head);
      for (const auto& lit : r.body) collect(std::get<Atom>(lit));
      if (dom.empty() && !names.empty()) continue;

      std::vector<std::size_t> idx(names.size(), 0);
      auto ground = [&](const Atom& a) {
        Tuple t;
        for (const auto& term : a.terms) {
          if (term.is_constant()) {
            t.push_back(term.constant());
          } else {
            auto pos = std::find(names.begin(), names.end(), term.variable().name) - names.begin();
            t.push_back(dom[idx[pos]]);
          }
        }
        return t;
      };
      for (;;) {
        bool holds = true;
        for (const auto& lit : r.body) {
          const auto& a = std::get<Atom>(lit);
          if (!facts.contains(a.predicate, ground(a))) {
            holds = false;
            break;
          }
        }
        if (holds && next.insert(r.head.predicate, ground(r.head))) changed = true;
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == dom.size()) idx[k++] = 0;
        if (k == idx.size()) break;
      }
    }
    facts = std::move(next);
  }
  return facts;
}

}  // namespace lila::test_support
