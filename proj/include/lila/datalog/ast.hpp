#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lila/datalog/value.hpp"
#include "lila/diagnostics.hpp"

namespace lila::datalog {

/// Variable reference. The name `_` is the anonymous variable: every
/// occurrence is distinct and it never binds.
struct Variable {
  std::string name;

  bool anonymous() const { return name == "_"; }
  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

class Term {
 public:
  Term() = default;
  Term(Variable v) : v_(std::move(v)) {}
  Term(Value c) : v_(std::move(c)) {}

  static Term var(std::string name) { return Term{Variable{std::move(name)}}; }

  bool is_variable() const { return std::holds_alternative<Variable>(v_); }
  bool is_constant() const { return !is_variable(); }
  const Variable& variable() const { return std::get<Variable>(v_); }
  const Value& constant() const { return std::get<Value>(v_); }

  std::string to_string() const;

  friend bool operator==(const Term&, const Term&) = default;

 private:
  std::variant<Variable, Value> v_;
};

struct Atom {
  std::string predicate;
  std::vector<Term> terms;
  SourceSpan span;

  std::size_t arity() const { return terms.size(); }
  bool is_ground() const;
  std::string to_string() const;

  /// Structural equality; source spans are ignored.
  friend bool operator==(const Atom& a, const Atom& b) {
    return a.predicate == b.predicate && a.terms == b.terms;
  }
};

/// Arithmetic / aggregate expression on either side of a built-in.
struct Expr {
  enum class Kind { term, add, sub, mul, div, min, max };

  Kind kind = Kind::term;
  Term term;                   // Kind::term
  std::vector<Expr> operands;  // binary operators: exactly two
  std::optional<Atom> pattern; // min/max: the relation pattern, one free variable marks the column

  static Expr of(Term t) { return Expr{Kind::term, std::move(t), {}, {}}; }
  static Expr binary(Kind k, Expr lhs, Expr rhs);
  static Expr aggregate(Kind k, Atom pattern);

  bool is_variable() const { return kind == Kind::term && term.is_variable(); }
  std::string to_string() const;
  /// Variables read by the expression (min/max pattern variables included).
  void collect_variables(std::set<std::string>& out) const;

  friend bool operator==(const Expr& a, const Expr& b) {
    return a.kind == b.kind && a.term == b.term && a.operands == b.operands && a.pattern == b.pattern;
  }
};

enum class BuiltInOp { lt, gt, le, ge, eq, assign, equals, contains, startswith, endswith };

std::string_view builtin_name(BuiltInOp op);
bool is_infix(BuiltInOp op);

struct BuiltIn {
  BuiltInOp op = BuiltInOp::eq;
  Expr lhs;
  Expr rhs;
  SourceSpan span;

  std::string to_string() const;
  friend bool operator==(const BuiltIn& a, const BuiltIn& b) {
    return a.op == b.op && a.lhs == b.lhs && a.rhs == b.rhs;
  }
};

using Literal = std::variant<Atom, BuiltIn>;

struct Rule {
  Atom head;
  std::vector<Literal> body;
  SourceSpan span;

  std::string to_string() const;
  /// Predicates of positive body atoms and of min/max patterns.
  std::set<std::string> body_predicates() const;

  friend bool operator==(const Rule& a, const Rule& b) {
    return a.head == b.head && a.body == b.body;
  }
};

/// Ground atom.
struct Fact {
  std::string predicate;
  Tuple args;

  std::string to_string() const;
  Atom to_atom() const;

  friend bool operator==(const Fact&, const Fact&) = default;
  friend auto operator<=>(const Fact&, const Fact&) = default;
};

/// Duplicate-free set of ground facts, grouped by predicate. Iteration is
/// sorted by predicate then by term values.
class FactSet {
 public:
  using Relation = std::set<Tuple>;

  FactSet() = default;
  FactSet(std::initializer_list<Fact> facts);

  bool insert(const std::string& predicate, Tuple args);
  bool insert(const Fact& f) { return insert(f.predicate, f.args); }
  /// Inserts every fact of `other`; returns the number of new facts.
  std::size_t merge(const FactSet& other);

  bool contains(const std::string& predicate, const Tuple& args) const;
  bool contains(const Fact& f) const { return contains(f.predicate, f.args); }

  /// Empty relation when the predicate is absent.
  const Relation& relation(const std::string& predicate) const;
  bool has_predicate(const std::string& predicate) const;
  std::vector<std::string> predicates() const;

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  /// Facts of the listed predicates only.
  FactSet restricted_to(const std::set<std::string>& predicates) const;
  /// Copy with every predicate renamed through `rename`.
  template <typename Fn>
  FactSet renamed(Fn&& rename) const {
    FactSet out;
    for (const auto& [pred, rel] : relations_) {
      for (const auto& t : rel) out.insert(rename(pred), t);
    }
    return out;
  }

  std::vector<Fact> to_vector() const;
  const std::map<std::string, Relation>& relations() const { return relations_; }

  /// Set equality; predicates with no facts are ignored.
  friend bool operator==(const FactSet& a, const FactSet& b);

 private:
  std::map<std::string, Relation> relations_;
  std::size_t size_ = 0;
};

/// Facts, supporting rules and goal queries (`?- p(...)`).
struct Program {
  FactSet facts;
  std::vector<Rule> rules;
  std::vector<Atom> queries;

  bool empty() const { return facts.empty() && rules.empty() && queries.empty(); }
  friend bool operator==(const Program&, const Program&) = default;
};

/// Builders for tests and programmatic construction.
Atom atom(std::string predicate, std::vector<Term> terms);
Fact fact(std::string predicate, Tuple args);

}  // namespace lila::datalog
