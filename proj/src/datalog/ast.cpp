#include "lila/datalog/ast.hpp"

#include <sstream>

namespace lila::datalog {

std::string Term::to_string() const {
  return is_variable() ? variable().name : constant().to_literal();
}

bool Atom::is_ground() const {
  for (const auto& t : terms) {
    if (t.is_variable()) return false;
  }
  return true;
}

std::string Atom::to_string() const {
  std::string out = predicate;
  out.push_back('(');
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out.push_back(',');
    out += terms[i].to_string();
  }
  out.push_back(')');
  return out;
}

Expr Expr::binary(Kind k, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = k;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  return e;
}

Expr Expr::aggregate(Kind k, Atom pattern) {
  Expr e;
  e.kind = k;
  e.pattern = std::move(pattern);
  return e;
}

namespace {

int precedence(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::add:
    case Expr::Kind::sub: return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div: return 2;
    default: return 3;
  }
}

char op_char(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::add: return '+';
    case Expr::Kind::sub: return '-';
    case Expr::Kind::mul: return '*';
    case Expr::Kind::div: return '/';
    default: return '?';
  }
}

std::string render(const Expr& e, int parent_prec, bool right_side) {
  switch (e.kind) {
    case Expr::Kind::term: return e.term.to_string();
    case Expr::Kind::min: return "min(" + e.pattern->to_string() + ")";
    case Expr::Kind::max: return "max(" + e.pattern->to_string() + ")";
    default: break;
  }
  int p = precedence(e.kind);
  // Spaces around operators keep `a - 1` from lexing as one identifier.
  std::string s = render(e.operands[0], p, false) + ' ' + op_char(e.kind) + ' ' +
                  render(e.operands[1], p, true);
  bool parens = p < parent_prec || (p == parent_prec && right_side);
  return parens ? "(" + s + ")" : s;
}

}  // namespace

std::string Expr::to_string() const { return render(*this, 0, false); }

void Expr::collect_variables(std::set<std::string>& out) const {
  if (kind == Kind::term) {
    if (term.is_variable() && !term.variable().anonymous()) out.insert(term.variable().name);
    return;
  }
  if (pattern) {
    for (const auto& t : pattern->terms) {
      if (t.is_variable() && !t.variable().anonymous()) out.insert(t.variable().name);
    }
  }
  for (const auto& o : operands) o.collect_variables(out);
}

std::string_view builtin_name(BuiltInOp op) {
  switch (op) {
    case BuiltInOp::lt: return "<";
    case BuiltInOp::gt: return ">";
    case BuiltInOp::le: return "<=";
    case BuiltInOp::ge: return ">=";
    case BuiltInOp::eq: return "=";
    case BuiltInOp::assign: return ":=";
    case BuiltInOp::equals: return "equals";
    case BuiltInOp::contains: return "contains";
    case BuiltInOp::startswith: return "startswith";
    case BuiltInOp::endswith: return "endswith";
  }
  return "?";
}

bool is_infix(BuiltInOp op) {
  switch (op) {
    case BuiltInOp::equals:
    case BuiltInOp::contains:
    case BuiltInOp::startswith:
    case BuiltInOp::endswith: return false;
    default: return true;
  }
}

std::string BuiltIn::to_string() const {
  if (is_infix(op)) return lhs.to_string() + std::string(builtin_name(op)) + rhs.to_string();
  return std::string(builtin_name(op)) + "(" + lhs.to_string() + "," + rhs.to_string() + ")";
}

std::string Rule::to_string() const {
  std::string out = head.to_string() + ":-";
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i) out.push_back(',');
    std::visit([&](const auto& lit) { out += lit.to_string(); }, body[i]);
  }
  out.push_back('.');
  return out;
}

std::set<std::string> Rule::body_predicates() const {
  std::set<std::string> out;
  for (const auto& lit : body) {
    if (const auto* a = std::get_if<Atom>(&lit)) {
      out.insert(a->predicate);
    } else {
      const auto& b = std::get<BuiltIn>(lit);
      for (const Expr* e : {&b.lhs, &b.rhs}) {
        // min/max may nest inside arithmetic
        std::vector<const Expr*> stack{e};
        while (!stack.empty()) {
          const Expr* cur = stack.back();
          stack.pop_back();
          if (cur->pattern) out.insert(cur->pattern->predicate);
          for (const auto& o : cur->operands) stack.push_back(&o);
        }
      }
    }
  }
  return out;
}

std::string Fact::to_string() const {
  std::string out = predicate;
  out.push_back('(');
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out.push_back(',');
    out += args[i].to_literal();
  }
  out += ").";
  return out;
}

Atom Fact::to_atom() const {
  Atom a;
  a.predicate = predicate;
  for (const auto& v : args) a.terms.emplace_back(v);
  return a;
}

FactSet::FactSet(std::initializer_list<Fact> facts) {
  for (const auto& f : facts) insert(f);
}

bool FactSet::insert(const std::string& predicate, Tuple args) {
  bool added = relations_[predicate].insert(std::move(args)).second;
  if (added) ++size_;
  return added;
}

std::size_t FactSet::merge(const FactSet& other) {
  std::size_t added = 0;
  for (const auto& [pred, rel] : other.relations_) {
    auto& mine = relations_[pred];
    for (const auto& t : rel) {
      if (mine.insert(t).second) ++added;
    }
  }
  size_ += added;
  return added;
}

bool FactSet::contains(const std::string& predicate, const Tuple& args) const {
  auto it = relations_.find(predicate);
  return it != relations_.end() && it->second.count(args) > 0;
}

const FactSet::Relation& FactSet::relation(const std::string& predicate) const {
  static const Relation empty;
  auto it = relations_.find(predicate);
  return it == relations_.end() ? empty : it->second;
}

bool FactSet::has_predicate(const std::string& predicate) const {
  auto it = relations_.find(predicate);
  return it != relations_.end() && !it->second.empty();
}

std::vector<std::string> FactSet::predicates() const {
  std::vector<std::string> out;
  for (const auto& [pred, rel] : relations_) {
    if (!rel.empty()) out.push_back(pred);
  }
  return out;
}

FactSet FactSet::restricted_to(const std::set<std::string>& predicates) const {
  FactSet out;
  for (const auto& p : predicates) {
    auto it = relations_.find(p);
    if (it == relations_.end() || it->second.empty()) continue;
    out.relations_[p] = it->second;
    out.size_ += it->second.size();
  }
  return out;
}

std::vector<Fact> FactSet::to_vector() const {
  std::vector<Fact> out;
  out.reserve(size_);
  for (const auto& [pred, rel] : relations_) {
    for (const auto& t : rel) out.push_back(Fact{pred, t});
  }
  return out;
}

bool operator==(const FactSet& a, const FactSet& b) {
  if (a.size_ != b.size_) return false;
  auto ia = a.relations_.begin();
  auto ib = b.relations_.begin();
  auto skip = [](auto& it, const auto& m) {
    while (it != m.end() && it->second.empty()) ++it;
  };
  for (;;) {
    skip(ia, a.relations_);
    skip(ib, b.relations_);
    if (ia == a.relations_.end() || ib == b.relations_.end()) {
      return ia == a.relations_.end() && ib == b.relations_.end();
    }
    if (ia->first != ib->first || ia->second != ib->second) return false;
    ++ia;
    ++ib;
  }
}

Atom atom(std::string predicate, std::vector<Term> terms) {
  return Atom{std::move(predicate), std::move(terms), {}};
}

Fact fact(std::string predicate, Tuple args) { return Fact{std::move(predicate), std::move(args)}; }

}  // namespace lila::datalog
