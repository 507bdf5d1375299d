#include "lila/datalog/syntax.hpp"

#include "syntax/clause_parser.hpp"

namespace lila::datalog {

using syntax::ClauseParser;
using syntax::Lexer;
using syntax::Tok;

Program parse_program(std::string_view text) {
  Lexer lex(text);
  ClauseParser p(lex);
  Program prog;
  while (lex.peek().kind != Tok::end) {
    auto c = p.clause();
    if (auto* f = std::get_if<syntax::ParsedFact>(&c)) {
      prog.facts.insert(f->fact);
    } else if (auto* r = std::get_if<Rule>(&c)) {
      prog.rules.push_back(std::move(*r));
    } else {
      prog.queries.push_back(std::get<syntax::ParsedQuery>(c).goal);
    }
  }
  return prog;
}

Rule parse_rule(std::string_view text) {
  Lexer lex(text);
  ClauseParser p(lex);
  auto c = p.clause();
  auto* r = std::get_if<Rule>(&c);
  if (!r) throw Error(make_error("syntax", "expected a rule", {1, 1, 1, 1}));
  p.expect(Tok::end);
  return std::move(*r);
}

Atom parse_atom(std::string_view text) {
  Lexer lex(text);
  ClauseParser p(lex);
  Atom a = p.atom();
  p.accept(Tok::dot);
  p.expect(Tok::end);
  return a;
}

std::string print_facts(const FactSet& facts) {
  std::string out;
  for (const auto& f : facts.to_vector()) {
    out += f.to_string();
    out.push_back('\n');
  }
  return out;
}

std::string print_program(const Program& program) {
  std::string out = print_facts(program.facts);
  for (const auto& r : program.rules) {
    out += r.to_string();
    out.push_back('\n');
  }
  for (const auto& q : program.queries) {
    out += "?-" + q.to_string() + ".\n";
  }
  return out;
}

}  // namespace lila::datalog
