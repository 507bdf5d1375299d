#pragma once

#include <initializer_list>
#include <string>
#include <variant>

#include "lila/datalog/ast.hpp"
#include "syntax/lexer.hpp"

namespace lila::syntax {

struct ParsedFact {
  datalog::Fact fact;
  SourceSpan span;
};
struct ParsedQuery {
  datalog::Atom goal;
};
using Clause = std::variant<ParsedFact, datalog::Rule, ParsedQuery>;

/// Recursive-descent parser for Datalog clauses over a shared Lexer.
class ClauseParser {
 public:
  explicit ClauseParser(Lexer& lex) : lex_(lex) {}

  Clause clause();
  datalog::Atom atom();
  datalog::Term term();
  datalog::Literal literal();
  datalog::Expr expr();

  Token expect(Tok kind, std::initializer_list<Tok> alternatives = {});
  bool accept(Tok kind);
  [[noreturn]] void unexpected(const Token& tok, std::initializer_list<Tok> expected);

  Lexer& lexer() { return lex_; }

 private:
  datalog::Expr product();
  datalog::Expr unary();
  datalog::Expr primary();
  datalog::Value number(const Token& tok, bool negate);

  Lexer& lex_;
};

}  // namespace lila::syntax
