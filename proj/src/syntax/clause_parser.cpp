#include "syntax/clause_parser.hpp"

#include <charconv>

namespace lila::syntax {

using namespace datalog;

namespace {

SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
  return {a.line, a.column, b.end_line, b.end_column};
}

bool is_prefix_builtin(const std::string& name, BuiltInOp& op) {
  if (name == "equals") op = BuiltInOp::equals;
  else if (name == "contains") op = BuiltInOp::contains;
  else if (name == "startswith") op = BuiltInOp::startswith;
  else if (name == "endswith") op = BuiltInOp::endswith;
  else return false;
  return true;
}

}  // namespace

void ClauseParser::unexpected(const Token& tok, std::initializer_list<Tok> expected) {
  std::string msg = "expected ";
  if (expected.size() > 1) msg += "one of ";
  bool first = true;
  for (Tok t : expected) {
    if (!first) msg += ", ";
    msg += tok_name(t);
    first = false;
  }
  msg += " but found ";
  msg += tok.kind == Tok::end ? std::string("end of input")
                              : std::string(tok_name(tok.kind)) +
                                    (tok.text.empty() ? "" : " '" + tok.text + "'");
  throw Error(make_error("syntax", msg, tok.span));
}

Token ClauseParser::expect(Tok kind, std::initializer_list<Tok> alternatives) {
  if (lex_.peek().kind != kind) {
    if (alternatives.size() == 0) {
      unexpected(lex_.peek(), {kind});
    }
    unexpected(lex_.peek(), alternatives);
  }
  return lex_.next();
}

bool ClauseParser::accept(Tok kind) {
  if (lex_.peek().kind != kind) return false;
  lex_.next();
  return true;
}

Value ClauseParser::number(const Token& tok, bool negate) {
  const std::string& s = tok.text;
  if (s.find_first_of(".eE") == std::string::npos) {
    Integer v(s);
    return Value{negate ? Integer(-v) : v};
  }
  double d = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), d);
  if (res.ec != std::errc{}) {
    throw Error(make_error("syntax", "malformed number '" + s + "'", tok.span));
  }
  return Value{negate ? -d : d};
}

Term ClauseParser::term() {
  const Token& t = lex_.peek();
  switch (t.kind) {
    case Tok::ident: return Term::var(lex_.next().text);
    case Tok::string: return Term{Value{lex_.next().text}};
    case Tok::number: {
      Token n = lex_.next();
      return Term{number(n, false)};
    }
    case Tok::minus: {
      lex_.next();
      Token n = expect(Tok::number);
      return Term{number(n, true)};
    }
    default: unexpected(t, {Tok::ident, Tok::string, Tok::number});
  }
}

Atom ClauseParser::atom() {
  Token name = expect(Tok::ident);
  Atom a;
  a.predicate = name.text;
  expect(Tok::lparen);
  if (lex_.peek().kind != Tok::rparen) {
    a.terms.push_back(term());
    while (accept(Tok::comma)) a.terms.push_back(term());
  }
  Token close = expect(Tok::rparen, {Tok::comma, Tok::rparen});
  a.span = join(name.span, close.span);
  return a;
}

Expr ClauseParser::primary() {
  const Token& t = lex_.peek();
  if (t.kind == Tok::ident && (t.text == "min" || t.text == "max") &&
      lex_.peek2().kind == Tok::lparen) {
    Expr::Kind k = t.text == "min" ? Expr::Kind::min : Expr::Kind::max;
    lex_.next();
    lex_.next();
    Atom pattern = atom();
    expect(Tok::rparen);
    return Expr::aggregate(k, std::move(pattern));
  }
  if (t.kind == Tok::lparen) {
    lex_.next();
    Expr e = expr();
    expect(Tok::rparen);
    return e;
  }
  return Expr::of(term());
}

Expr ClauseParser::unary() {
  if (lex_.peek().kind == Tok::minus && lex_.peek2().kind == Tok::number) {
    lex_.next();
    Token n = lex_.next();
    return Expr::of(Term{number(n, true)});
  }
  return primary();
}

Expr ClauseParser::product() {
  Expr lhs = unary();
  for (;;) {
    Tok k = lex_.peek().kind;
    if (k != Tok::star && k != Tok::slash) return lhs;
    lex_.next();
    lhs = Expr::binary(k == Tok::star ? Expr::Kind::mul : Expr::Kind::div, std::move(lhs), unary());
  }
}

Expr ClauseParser::expr() {
  Expr lhs = product();
  for (;;) {
    Tok k = lex_.peek().kind;
    if (k != Tok::plus && k != Tok::minus) return lhs;
    lex_.next();
    lhs = Expr::binary(k == Tok::plus ? Expr::Kind::add : Expr::Kind::sub, std::move(lhs), product());
  }
}

Literal ClauseParser::literal() {
  const Token& t = lex_.peek();
  SourceSpan start = t.span;
  BuiltInOp op{};
  if (t.kind == Tok::ident && lex_.peek2().kind == Tok::lparen && t.text != "min" && t.text != "max") {
    if (is_prefix_builtin(t.text, op)) {
      lex_.next();
      lex_.next();
      BuiltIn b;
      b.op = op;
      b.lhs = expr();
      expect(Tok::comma);
      b.rhs = expr();
      Token close = expect(Tok::rparen);
      b.span = join(start, close.span);
      return b;
    }
    return atom();
  }
  BuiltIn b;
  b.lhs = expr();
  const Token& o = lex_.peek();
  switch (o.kind) {
    case Tok::lt: b.op = BuiltInOp::lt; break;
    case Tok::gt: b.op = BuiltInOp::gt; break;
    case Tok::le: b.op = BuiltInOp::le; break;
    case Tok::ge: b.op = BuiltInOp::ge; break;
    case Tok::eq: b.op = BuiltInOp::eq; break;
    case Tok::assign: b.op = BuiltInOp::assign; break;
    default:
      unexpected(o, {Tok::lt, Tok::gt, Tok::le, Tok::ge, Tok::eq, Tok::assign});
  }
  lex_.next();
  b.rhs = expr();
  b.span = join(start, lex_.last_span());
  return b;
}

Clause ClauseParser::clause() {
  const Token& first = lex_.peek();
  if (first.kind == Tok::query) {
    lex_.next();
    ParsedQuery q{atom()};
    expect(Tok::dot);
    return q;
  }
  Atom head = atom();
  if (accept(Tok::if_)) {
    Rule r;
    r.head = std::move(head);
    r.body.push_back(literal());
    while (accept(Tok::comma)) r.body.push_back(literal());
    Token dot = expect(Tok::dot, {Tok::comma, Tok::dot});
    r.span = join(r.head.span, dot.span);
    return r;
  }
  Token dot = expect(Tok::dot, {Tok::if_, Tok::dot});
  if (!head.is_ground()) {
    throw Error(make_error("non-ground-fact",
                           "fact " + head.to_string() + " contains variables; facts must be ground",
                           head.span));
  }
  ParsedFact f;
  f.fact.predicate = head.predicate;
  for (const auto& term : head.terms) f.fact.args.push_back(term.constant());
  f.span = join(head.span, dot.span);
  return f;
}

}  // namespace lila::syntax
