#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <deque>

#include "lila/diagnostics.hpp"

namespace lila::syntax {

enum class Tok {
  ident,
  string,
  number,
  lparen,
  rparen,
  lbrace,
  rbrace,
  comma,
  dot,
  if_,      // :-
  query,    // ?-
  assign,   // :=
  lt,
  gt,
  le,
  ge,
  eq,
  plus,
  minus,
  star,
  slash,
  at,
  end,
};

std::string_view tok_name(Tok t);

struct Token {
  Tok kind = Tok::end;
  std::string text;  // identifier name, unescaped string body, or number spelling
  SourceSpan span;
};

/// Pull lexer. Identifiers are `[A-Za-z_][A-Za-z0-9_]*` where a `-` continues
/// the identifier when directly followed by a letter (`match-filtered`,
/// `a-split`), so `x - 1` and `x-1` both lex as a subtraction.
class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  const Token& peek();
  const Token& peek2();
  Token next();

  /// Raw annotation-head parameter: text up to an unnested `,` or `close`,
  /// trimmed. Comments are not recognised inside.
  Token raw_until(char close);

  /// True when the input continues with a brace group followed by another
  /// `{`, i.e. `{head}{body}`. Looks ahead without consuming.
  bool brace_group_then_brace();

  /// Span of the most recently consumed token.
  const SourceSpan& last_span() const { return last_; }

  std::size_t line() const { return line_; }
  std::size_t column() const { return col_; }

 private:
  Token scan();
  void skip_space();
  char cur() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  char at(std::size_t off) const { return pos_ + off < src_.size() ? src_[pos_ + off] : '\0'; }
  void advance();
  [[noreturn]] void fail(const std::string& msg) const;

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  SourceSpan last_;
  std::deque<Token> buffer_;  // deque: peek references survive peek2
};

}  // namespace lila::syntax
