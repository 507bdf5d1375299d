#include "syntax/lexer.hpp"

#include <cctype>

namespace lila::syntax {

std::string_view tok_name(Tok t) {
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::string: return "string";
    case Tok::number: return "number";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::comma: return "','";
    case Tok::dot: return "'.'";
    case Tok::if_: return "':-'";
    case Tok::query: return "'?-'";
    case Tok::assign: return "':='";
    case Tok::lt: return "'<'";
    case Tok::gt: return "'>'";
    case Tok::le: return "'<='";
    case Tok::ge: return "'>='";
    case Tok::eq: return "'='";
    case Tok::plus: return "'+'";
    case Tok::minus: return "'-'";
    case Tok::star: return "'*'";
    case Tok::slash: return "'/'";
    case Tok::at: return "'@'";
    case Tok::end: return "end of input";
  }
  return "?";
}

const Token& Lexer::peek() {
  if (buffer_.empty()) buffer_.push_back(scan());
  return buffer_.front();
}

const Token& Lexer::peek2() {
  while (buffer_.size() < 2) buffer_.push_back(scan());
  return buffer_[1];
}

Token Lexer::next() {
  Token t;
  if (buffer_.empty()) {
    t = scan();
  } else {
    t = std::move(buffer_.front());
    buffer_.pop_front();
  }
  last_ = t.span;
  return t;
}

void Lexer::advance() {
  if (cur() == '\n') {
    ++line_;
    col_ = 1;
  } else {
    ++col_;
  }
  ++pos_;
}

void Lexer::fail(const std::string& msg) const {
  throw Error(make_error("syntax", msg, {line_, col_, line_, col_}));
}

void Lexer::skip_space() {
  for (;;) {
    char c = cur();
    if (c == '%') {
      while (cur() != '\n' && cur() != '\0') advance();
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
    } else {
      return;
    }
  }
}

namespace {
bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
}  // namespace

Token Lexer::scan() {
  skip_space();
  Token t;
  t.span.line = line_;
  t.span.column = col_;
  auto finish = [&](Tok k, std::size_t len) {
    for (std::size_t i = 0; i + 1 < len; ++i) advance();
    t.span.end_line = line_;
    t.span.end_column = col_;
    advance();
    t.kind = k;
    return t;
  };

  char c = cur();
  if (c == '\0') {
    t.kind = Tok::end;
    t.span.end_line = line_;
    t.span.end_column = col_;
    return t;
  }
  if (ident_start(c)) {
    std::size_t start = pos_;
    std::size_t len = 1;
    for (;;) {
      char n = at(len);
      if (ident_char(n)) {
        ++len;
      } else if (n == '-' && std::isalpha(static_cast<unsigned char>(at(len + 1)))) {
        len += 2;
      } else {
        break;
      }
    }
    t.text = std::string(src_.substr(start, len));
    return finish(Tok::ident, len);
  }
  if (digit(c)) {
    std::size_t len = 0;
    while (digit(at(len))) ++len;
    if (at(len) == '.' && digit(at(len + 1))) {
      ++len;
      while (digit(at(len))) ++len;
    }
    if ((at(len) == 'e' || at(len) == 'E') &&
        (digit(at(len + 1)) || ((at(len + 1) == '+' || at(len + 1) == '-') && digit(at(len + 2))))) {
      len += 2;
      while (digit(at(len))) ++len;
    }
    t.text = std::string(src_.substr(pos_, len));
    return finish(Tok::number, len);
  }
  if (c == '"') {
    advance();
    std::string body;
    for (;;) {
      char s = cur();
      if (s == '\0' || s == '\n') fail("unterminated string literal");
      if (s == '"') break;
      if (s == '\\') {
        advance();
        switch (cur()) {
          case 'n': body.push_back('\n'); break;
          case 't': body.push_back('\t'); break;
          case 'r': body.push_back('\r'); break;
          case '"': body.push_back('"'); break;
          case '\\': body.push_back('\\'); break;
          default: fail(std::string("unknown escape '\\") + cur() + "'");
        }
        advance();
        continue;
      }
      body.push_back(s);
      advance();
    }
    t.text = std::move(body);
    t.span.end_line = line_;
    t.span.end_column = col_;
    advance();
    t.kind = Tok::string;
    return t;
  }
  switch (c) {
    case '(': return finish(Tok::lparen, 1);
    case ')': return finish(Tok::rparen, 1);
    case '{': return finish(Tok::lbrace, 1);
    case '}': return finish(Tok::rbrace, 1);
    case ',': return finish(Tok::comma, 1);
    case '.': return finish(Tok::dot, 1);
    case '+': return finish(Tok::plus, 1);
    case '-': return finish(Tok::minus, 1);
    case '*': return finish(Tok::star, 1);
    case '/': return finish(Tok::slash, 1);
    case '@': return finish(Tok::at, 1);
    case '=': return finish(Tok::eq, 1);
    case '<': return at(1) == '=' ? finish(Tok::le, 2) : finish(Tok::lt, 1);
    case '>': return at(1) == '=' ? finish(Tok::ge, 2) : finish(Tok::gt, 1);
    case ':':
      if (at(1) == '-') return finish(Tok::if_, 2);
      if (at(1) == '=') return finish(Tok::assign, 2);
      break;
    case '?':
      if (at(1) == '-') return finish(Tok::query, 2);
      break;
    default: break;
  }
  fail(std::string("unexpected character '") + c + "'");
}

Token Lexer::raw_until(char close) {
  // Only valid when nothing has been buffered past the opening delimiter.
  buffer_.clear();
  while (cur() == ' ' || cur() == '\t' || cur() == '\r' || cur() == '\n') advance();
  Token t;
  t.kind = Tok::ident;
  t.span.line = line_;
  t.span.column = col_;
  std::string text;
  std::size_t end_line = line_;
  std::size_t end_col = col_;
  int depth = 0;
  for (;;) {
    char c = cur();
    if (c == '\0') fail(std::string("unterminated annotation head, expected '") + close + "'");
    if (depth == 0 && (c == ',' || c == close)) break;
    if (c == '(' || c == '{') ++depth;
    if ((c == ')' || c == '}') && depth > 0) --depth;
    if (!std::isspace(static_cast<unsigned char>(c))) {
      end_line = line_;
      end_col = col_;
    }
    text.push_back(c);
    advance();
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
  t.text = std::move(text);
  t.span.end_line = end_line;
  t.span.end_column = end_col;
  return t;
}

bool Lexer::brace_group_then_brace() {
  if (!buffer_.empty()) return false;
  std::size_t i = pos_;
  auto ch = [&](std::size_t k) { return k < src_.size() ? src_[k] : '\0'; };
  auto skip = [&] {
    for (;;) {
      if (ch(i) == '%') {
        while (ch(i) != '\n' && ch(i) != '\0') ++i;
      } else if (ch(i) != '\0' && std::isspace(static_cast<unsigned char>(ch(i)))) {
        ++i;
      } else {
        return;
      }
    }
  };
  skip();
  if (ch(i) != '{') return false;
  int depth = 0;
  for (; ch(i) != '\0'; ++i) {
    if (ch(i) == '{') ++depth;
    if (ch(i) == '}' && --depth == 0) break;
  }
  if (ch(i) != '}') return false;
  ++i;
  skip();
  return ch(i) == '{';
}

}  // namespace lila::syntax
