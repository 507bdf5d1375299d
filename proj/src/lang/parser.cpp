#include "lila/lang/program.hpp"

#include "syntax/clause_parser.hpp"
#include "syntax/lexer.hpp"

namespace lila::lang {

using syntax::Tok;

namespace {

SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
  return {a.line, a.column, b.end_line, b.end_column};
}

class LilaParser {
 public:
  explicit LilaParser(std::string_view src) : lex_(src), clauses_(lex_) {}

  LilaProgram run() {
    while (lex_.peek().kind != Tok::end) {
      if (lex_.peek().kind == Tok::at) {
        prog_.annotations.push_back(annotation());
        continue;
      }
      auto c = clauses_.clause();
      if (auto* f = std::get_if<syntax::ParsedFact>(&c)) {
        prog_.fact_spans.emplace(f->fact, f->span);
        prog_.facts.insert(f->fact);
      } else if (auto* r = std::get_if<datalog::Rule>(&c)) {
        prog_.rules.push_back(std::move(*r));
      } else {
        const auto& goal = std::get<syntax::ParsedQuery>(c).goal;
        throw Error(make_error("syntax", "queries belong in @aggregate or @split bodies", goal.span));
      }
    }
    return std::move(prog_);
  }

 private:
  Annotation annotation() {
    Annotation a;
    auto at = lex_.next();
    auto name = lex_.peek();
    if (name.kind != Tok::ident) clauses_.unexpected(name, {Tok::ident});
    lex_.next();
    auto kind = parse_annotation_name(name.text);
    if (!kind) {
      throw Error(make_error("unknown-annotation",
                             "unknown annotation @" + name.text +
                                 ", expected one of @from, @to, @enrich, @aggregate, @split",
                             join(at.span, name.span)));
    }
    a.kind = *kind;

    char close = ')';
    bool brace_head = lex_.brace_group_then_brace();
    if (brace_head) {
      lex_.next();
      close = '}';
    } else if (lex_.peek().kind == Tok::lparen) {
      lex_.next();
    } else {
      close = 0;
    }
    if (close) {
      for (;;) {
        auto p = lex_.raw_until(close);
        auto sep = lex_.next();
        if (p.text.empty()) {
          if (a.params.empty() && sep.kind != Tok::comma) break;
          throw Error(make_error("syntax", "empty annotation parameter", sep.span));
        }
        a.params.push_back(p.text);
        a.param_spans.push_back(p.span);
        if (sep.kind == Tok::comma) continue;
        break;
      }
    }
    a.span = join(at.span, lex_.last_span());
    if (brace_head) {
      prog_.warnings.push_back(make_warning(
          "brace-head", "annotation head written with braces, read as " + a.head(), a.span));
    }

    if (lex_.peek().kind != Tok::lbrace) {
      a.has_body = false;
      return a;
    }
    lex_.next();
    switch (a.kind) {
      case AnnotationKind::from:
      case AnnotationKind::enrich:
        while (lex_.peek().kind != Tok::rbrace) {
          a.relations.push_back(clauses_.atom());
          clauses_.expect(Tok::dot);
        }
        break;
      case AnnotationKind::to:
        while (lex_.peek().kind != Tok::rbrace) {
          auto t = clauses_.expect(Tok::ident, {Tok::ident, Tok::rbrace});
          a.exposed.push_back(t.text);
          a.exposed_spans.push_back(t.span);
          clauses_.accept(Tok::comma);
        }
        break;
      case AnnotationKind::aggregate:
      case AnnotationKind::split:
        while (lex_.peek().kind != Tok::rbrace) {
          clauses_.expect(Tok::query, {Tok::query, Tok::rbrace});
          a.queries.push_back(clauses_.atom());
          clauses_.expect(Tok::dot);
        }
        break;
    }
    lex_.next();
    return a;
  }

  syntax::Lexer lex_;
  syntax::ClauseParser clauses_;
  LilaProgram prog_;
};

struct HeadArity {
  std::size_t min;
  std::size_t max;
  const char* shape;
};

HeadArity head_arity(AnnotationKind k) {
  switch (k) {
    case AnnotationKind::from: return {2, 2, "(location,format)"};
    case AnnotationKind::to: return {1, 2, "(producerURI[,format])"};
    case AnnotationKind::enrich: return {2, 2, "(filename,format)"};
    case AnnotationKind::aggregate: return {2, 2, "(strategy,completion)"};
    case AnnotationKind::split: return {0, 0, "()"};
  }
  return {0, 0, ""};
}

}  // namespace

LilaProgram parse_syntax(std::string_view source) { return LilaParser(source).run(); }

LilaProgram parse(std::string_view source) {
  auto prog = parse_syntax(source);
  for (const auto& a : prog.annotations) {
    auto ar = head_arity(a.kind);
    if (a.params.size() < ar.min || a.params.size() > ar.max) {
      throw Error(make_error("annotation-arity",
                             "@" + std::string(annotation_name(a.kind)) + " takes " + ar.shape +
                                 " but has " + std::to_string(a.params.size()) + " parameter(s)",
                             a.span));
    }
  }
  return prog;
}

}  // namespace lila::lang
