#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lila/cdm/convert.hpp"
#include "lila/cdm/message.hpp"
#include "lila/datalog/ast.hpp"
#include "lila/diagnostics.hpp"

namespace lila::lang {

enum class AnnotationKind { from, to, enrich, aggregate, split };

std::string_view annotation_name(AnnotationKind k);
std::optional<AnnotationKind> parse_annotation_name(std::string_view name);

/// `@name(param,...) { body }`. Which body member is filled depends on the kind:
/// relations for from/enrich, exposed predicate names for to, queries for
/// aggregate/split.
struct Annotation {
  AnnotationKind kind = AnnotationKind::from;
  std::vector<std::string> params;
  std::vector<SourceSpan> param_spans;
  std::vector<datalog::Atom> relations;
  std::vector<std::string> exposed;
  std::vector<SourceSpan> exposed_spans;
  std::vector<datalog::Atom> queries;
  bool has_body = true;
  SourceSpan span;  // the `@name(...)` head

  /// First head parameter (URI / file name / strategy), empty if none.
  const std::string& location() const;
  /// `@from(file:x.json,json)` as written after normalization.
  std::string head() const;
  std::string to_string() const;

  /// Structural equality; spans ignored.
  friend bool operator==(const Annotation& a, const Annotation& b) {
    return a.kind == b.kind && a.params == b.params && a.relations == b.relations &&
           a.exposed == b.exposed && a.queries == b.queries && a.has_body == b.has_body;
  }
};

struct LilaProgram {
  std::vector<Annotation> annotations;
  std::vector<datalog::Rule> rules;
  datalog::FactSet facts;
  std::map<datalog::Fact, SourceSpan> fact_spans;
  Diagnostics warnings;  // style warnings collected while parsing

  std::vector<const Annotation*> annotations_of(AnnotationKind k) const;

  friend bool operator==(const LilaProgram& a, const LilaProgram& b) {
    return a.annotations == b.annotations && a.rules == b.rules && a.facts == b.facts;
  }
};

/// Grammar only: any head parameter count is accepted.
LilaProgram parse_syntax(std::string_view source);
/// parse_syntax plus head-arity checks per annotation kind
/// (from 2, to 1-2, enrich 2, aggregate 2, split 0). Throws lila::Error.
LilaProgram parse(std::string_view source);

/// Source text that parses back to a structurally equal program.
std::string print(const LilaProgram& program);

/// `$name` placeholders of all head parameters, sorted, without the `$`.
std::vector<std::string> placeholders(const LilaProgram& program);
/// Substitutes `$name` in head parameters; throws Error "unbound-placeholder".
LilaProgram resolve_config(LilaProgram program, const std::map<std::string, std::string>& bindings);

/// Meta-facts for every relation declared by @from/@enrich (and their
/// -aggregate/-split variants) plus rule heads not otherwise declared.
cdm::MetaFacts declared_meta(const LilaProgram& program);

/// Rules with head variables resolved by parameter name against
/// declared_meta (see cdm::bind_named_parameters).
LilaProgram normalize(LilaProgram program);

Diagnostics validate_program(const LilaProgram& program);

/// Payload format of an endpoint annotation: the second head parameter, else
/// the URI suffix (.json, .csv), else datalog.
cdm::Format endpoint_format(const Annotation& a);
cdm::FormatSpec format_spec(const Annotation& a);

struct AggregateSettings {
  std::string strategy;
  std::optional<std::size_t> completion_size;
  std::optional<std::int64_t> completion_millis;
};

/// Reads `@aggregate(union,completionSize=5)` / `completionTime=3` (seconds).
/// Throws Error "annotation" on anything else.
AggregateSettings aggregate_settings(const Annotation& a);

}  // namespace lila::lang
