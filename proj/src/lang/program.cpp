#include "lila/lang/program.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "lila/datalog/validate.hpp"

namespace lila::lang {

namespace {

const std::string kEmpty;

bool placeholder_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

/// Calls fn(name, begin, end) for every `$name` in text.
template <typename Fn>
void scan_placeholders(const std::string& text, Fn&& fn) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '$') continue;
    std::size_t j = i + 1;
    while (j < text.size() && placeholder_char(text[j])) ++j;
    if (j > i + 1) fn(text.substr(i + 1, j - i - 1), i, j);
    i = j - 1;
  }
}

bool ends_with_ci(const std::string& s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  for (std::size_t i = 0; i < suffix.size(); ++i) {
    auto c = std::tolower(static_cast<unsigned char>(s[s.size() - suffix.size() + i]));
    if (c != suffix[i]) return false;
  }
  return true;
}

std::vector<std::string> variable_names(const datalog::Atom& a) {
  std::vector<std::string> names;
  for (const auto& t : a.terms) names.push_back(t.is_variable() ? t.variable().name : t.to_string());
  return names;
}

std::string suffix_for(AnnotationKind k) { return k == AnnotationKind::aggregate ? "-aggregate" : "-split"; }

}  // namespace

std::string_view annotation_name(AnnotationKind k) {
  switch (k) {
    case AnnotationKind::from: return "from";
    case AnnotationKind::to: return "to";
    case AnnotationKind::enrich: return "enrich";
    case AnnotationKind::aggregate: return "aggregate";
    case AnnotationKind::split: return "split";
  }
  return "?";
}

std::optional<AnnotationKind> parse_annotation_name(std::string_view name) {
  for (auto k : {AnnotationKind::from, AnnotationKind::to, AnnotationKind::enrich, AnnotationKind::aggregate,
                 AnnotationKind::split}) {
    if (annotation_name(k) == name) return k;
  }
  return std::nullopt;
}

const std::string& Annotation::location() const { return params.empty() ? kEmpty : params.front(); }

std::string Annotation::head() const {
  std::string out = "@" + std::string(annotation_name(kind)) + "(";
  for (std::size_t i = 0; i < params.size(); ++i) out += (i ? "," : "") + params[i];
  return out + ")";
}

std::string Annotation::to_string() const {
  std::string out = head();
  if (!has_body) return out;
  out += "\n{";
  switch (kind) {
    case AnnotationKind::from:
    case AnnotationKind::enrich:
      for (std::size_t i = 0; i < relations.size(); ++i) out += (i ? " " : "") + relations[i].to_string() + ".";
      break;
    case AnnotationKind::to:
      for (std::size_t i = 0; i < exposed.size(); ++i) out += (i ? "\n " : "") + exposed[i];
      break;
    case AnnotationKind::aggregate:
    case AnnotationKind::split:
      for (std::size_t i = 0; i < queries.size(); ++i) out += (i ? " " : "") + ("?-" + queries[i].to_string() + ".");
      break;
  }
  return out + "}";
}

std::vector<const Annotation*> LilaProgram::annotations_of(AnnotationKind k) const {
  std::vector<const Annotation*> out;
  for (const auto& a : annotations) {
    if (a.kind == k) out.push_back(&a);
  }
  return out;
}

std::string print(const LilaProgram& program) {
  std::string out;
  for (const auto& a : program.annotations) out += a.to_string() + "\n\n";
  for (const auto& f : program.facts.to_vector()) out += f.to_string() + "\n";
  if (!program.facts.empty()) out += "\n";
  for (const auto& r : program.rules) out += r.to_string() + "\n";
  while (!out.empty() && out.back() == '\n') out.pop_back();
  return out.empty() ? out : out + "\n";
}

std::vector<std::string> placeholders(const LilaProgram& program) {
  std::set<std::string> names;
  for (const auto& a : program.annotations) {
    for (const auto& p : a.params) scan_placeholders(p, [&](const std::string& n, auto, auto) { names.insert(n); });
  }
  return {names.begin(), names.end()};
}

LilaProgram resolve_config(LilaProgram program, const std::map<std::string, std::string>& bindings) {
  for (auto& a : program.annotations) {
    for (std::size_t i = 0; i < a.params.size(); ++i) {
      std::string out;
      std::size_t last = 0;
      const std::string& p = a.params[i];
      scan_placeholders(p, [&](const std::string& name, std::size_t b, std::size_t e) {
        auto it = bindings.find(name);
        if (it == bindings.end()) {
          throw Error(make_error("unbound-placeholder",
                                 "no binding for $" + name + " in " + a.head() + " (use --bind " + name + "=...)",
                                 i < a.param_spans.size() ? a.param_spans[i] : a.span));
        }
        out += p.substr(last, b - last) + it->second;
        last = e;
      });
      a.params[i] = out + p.substr(last);
    }
  }
  return program;
}

cdm::MetaFacts declared_meta(const LilaProgram& program) {
  cdm::MetaFacts meta;
  auto add = [&](const std::string& pred, const std::vector<std::string>& names) {
    if (cdm::parameter_names(meta, pred).empty()) cdm::declare(meta, pred, names);
  };
  for (const auto& a : program.annotations) {
    for (const auto& r : a.relations) add(r.predicate, variable_names(r));
  }
  // Heads name their own parameters unless declared.
  for (const auto& r : program.rules) {
    std::vector<std::string> names;
    std::set<std::string> used;
    for (std::size_t i = 0; i < r.head.terms.size(); ++i) {
      const auto& t = r.head.terms[i];
      std::string n = "arg" + std::to_string(i + 1);
      if (t.is_variable() && !t.variable().anonymous() && !used.count(t.variable().name)) n = t.variable().name;
      used.insert(n);
      names.push_back(n);
    }
    add(r.head.predicate, names);
  }
  for (const auto& a : program.annotations) {
    if (a.kind != AnnotationKind::aggregate && a.kind != AnnotationKind::split) continue;
    for (const auto& q : a.queries) {
      auto names = cdm::parameter_names(meta, q.predicate);
      if (names.empty()) names = variable_names(q);
      add(q.predicate + suffix_for(a.kind), names);
    }
  }
  return meta;
}

LilaProgram normalize(LilaProgram program) {
  program.rules = cdm::bind_named_parameters(std::move(program.rules), declared_meta(program));
  return program;
}

Diagnostics validate_program(const LilaProgram& input) {
  Diagnostics diags;
  auto program = normalize(input);
  if (program.annotations_of(AnnotationKind::from).empty()) {
    diags.push_back(make_error("missing-source", "program has no @from fact source"));
  }
  if (program.annotations_of(AnnotationKind::to).empty()) {
    diags.push_back(make_error("missing-goal", "program has no @to routing goal"));
  }

  std::set<std::string> produced;
  for (const auto& r : program.rules) produced.insert(r.head.predicate);
  for (const auto& p : program.facts.predicates()) produced.insert(p);

  datalog::Program combined;
  combined.facts = program.facts;
  combined.rules = program.rules;
  for (const auto& a : program.annotations) {
    switch (a.kind) {
      case AnnotationKind::from:
      case AnnotationKind::enrich: {
        if (a.params.size() >= 2 && !cdm::parse_format(a.params[1])) {
          diags.push_back(make_error("unknown-format", "unknown format '" + a.params[1] + "' in " + a.head(),
                                     a.param_spans.size() > 1 ? a.param_spans[1] : a.span));
        }
        if (a.relations.empty()) {
          diags.push_back(make_error("empty-declaration", a.head() + " declares no relations", a.span));
        }
        for (const auto& r : a.relations) {
          produced.insert(r.predicate);
          combined.queries.push_back(r);
          std::set<std::string> seen;
          for (const auto& t : r.terms) {
            if (!t.is_variable() || t.variable().anonymous()) {
              diags.push_back(make_error("declaration", "relation " + r.to_string() +
                                                            " must name each parameter with an identifier",
                                         r.span));
              break;
            }
            if (!seen.insert(t.variable().name).second) {
              diags.push_back(make_error("duplicate-parameter",
                                         "parameter " + t.variable().name + " repeated in " + r.to_string(),
                                         r.span));
            }
          }
        }
        break;
      }
      case AnnotationKind::to:
        if (a.params.size() >= 2 && !cdm::parse_format(a.params[1])) {
          diags.push_back(make_error("unknown-format", "unknown format '" + a.params[1] + "' in " + a.head(),
                                     a.param_spans.size() > 1 ? a.param_spans[1] : a.span));
        }
        if (a.exposed.empty()) {
          diags.push_back(make_error("empty-goal", a.head() + " exposes no predicates", a.span));
        }
        break;
      case AnnotationKind::aggregate:
      case AnnotationKind::split:
        if (a.queries.empty()) {
          diags.push_back(make_error("empty-declaration", a.head() + " has no queries", a.span));
        }
        if (a.kind == AnnotationKind::aggregate) {
          try {
            aggregate_settings(a);
          } catch (const Error& e) {
            diags.push_back(e.diagnostic());
          }
        }
        for (const auto& q : a.queries) {
          combined.queries.push_back(q);
          auto renamed = q;
          renamed.predicate += suffix_for(a.kind);
          combined.queries.push_back(renamed);
          produced.insert(renamed.predicate);
        }
        break;
    }
  }
  for (const auto& a : program.annotations) {
    if (a.kind != AnnotationKind::to) continue;
    for (std::size_t i = 0; i < a.exposed.size(); ++i) {
      if (produced.count(a.exposed[i])) continue;
      diags.push_back(make_error("unreachable-predicate",
                                 a.head() + " exposes " + a.exposed[i] +
                                     ", which no rule, fact or annotation produces",
                                 i < a.exposed_spans.size() ? a.exposed_spans[i] : a.span));
    }
  }
  auto core = datalog::validate(combined);
  diags.insert(diags.end(), core.begin(), core.end());
  return diags;
}

cdm::Format endpoint_format(const Annotation& a) {
  if (a.params.size() >= 2) {
    if (auto f = cdm::parse_format(a.params[1])) return *f;
    throw Error(make_error("unknown-format", "unknown format '" + a.params[1] + "' in " + a.head(), a.span));
  }
  const auto& uri = a.location();
  if (ends_with_ci(uri, ".json")) return cdm::Format::json;
  if (ends_with_ci(uri, ".csv")) return cdm::Format::csv;
  return cdm::Format::datalog;
}

cdm::FormatSpec format_spec(const Annotation& a) { return {endpoint_format(a), a.relations}; }

AggregateSettings aggregate_settings(const Annotation& a) {
  auto bad = [&](const std::string& what) {
    return Error(make_error("annotation", what + " in " + a.head(), a.span));
  };
  if (a.params.size() != 2) throw bad("expected (strategy,completion)");
  AggregateSettings s;
  s.strategy = a.params[0];
  if (s.strategy != "union") throw bad("unknown aggregation strategy '" + s.strategy + "', only union is supported");
  const std::string& c = a.params[1];
  auto eq = c.find('=');
  if (eq == std::string::npos) throw bad("completion must be completionSize=<n> or completionTime=<seconds>");
  std::string key = c.substr(0, eq);
  std::string val = c.substr(eq + 1);
  while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
  while (!val.empty() && std::isspace(static_cast<unsigned char>(val.front()))) val.erase(val.begin());
  if (key == "completionSize") {
    std::size_t n = 0;
    auto r = std::from_chars(val.data(), val.data() + val.size(), n);
    if (r.ec != std::errc{} || r.ptr != val.data() + val.size() || n == 0) {
      throw bad("completionSize must be a positive integer");
    }
    s.completion_size = n;
  } else if (key == "completionTime") {
    double secs = 0;
    auto r = std::from_chars(val.data(), val.data() + val.size(), secs);
    if (r.ec != std::errc{} || r.ptr != val.data() + val.size() || !(secs > 0)) {
      throw bad("completionTime must be a positive number of seconds");
    }
    s.completion_millis = static_cast<std::int64_t>(secs * 1000.0 + 0.5);
  } else {
    throw bad("unknown completion condition '" + key + "'");
  }
  return s;
}

}  // namespace lila::lang
