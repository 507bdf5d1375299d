#include "lila/cdm/convert.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include <json.hpp>

#include "cdm/csv.hpp"
#include "lila/datalog/syntax.hpp"

namespace lila::cdm {

using datalog::Atom;
using datalog::Integer;
using datalog::Tuple;
using datalog::Value;

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw ConversionError(make_error("conversion", msg));
}

std::vector<std::string> names_of(const Atom& relation) {
  std::vector<std::string> out;
  for (const auto& t : relation.terms) {
    if (!t.is_variable()) {
      fail("declared relation " + relation.to_string() + " must list parameter names");
    }
    out.push_back(t.variable().name);
  }
  return out;
}

Header declared_header(const FormatSpec& spec) {
  Header h;
  for (const auto& r : spec.relations) declare(h.meta, r.predicate, names_of(r));
  return h;
}

using Record = std::map<std::string, Value>;

// Adds one fact per declared relation whose parameters the record covers.
void add_record(const Record& rec, std::size_t index, const FormatSpec& spec, Message& msg) {
  bool used = false;
  for (const auto& rel : spec.relations) {
    Tuple t;
    std::string missing;
    for (const auto& name : names_of(rel)) {
      auto it = rec.find(name);
      if (it == rec.end()) {
        missing = name;
        break;
      }
      t.push_back(it->second);
    }
    if (!missing.empty()) {
      if (spec.relations.size() == 1) {
        fail("record " + std::to_string(index + 1) + " lacks key '" + missing + "' declared by " +
             rel.to_string());
      }
      continue;
    }
    msg.body.facts.insert(rel.predicate, std::move(t));
    used = true;
  }
  if (!used && !spec.relations.empty()) {
    fail("record " + std::to_string(index + 1) + " matches none of the declared relations");
  }
}

Value json_value(const nlohmann::json& v, const std::string& key, std::size_t index) {
  using nlohmann::json;
  switch (v.type()) {
    case json::value_t::string: return Value{v.get<std::string>()};
    case json::value_t::number_integer: return Value{Integer{v.get<std::int64_t>()}};
    case json::value_t::number_unsigned: return Value{Integer{v.get<std::uint64_t>()}};
    case json::value_t::number_float: return Value{v.get<double>()};
    case json::value_t::boolean: return Value{v.get<bool>() ? "true" : "false"};
    case json::value_t::null:
      fail("record " + std::to_string(index + 1) + " has null value for '" + key + "'");
    default:
      fail("record " + std::to_string(index + 1) + " has nested value for '" + key +
           "'; only flat objects are supported");
  }
}

Message json_to_cdm(std::string_view payload, const FormatSpec& spec) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(payload.begin(), payload.end());
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  Message msg;
  msg.header = declared_header(spec);
  if (doc.is_object()) doc = nlohmann::json::array({doc});
  if (!doc.is_array()) fail("JSON payload must be an array of objects");
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    if (!item.is_object()) fail("JSON record " + std::to_string(i + 1) + " is not an object");
    Record rec;
    for (auto it = item.begin(); it != item.end(); ++it) {
      rec.emplace(it.key(), json_value(it.value(), it.key(), i));
    }
    add_record(rec, i, spec, msg);
  }
  return msg;
}

bool is_integer_text(std::string_view s) {
  std::size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

bool is_decimal_text(std::string_view s) {
  std::size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  if (digits == 0) return false;
  bool fraction = false;
  bool exponent = false;
  if (i < s.size() && s[i] == '.') {
    ++i;
    std::size_t f = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++f;
    if (f == 0) return false;
    fraction = true;
  }
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t e = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++e;
    if (e == 0) return false;
    exponent = true;
  }
  return i == s.size() && (fraction || exponent);
}

Value csv_value(const CsvCell& cell) {
  if (!cell.quoted) {
    if (is_integer_text(cell.text)) return Value{Integer{cell.text}};
    if (is_decimal_text(cell.text)) return Value{std::stod(cell.text)};
  }
  return Value{cell.text};
}

Message csv_to_cdm(std::string_view payload, const FormatSpec& spec) {
  Message msg;
  msg.header = declared_header(spec);
  std::vector<std::vector<CsvCell>> rows;
  try {
    rows = read_csv(payload);
  } catch (const CsvError& e) {
    fail(std::string("malformed CSV: ") + e.what());
  }
  std::vector<std::string> columns;
  std::size_t record = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.empty()) {  // blank line: next row is a header again
      columns.clear();
      continue;
    }
    if (columns.empty()) {
      for (const auto& c : row) columns.push_back(c.text);
      continue;
    }
    if (row.size() != columns.size()) {
      fail("CSV row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
           " cells, header has " + std::to_string(columns.size()));
    }
    Record rec;
    for (std::size_t i = 0; i < row.size(); ++i) rec.emplace(columns[i], csv_value(row[i]));
    add_record(rec, record++, spec, msg);
  }
  return msg;
}

Message datalog_to_cdm(std::string_view payload) {
  Message msg;
  try {
    msg.body = datalog::parse_program(payload);
  } catch (const Error& e) {
    throw ConversionError(e.diagnostic());
  }
  msg.header.meta = lift_meta(msg.body.facts);
  return msg;
}

std::vector<std::string> exposed_names(const Message& m, const std::string& pred) {
  auto names = parameter_names(m.header.meta, pred);
  if (names.empty()) {
    fail("no meta-facts describe exposed predicate " + pred + "; parameter names are unknown");
  }
  return names;
}

std::string json_scalar(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::integer: return v.as_integer().str();
    case Value::Kind::decimal: {
      double d = v.as_decimal();
      if (std::isnan(d) || std::isinf(d)) return "null";
      return datalog::format_decimal(d);
    }
    case Value::Kind::string: return nlohmann::json(v.as_string()).dump();
  }
  return "null";
}

std::string json_from_cdm(const Message& m, const std::vector<std::string>& exposed) {
  std::string out = "[";
  bool first = true;
  for (const auto& pred : exposed) {
    auto names = exposed_names(m, pred);
    for (const auto& t : m.body.facts.relation(pred)) {
      if (t.size() != names.size()) {
        fail("fact of " + pred + " has " + std::to_string(t.size()) + " arguments but " +
             std::to_string(names.size()) + " parameter names");
      }
      if (!first) out.push_back(',');
      first = false;
      out.push_back('{');
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out.push_back(',');
        out += nlohmann::json(names[i]).dump();
        out.push_back(':');
        out += json_scalar(t[i]);
      }
      out.push_back('}');
    }
  }
  out.push_back(']');
  return out;
}

std::string csv_cell_text(const Value& v) {
  if (v.is_numeric()) return v.to_literal();
  const std::string& s = v.as_string();
  // Quote whenever reading back unquoted would change the value.
  bool quote = s.empty() || is_integer_text(s) || is_decimal_text(s) ||
               s.find_first_of(",\"\r\n") != std::string::npos || std::isspace(static_cast<unsigned char>(s.front())) ||
               std::isspace(static_cast<unsigned char>(s.back()));
  return quote ? csv_quote(s) : s;
}

std::string csv_from_cdm(const Message& m, const std::vector<std::string>& exposed) {
  std::string out;
  bool first_block = true;
  for (const auto& pred : exposed) {
    auto names = exposed_names(m, pred);
    if (!first_block) out += "\r\n";
    first_block = false;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) out.push_back(',');
      out += csv_cell_text(Value{names[i]});
    }
    out += "\r\n";
    for (const auto& t : m.body.facts.relation(pred)) {
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_cell_text(t[i]);
      }
      out += "\r\n";
    }
  }
  return out;
}

std::string datalog_from_cdm(const Message& m, const std::vector<std::string>& exposed) {
  std::set<std::string> preds(exposed.begin(), exposed.end());
  MetaFacts meta;
  for (const auto& mf : m.header.meta) {
    if (preds.count(mf.predicate)) meta.insert(mf);
  }
  std::string out = datalog::print_facts(meta_facts(meta));
  for (const auto& pred : exposed) {
    for (const auto& t : m.body.facts.relation(pred)) {
      out += datalog::Fact{pred, t}.to_string();
      out.push_back('\n');
    }
  }
  return out;
}

}  // namespace

std::string_view format_name(Format f) {
  switch (f) {
    case Format::json: return "json";
    case Format::csv: return "csv";
    case Format::datalog: return "datalog";
  }
  return "?";
}

std::optional<Format> parse_format(std::string_view name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "json") return Format::json;
  if (lower == "csv") return Format::csv;
  if (lower == "datalog") return Format::datalog;
  return std::nullopt;
}

Message to_cdm(std::string_view payload, const FormatSpec& spec) {
  switch (spec.format) {
    case Format::json: return json_to_cdm(payload, spec);
    case Format::csv: return csv_to_cdm(payload, spec);
    case Format::datalog: return datalog_to_cdm(payload);
  }
  fail("unknown format");
}

std::string from_cdm(const Message& message, const FormatSpec& spec,
                     const std::vector<std::string>& exposed) {
  switch (spec.format) {
    case Format::json: return json_from_cdm(message, exposed);
    case Format::csv: return csv_from_cdm(message, exposed);
    case Format::datalog: return datalog_from_cdm(message, exposed);
  }
  fail("unknown format");
}

datalog::Rule project_by_name(const Message& message, const std::string& predicate,
                              const std::vector<std::string>& names,
                              const std::string& head_predicate) {
  auto available = parameter_names(message.header.meta, predicate);
  datalog::Rule rule;
  rule.head.predicate = head_predicate.empty() ? predicate + "-projection" : head_predicate;
  Atom body;
  body.predicate = predicate;
  body.terms.assign(available.size(), datalog::Term::var("_"));
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto it = std::find(available.begin(), available.end(), names[i]);
    if (it == available.end()) {
      std::string list;
      for (const auto& a : available) list += (list.empty() ? "" : ", ") + a;
      throw Error(make_error("unknown-parameter", "predicate " + predicate + " has no parameter '" +
                                                      names[i] + "'; available: " +
                                                      (list.empty() ? "(none)" : list)));
    }
    auto pos = static_cast<std::size_t>(it - available.begin());
    if (body.terms[pos].variable().anonymous()) {
      body.terms[pos] = datalog::Term::var("x" + std::to_string(i + 1));
    }
    rule.head.terms.push_back(body.terms[pos]);
  }
  rule.body.emplace_back(std::move(body));
  return rule;
}

}  // namespace lila::cdm
