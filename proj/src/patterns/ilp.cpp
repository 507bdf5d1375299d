#include "lila/patterns/ilp.hpp"

#include <algorithm>
#include <set>

namespace lila::patterns {

using datalog::Program;
using datalog::Value;

namespace {

FactSet answers(const Message& message, const std::vector<Rule>& rules, const Atom& goal) {
  Program p;
  p.rules = message.body.rules;
  p.rules.insert(p.rules.end(), rules.begin(), rules.end());
  p.facts = cdm::evaluation_facts(message, p.rules);
  return datalog::select(datalog::evaluate(p), goal);
}

std::string channel_list(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
  return out.empty() ? "(none)" : out;
}

Atom rename_atom(Atom a, const std::string& suffix) {
  a.predicate = suffixed(a.predicate, suffix);
  return a;
}

datalog::Expr rename_expr(datalog::Expr e, const std::string& suffix) {
  if (e.pattern) e.pattern = rename_atom(*e.pattern, suffix);
  for (auto& o : e.operands) o = rename_expr(std::move(o), suffix);
  return e;
}

}  // namespace

ChannelFacts ilp_rc(const Message& message, const RoutingCondition& conds) {
  ChannelFacts out;
  for (const auto& ch : conds.channels) {
    try {
      out.emplace_back(ch.id, answers(message, ch.condition.rules, ch.condition.goal));
    } catch (const datalog::EvaluationError& e) {
      auto d = e.diagnostic();
      d.message = "channel " + ch.id + ": " + d.message;
      throw datalog::EvaluationError(d);
    }
  }
  return out;
}

std::vector<std::pair<std::string, bool>> help_rc(const ChannelFacts& per_channel) {
  std::vector<std::pair<std::string, bool>> out;
  for (const auto& [id, facts] : per_channel) out.emplace_back(id, !facts.empty());
  return out;
}

std::string content_based_route(const Message& message, const RoutingCondition& conds) {
  std::vector<std::string> taken;
  for (const auto& [id, ok] : help_rc(ilp_rc(message, conds))) {
    if (ok) taken.push_back(id);
  }
  if (taken.size() != 1) {
    throw ExclusivityViolation(make_error(
        "exclusivity", "exactly one channel must accept the message, accepting: " + channel_list(taken)));
  }
  return taken.front();
}

std::optional<Message> message_filter(const Message& message, const Condition& cond) {
  if (answers(message, cond.rules, cond.goal).empty()) return std::nullopt;
  return message;
}

std::vector<std::string> rd_ilp(const Message& message, const Rule& rule) {
  if (rule.head.arity() != 1) {
    throw ConfigError(make_error("recipient-list",
                                 "recipient rule head " + rule.head.to_string() + " must be unary",
                                 rule.span));
  }
  Program p;
  p.facts = cdm::evaluation_facts(message, {rule});
  p.rules = {rule};
  std::set<std::string> keys;
  auto derived = datalog::evaluate(p);
  for (const auto& t : derived.relation(rule.head.predicate)) keys.insert(t[0].to_text());
  return {keys.begin(), keys.end()};
}

std::vector<Message> split_raw(const Message& message, const SplitConfig& split) {
  std::vector<Message> out;
  for (const auto& q : split.queries) {
    auto facts = datalog::select(message.body.facts, q);
    if (facts.empty()) continue;
    Message m;
    m.header = message.header;
    m.body.facts = std::move(facts);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<Message> sc_ilp(const Message& message, const SplitConfig& split) {
  auto parts = split_raw(message, split);
  for (auto& m : parts) m = rename_predicates(m, split_suffix);
  return parts;
}

std::vector<bool> crc_ilp(const Message& message, const AggregatorConfig& cfg) {
  std::vector<bool> key;
  for (const auto& q : cfg.correlation) key.push_back(!datalog::select(message.body.facts, q).empty());
  return key;
}

bool cpc_ilp(std::size_t collection_size, const AggregatorConfig& cfg, std::int64_t elapsed_millis) {
  if (cfg.completion_size) return collection_size >= *cfg.completion_size;
  if (cfg.completion_millis) return collection_size > 0 && elapsed_millis >= *cfg.completion_millis;
  return false;
}

bool cpc_ilp(const std::vector<Message>& collection, const AggregatorConfig& cfg,
             std::int64_t elapsed_millis) {
  return cpc_ilp(collection.size(), cfg, elapsed_millis);
}

Message union_raw(const std::vector<Message>& collection, Diagnostics* warnings) {
  if (collection.empty()) {
    throw AggregationError(make_error("aggregation", "cannot aggregate an empty collection"));
  }
  Message out;
  for (const auto& m : collection) {
    auto conflicts = cdm::merge_meta(out.header.meta, m.header.meta);
    if (!conflicts.empty()) {
      throw AggregationError(make_error(
          "aggregation", "messages describe " + conflicts.front() + " with different parameter names"));
    }
    for (const auto& [k, v] : m.header.properties) {
      auto [it, fresh] = out.header.properties.emplace(k, v);
      if (!fresh && it->second != v && warnings) {
        warnings->push_back(make_warning("property-conflict", "property " + k + " keeps '" +
                                                                  it->second + "', ignoring '" + v + "'"));
      }
    }
    out.body.facts.merge(m.body.facts);
    for (const auto& r : m.body.rules) {
      if (std::find(out.body.rules.begin(), out.body.rules.end(), r) == out.body.rules.end()) {
        out.body.rules.push_back(r);
      }
    }
  }
  return out;
}

Message as_ilp(const std::vector<Message>& collection, Diagnostics* warnings) {
  return rename_predicates(union_raw(collection, warnings), aggregate_suffix);
}

std::vector<std::string> head_parameter_names(const std::vector<Rule>& rules,
                                              const std::string& predicate) {
  for (const auto& r : rules) {
    if (r.head.predicate != predicate) continue;
    std::vector<std::string> names;
    std::set<std::string> used;
    for (std::size_t i = 0; i < r.head.terms.size(); ++i) {
      const auto& t = r.head.terms[i];
      std::string name = "arg" + std::to_string(i + 1);
      if (t.is_variable() && !t.variable().anonymous() && !used.count(t.variable().name)) {
        name = t.variable().name;
      }
      used.insert(name);
      names.push_back(name);
    }
    return names;
  }
  return {};
}

Message mt_ilp(const Message& message, const datalog::RuleSet& mapping,
               const std::vector<std::string>& exposed) {
  FactSet all;
  if (message.body.rules.empty()) {
    all = mapping.evaluate(cdm::evaluation_facts(message, mapping.rules()));
  } else {
    auto rules = message.body.rules;
    rules.insert(rules.end(), mapping.rules().begin(), mapping.rules().end());
    all = datalog::RuleSet(rules).evaluate(cdm::evaluation_facts(message, rules));
  }
  Message out;
  out.header.properties = message.header.properties;
  for (const auto& pred : exposed) {
    for (const auto& t : all.relation(pred)) out.body.facts.insert(pred, t);
    auto names = cdm::parameter_names(message.header.meta, pred);
    if (names.empty()) names = head_parameter_names(mapping.rules(), pred);
    cdm::declare(out.header.meta, pred, names);
  }
  return out;
}

Message mt_ilp(const Message& message, const std::vector<Rule>& mapping,
               const std::vector<std::string>& exposed) {
  return mt_ilp(message, datalog::RuleSet(mapping), exposed);
}

Message ep_ilp(const Message& message, const EnrichData& data) {
  Message out = message;
  auto conflicts = cdm::merge_meta(out.header.meta, data.meta);
  if (!conflicts.empty()) {
    throw Error(make_error("enrichment", "enrichment data describes " + conflicts.front() +
                                             " with different parameter names than the message"));
  }
  out.body.facts.merge(data.program.facts);
  for (const auto& r : data.program.rules) {
    if (std::find(out.body.rules.begin(), out.body.rules.end(), r) == out.body.rules.end()) {
      out.body.rules.push_back(r);
    }
  }
  return out;
}

std::string suffixed(const std::string& predicate, const std::string& suffix) {
  return predicate + suffix;
}

Message rename_predicates(const Message& message, const std::string& suffix) {
  Message out;
  out.header.properties = message.header.properties;
  auto rename = [&](const std::string& p) { return suffixed(p, suffix); };
  out.header.meta = cdm::rename_meta(message.header.meta, rename);
  out.body.facts = message.body.facts.renamed(rename);
  for (auto r : message.body.rules) {
    r.head = rename_atom(std::move(r.head), suffix);
    for (auto& lit : r.body) {
      if (auto* a = std::get_if<Atom>(&lit)) {
        *a = rename_atom(std::move(*a), suffix);
      } else {
        auto& b = std::get<datalog::BuiltIn>(lit);
        b.lhs = rename_expr(std::move(b.lhs), suffix);
        b.rhs = rename_expr(std::move(b.rhs), suffix);
      }
    }
    out.body.rules.push_back(std::move(r));
  }
  for (const auto& q : message.body.queries) out.body.queries.push_back(rename_atom(q, suffix));
  return out;
}

}  // namespace lila::patterns
