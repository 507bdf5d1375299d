#include "lila/ldg/ldg.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "lila/datalog/dependency_graph.hpp"

namespace lila::ldg {

using lang::AnnotationKind;

namespace {

const std::string kMeta = "meta";

std::string join(const std::set<std::string>& names, const std::string& sep) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : sep) + n;
  return out;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

bool is_suffixing(NodeKind k) { return k == NodeKind::aggregator || k == NodeKind::splitter; }

std::string suffix_of(NodeKind k) { return k == NodeKind::aggregator ? "-aggregate" : "-split"; }

SourceSpan node_span(const Node& n) {
  if (n.annotation) return n.annotation->span;
  if (!n.rules.empty()) return n.rules.front().span;
  return {};
}

/// Span of the first place `n` reads `pred`.
SourceSpan usage_span(const Node& n, const std::string& pred) {
  for (const auto& r : n.rules) {
    for (const auto& lit : r.body) {
      if (const auto* a = std::get_if<datalog::Atom>(&lit); a && a->predicate == pred) return a->span;
    }
  }
  if (n.annotation) {
    const auto& a = *n.annotation;
    for (std::size_t i = 0; i < a.exposed.size(); ++i) {
      if (a.exposed[i] == pred && i < a.exposed_spans.size()) return a.exposed_spans[i];
    }
    for (const auto& q : a.queries) {
      if (q.predicate == pred) return q.span;
    }
  }
  return node_span(n);
}

Node annotation_node(NodeKind kind, const lang::Annotation& a) {
  Node n;
  n.kind = kind;
  n.annotation = a;
  return n;
}

}  // namespace

std::string_view kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::processor: return "processor";
    case NodeKind::fact_source: return "factSource";
    case NodeKind::routing_goal: return "routingGoal";
    case NodeKind::enricher: return "enricher";
    case NodeKind::aggregator: return "aggregator";
    case NodeKind::splitter: return "splitter";
    case NodeKind::inline_facts: return "inlineFacts";
  }
  return "?";
}

std::string Node::label() const {
  switch (kind) {
    case NodeKind::processor: return join(produced, "+");
    case NodeKind::inline_facts: return join(produced, "+") + " (facts)";
    default: return annotation ? annotation->head() : std::string(kind_name(kind));
  }
}

std::vector<std::size_t> Ldg::successors(std::size_t n) const {
  std::vector<std::size_t> out;
  for (auto it = edges.lower_bound({n, 0}); it != edges.end() && it->first == n; ++it) out.push_back(it->second);
  return out;
}

std::vector<std::size_t> Ldg::predecessors(std::size_t n) const {
  std::vector<std::size_t> out;
  for (const auto& [u, v] : edges) {
    if (v == n) out.push_back(u);
  }
  return out;
}

std::size_t Ldg::in_degree(std::size_t n) const { return predecessors(n).size(); }
std::size_t Ldg::out_degree(std::size_t n) const { return successors(n).size(); }

std::optional<std::vector<std::size_t>> Ldg::topological_order() const {
  std::vector<std::size_t> indeg(nodes.size(), 0);
  for (const auto& e : edges) ++indeg[e.second];
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (indeg[i] == 0) ready.insert(i);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    auto n = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(n);
    for (auto s : successors(n)) {
      if (--indeg[s] == 0) ready.insert(s);
    }
  }
  if (order.size() != nodes.size()) return std::nullopt;
  return order;
}

std::optional<std::size_t> Ldg::find(const std::string& label) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].label() == label) return i;
  }
  return std::nullopt;
}

void Ldg::connect() {
  edges.clear();
  for (std::size_t u = 0; u < nodes.size(); ++u) {
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      if (u == v) continue;
      const auto& prod = nodes[u].produced;
      const auto& cons = nodes[v].consumed;
      bool shared = std::any_of(prod.begin(), prod.end(), [&](const std::string& p) { return cons.count(p) > 0; });
      if (shared) edges.insert({u, v});
    }
  }
}

Ldg construct_ldg(const lang::LilaProgram& program) {
  Ldg g;
  std::set<std::string> rule_heads;
  for (const auto& r : program.rules) rule_heads.insert(r.head.predicate);

  for (const auto* a : program.annotations_of(AnnotationKind::from)) {
    auto n = annotation_node(NodeKind::fact_source, *a);
    for (const auto& r : a->relations) n.produced.insert(r.predicate);
    g.nodes.push_back(std::move(n));
  }

  // Producers other than enrichers and inline facts, for the placement rule.
  std::set<std::string> produced_elsewhere = rule_heads;
  for (const auto& n : g.nodes) produced_elsewhere.insert(n.produced.begin(), n.produced.end());

  for (const auto* a : program.annotations_of(AnnotationKind::enrich)) {
    auto n = annotation_node(NodeKind::enricher, *a);
    for (const auto& r : a->relations) {
      n.produced.insert(r.predicate);
      // Enriched after an existing producer, else directly before use.
      if (produced_elsewhere.count(r.predicate)) n.consumed.insert(r.predicate);
    }
    g.nodes.push_back(std::move(n));
  }

  for (const auto& pred : program.facts.predicates()) {
    Node n;
    n.kind = NodeKind::inline_facts;
    n.produced.insert(pred);
    if (produced_elsewhere.count(pred)) n.consumed.insert(pred);
    for (const auto& t : program.facts.relation(pred)) n.facts.insert(pred, t);
    g.nodes.push_back(std::move(n));
  }

  // One processor per head predicate; strongly connected heads share one.
  auto dg = datalog::rule_dependency_graph(program.rules);
  std::map<std::string, std::size_t> group_of;
  std::vector<std::set<std::string>> groups;
  for (const auto& comp : dg.components()) {
    std::set<std::string> heads;
    for (const auto& p : comp) {
      if (rule_heads.count(p)) heads.insert(p);
    }
    if (heads.empty()) continue;
    for (const auto& h : heads) group_of[h] = groups.size();
    groups.push_back(std::move(heads));
  }
  std::vector<std::optional<std::size_t>> first_rule(groups.size());
  std::vector<Node> processors(groups.size());
  for (std::size_t i = 0; i < program.rules.size(); ++i) {
    const auto& r = program.rules[i];
    auto gi = group_of.at(r.head.predicate);
    if (!first_rule[gi]) first_rule[gi] = i;
    auto& n = processors[gi];
    n.kind = NodeKind::processor;
    n.rules.push_back(r);
    n.produced.insert(r.head.predicate);
  }
  std::vector<std::size_t> order(groups.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return *first_rule[a] < *first_rule[b]; });
  for (auto gi : order) {
    auto& n = processors[gi];
    for (const auto& r : n.rules) {
      for (const auto& p : r.body_predicates()) {
        if (!n.produced.count(p) && p != kMeta) n.consumed.insert(p);
      }
    }
    g.nodes.push_back(std::move(n));
  }

  for (const auto& a : program.annotations) {
    if (a.kind != AnnotationKind::aggregate && a.kind != AnnotationKind::split) continue;
    auto n = annotation_node(a.kind == AnnotationKind::aggregate ? NodeKind::aggregator : NodeKind::splitter, a);
    for (const auto& q : a.queries) {
      n.consumed.insert(q.predicate);
      n.produced.insert(q.predicate);
    }
    g.nodes.push_back(std::move(n));
  }

  for (const auto* a : program.annotations_of(AnnotationKind::to)) {
    auto n = annotation_node(NodeKind::routing_goal, *a);
    n.consumed.insert(a->exposed.begin(), a->exposed.end());
    g.nodes.push_back(std::move(n));
  }
  g.warnings = program.warnings;
  g.connect();
  return g;
}

Ldg apply_suffix_rewriting(Ldg g) {
  bool any = false;
  for (auto& n : g.nodes) {
    if (!is_suffixing(n.kind)) continue;
    any = true;
    std::set<std::string> renamed;
    for (const auto& p : n.consumed) renamed.insert(p + suffix_of(n.kind));
    n.produced = std::move(renamed);
  }
  if (!any) return g;
  g.connect();
  // Downstream is undefined on a cycle; build_ldg reports the cycle.
  if (!g.topological_order()) return g;

  for (std::size_t x = 0; x < g.nodes.size(); ++x) {
    const auto& agg = g.nodes[x];
    if (!is_suffixing(agg.kind)) continue;
    std::vector<bool> seen(g.nodes.size(), false);
    std::vector<std::size_t> stack = g.successors(x);
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      if (seen[v] || v == x) continue;
      seen[v] = true;
      for (const auto& p : agg.consumed) {
        if (!g.nodes[v].consumed.count(p)) continue;
        throw LdgError(make_error(
            "ambiguous-reference",
            g.nodes[v].label() + " reads " + p + " downstream of " + agg.label() + "; write " + p +
                suffix_of(agg.kind) + " for the " + (agg.kind == NodeKind::aggregator ? "aggregated" : "split") +
                " relation",
            usage_span(g.nodes[v], p)));
      }
      for (auto s : g.successors(v)) stack.push_back(s);
    }
  }
  return g;
}

Ldg build_ldg(const lang::LilaProgram& program) {
  auto g = apply_suffix_rewriting(construct_ldg(lang::normalize(program)));

  std::set<std::string> available;
  for (const auto& n : g.nodes) available.insert(n.produced.begin(), n.produced.end());
  for (const auto& n : g.nodes) {
    for (const auto& p : n.consumed) {
      if (available.count(p)) continue;
      std::string hint;
      for (const auto& q : available) {
        if (q == p + "-aggregate" || q == p + "-split") hint = "; did you mean " + q + "?";
      }
      throw LdgError(make_error("unresolved-dependency",
                                n.label() + " reads " + p + ", which nothing produces" + hint, usage_span(n, p)));
    }
  }

  if (!g.topological_order()) {
    // Report one cycle as a path of node labels.
    std::vector<int> state(g.nodes.size(), 0);
    std::vector<std::size_t> path;
    std::vector<std::size_t> cycle;
    std::function<bool(std::size_t)> dfs = [&](std::size_t u) {
      state[u] = 1;
      path.push_back(u);
      for (auto v : g.successors(u)) {
        if (state[v] == 1) {
          auto it = std::find(path.begin(), path.end(), v);
          cycle.assign(it, path.end());
          cycle.push_back(v);
          return true;
        }
        if (state[v] == 0 && dfs(v)) return true;
      }
      path.pop_back();
      state[u] = 2;
      return false;
    };
    for (std::size_t i = 0; i < g.nodes.size() && cycle.empty(); ++i) {
      if (state[i] == 0) dfs(i);
    }
    std::string text;
    for (auto n : cycle) text += (text.empty() ? "" : " -> ") + g.nodes[n].label();
    throw LdgError(make_error("cycle", "dependency cycle: " + text, node_span(g.nodes[cycle.front()])));
  }
  return g;
}

Ldg prune_unused(Ldg g) {
  std::vector<bool> live(g.nodes.size(), false);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i].kind == NodeKind::routing_goal) stack.push_back(i);
  }
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (live[v]) continue;
    live[v] = true;
    for (auto p : g.predecessors(v)) stack.push_back(p);
  }
  Ldg out;
  out.warnings = g.warnings;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (live[i]) {
      out.nodes.push_back(std::move(g.nodes[i]));
    } else {
      out.warnings.push_back(make_warning("unused", g.nodes[i].label() + " reaches no routing goal and is removed",
                                          node_span(g.nodes[i])));
    }
  }
  out.connect();
  return out;
}

std::string export_ldg_dot(const Ldg& g) {
  std::string out = "digraph ldg {\n";
  if (!g.nodes.empty()) out += "  rankdir=LR;\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    std::string shape = "box";
    if (n.kind == NodeKind::processor) shape = "ellipse";
    if (is_suffixing(n.kind)) shape = "diamond";
    if (n.kind == NodeKind::inline_facts) shape = "note";
    out += "  n" + std::to_string(i) + " [label=\"" + dot_escape(n.label()) + "\", shape=" + shape + "];\n";
  }
  for (const auto& [u, v] : g.edges) out += "  n" + std::to_string(u) + " -> n" + std::to_string(v) + ";\n";
  return out + "}\n";
}

}  // namespace lila::ldg
