#include <algorithm>
#include <functional>
#include <map>
#include <random>

#include "lila/lang/program.hpp"
#include "lila/synth/route_graph.hpp"

namespace lila::synth {

using ldg::Ldg;
using ldg::NodeKind;
using lang::AnnotationKind;

namespace {

std::string join(const std::vector<std::string>& names, const std::string& sep) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : sep) + n;
  return out;
}

std::vector<std::string> sorted(const std::set<std::string>& s) { return {s.begin(), s.end()}; }

/// Predicate arities known from declarations, queries and rule heads.
std::map<std::string, std::size_t> arities(const Ldg& g) {
  std::map<std::string, std::size_t> out;
  for (const auto& n : g.nodes) {
    for (const auto& r : n.rules) out[r.head.predicate] = r.head.arity();
    for (const auto& f : n.facts.to_vector()) out[f.predicate] = f.args.size();
    if (!n.annotation) continue;
    for (const auto& a : n.annotation->relations) out[a.predicate] = a.arity();
    std::string suffix = n.kind == NodeKind::aggregator ? patterns::aggregate_suffix : patterns::split_suffix;
    for (const auto& q : n.annotation->queries) out[patterns::suffixed(q.predicate, suffix)] = q.arity();
  }
  return out;
}

datalog::Atom open_atom(const std::string& pred, std::size_t arity) {
  std::vector<datalog::Term> terms;
  for (std::size_t i = 1; i <= arity; ++i) terms.push_back(datalog::Term::var("X" + std::to_string(i)));
  return datalog::atom(pred, std::move(terms));
}

bool single_atom_rules(const std::vector<datalog::Rule>& rules, const std::set<std::string>& produced) {
  for (const auto& r : rules) {
    std::size_t atoms = 0;
    for (const auto& lit : r.body) {
      if (const auto* a = std::get_if<datalog::Atom>(&lit)) {
        ++atoms;
        if (produced.count(a->predicate)) return false;
      }
    }
    if (atoms != 1) return false;
  }
  return true;
}

patterns::AggregatorConfig aggregator_config(const lang::Annotation& a) {
  auto s = lang::aggregate_settings(a);
  patterns::AggregatorConfig c;
  c.completion_size = s.completion_size;
  c.completion_millis = s.completion_millis;
  c.correlation = a.queries;
  return c;
}

patterns::AggregatorConfig join_config(std::size_t size) {
  patterns::AggregatorConfig c;
  c.completion_size = size;
  return c;
}

PatternConfig join_node(std::size_t size) {
  PatternConfig c;
  c.aggregator = join_config(size);
  return c;
}

/// Role of an enricher or inline-facts node that reads nothing.
enum class Role { main, called, inlined };

class Builder {
 public:
  Builder(const Ldg& g, const SynthOptions& options) : g_(g), options_(options), arity_(arities(g)) {}

  RouteGraph run() {
    classify();
    // Names fixed up front so visiting order cannot change them.
    for (std::size_t n = 0; n < g_.nodes.size(); ++n) {
      if (needs_channel(n)) channel(n);
    }
    for (auto n : order()) visit(n);
    for (auto& r : rg_.routes) {
      if (!r.nodes.empty()) r.name = rg_.nodes[r.nodes.front()].label();
    }
    return std::move(rg_);
  }

  /// Nodes whose messages are copied to more than one successor.
  std::vector<std::size_t> multicast_sites() {
    classify();
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < g_.nodes.size(); ++n) {
      if (main_succs(n).size() > 1) out.push_back(n);
    }
    return out;
  }

 private:
  const Ldg& g_;
  SynthOptions options_;
  std::map<std::string, std::size_t> arity_;
  RouteGraph rg_;
  std::vector<Role> role_;
  std::map<std::size_t, std::size_t> tail_;         // LDG node -> last RG node of its fragment
  std::map<std::size_t, std::string> channel_;      // LDG node -> direct channel it listens on
  std::set<std::string> used_channels_;

  bool source_like(std::size_t n) const {
    const auto& k = g_.nodes[n].kind;
    return (k == NodeKind::enricher || k == NodeKind::inline_facts) && g_.nodes[n].consumed.empty();
  }

  std::vector<std::size_t> main_preds(std::size_t n) const {
    std::vector<std::size_t> out;
    for (auto p : g_.predecessors(n)) {
      if (role_[p] == Role::main) out.push_back(p);
    }
    return out;
  }

  std::vector<std::size_t> main_succs(std::size_t n) const {
    if (role_[n] != Role::main) return {};
    return g_.successors(n);
  }

  void classify() {
    role_.assign(g_.nodes.size(), Role::main);
    for (std::size_t n = 0; n < g_.nodes.size(); ++n) {
      if (!source_like(n)) continue;
      if (g_.nodes[n].kind == NodeKind::inline_facts) {
        role_[n] = Role::inlined;
        continue;
      }
      if (g_.out_degree(n) == 0) {
        role_[n] = Role::inlined;  // no route at all
        rg_.warnings.push_back(make_warning("unused-enricher", g_.nodes[n].label() + " has no consumers",
                                            g_.nodes[n].annotation->span));
        continue;
      }
      role_[n] = Role::called;
    }
    // A consumer without any other input turns its enrichers into sources.
    for (std::size_t n = 0; n < g_.nodes.size(); ++n) {
      if (source_like(n) || g_.nodes[n].kind == NodeKind::fact_source) continue;
      auto preds = g_.predecessors(n);
      if (preds.empty() || !main_preds(n).empty()) continue;
      for (auto p : preds) {
        if (role_[p] == Role::called) role_[p] = Role::main;
      }
    }
    for (std::size_t n = 0; n < g_.nodes.size(); ++n) {
      if (g_.nodes[n].kind != NodeKind::enricher || role_[n] != Role::main || !source_like(n)) continue;
      for (auto s : g_.successors(n)) {
        if (main_preds(s).size() > 1) {
          throw SynthesisError(make_error(
              "enricher", g_.nodes[n].label() + " feeds both triggered and untriggered consumers; give " +
                              g_.nodes[s].label() + " its own enricher",
              g_.nodes[n].annotation->span));
        }
      }
    }
    for (std::size_t n = 0; n < g_.nodes.size(); ++n) {
      if (role_[n] != Role::main || source_like(n) || g_.nodes[n].kind == NodeKind::fact_source) continue;
      if (main_preds(n).empty()) {
        throw SynthesisError(make_error("no-input", g_.nodes[n].label() + " receives no messages"));
      }
    }
  }

  bool needs_channel(std::size_t n) const {
    if (role_[n] == Role::called) return true;
    if (role_[n] != Role::main) return false;
    auto preds = main_preds(n);
    return preds.size() > 1 || (preds.size() == 1 && main_succs(preds.front()).size() > 1);
  }

  std::vector<std::size_t> order() const {
    std::vector<std::size_t> indeg(g_.nodes.size(), 0);
    for (const auto& e : g_.edges) ++indeg[e.second];
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < g_.nodes.size(); ++i) {
      if (indeg[i] == 0) ready.push_back(i);
    }
    std::mt19937 rng(options_.shuffle_seed.value_or(0));
    std::vector<std::size_t> out;
    while (!ready.empty()) {
      std::size_t pick = 0;
      if (options_.shuffle_seed) {
        pick = std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(rng);
      } else {
        pick = static_cast<std::size_t>(std::min_element(ready.begin(), ready.end()) - ready.begin());
      }
      auto n = ready[pick];
      ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(pick));
      out.push_back(n);
      for (auto s : g_.successors(n)) {
        if (--indeg[s] == 0) ready.push_back(s);
      }
    }
    if (out.size() != g_.nodes.size()) throw SynthesisError(make_error("cycle", "the dependency graph is cyclic"));
    return out;
  }

  std::string channel_base(std::size_t n) const {
    const auto& node = g_.nodes[n];
    switch (node.kind) {
      case NodeKind::routing_goal: return join(node.annotation->exposed, "+");
      case NodeKind::enricher: {
        std::vector<std::string> names;
        for (const auto& r : node.annotation->relations) names.push_back(r.predicate);
        return join(names, "+");
      }
      default: return join(sorted(node.produced), "+");
    }
  }

  /// Channel of an LDG node, chosen on first use; names are unique per graph
  /// so order-dependent suffixes only appear on real collisions.
  const std::string& channel(std::size_t n) {
    auto it = channel_.find(n);
    if (it != channel_.end()) return it->second;
    std::string base = "direct:" + channel_base(n);
    std::string name = base;
    for (int i = 2; used_channels_.count(name); ++i) name = base + "-" + std::to_string(i);
    used_channels_.insert(name);
    return channel_[n] = name;
  }

  std::size_t new_route() {
    rg_.routes.push_back({});
    return rg_.routes.size() - 1;
  }

  std::size_t add(RgKind kind, PatternConfig cfg, std::size_t route, std::optional<std::size_t> origin,
                  std::optional<std::size_t> after) {
    RgNode node;
    node.kind = kind;
    node.config = std::move(cfg);
    node.route = route;
    node.origin = origin;
    rg_.nodes.push_back(std::move(node));
    auto id = rg_.nodes.size() - 1;
    rg_.routes[route].nodes.push_back(id);
    if (after) rg_.edges.insert({*after, id});
    return id;
  }

  std::size_t append(RgKind kind, PatternConfig cfg, std::size_t at, std::size_t origin) {
    return add(kind, std::move(cfg), rg_.nodes[at].route, origin, at);
  }

  void visit(std::size_t n) {
    const auto& node = g_.nodes[n];
    if (role_[n] == Role::inlined) return;
    if (role_[n] == Role::called) {
      auto r = new_route();
      PatternConfig from;
      from.uri = channel(n);
      auto head = add(RgKind::from_direct, from, r, n, std::nullopt);
      append(RgKind::enricher_call, enricher_file(node), head, n);
      return;
    }
    std::size_t at = 0;
    if (node.kind == NodeKind::fact_source || source_like(n)) {
      auto r = new_route();
      PatternConfig from;
      from.uri = node.annotation->location();
      at = add(RgKind::from_endpoint, from, r, n, std::nullopt);
      PatternConfig conv;
      conv.format = lang::format_spec(*node.annotation);
      conv.to_cdm = true;
      at = append(RgKind::format_converter, conv, at, n);
    } else {
      at = entry(n);
      for (auto p : g_.predecessors(n)) {
        if (role_[p] == Role::called) {
          PatternConfig call;
          call.uri = channel(p);
          call.call = true;
          at = append(RgKind::to_direct, call, at, n);
          at = append(RgKind::join_aggregator, join_node(2), at, n);
        } else if (role_[p] == Role::inlined) {
          PatternConfig facts;
          facts.facts = g_.nodes[p].facts;
          at = append(RgKind::enricher_call, facts, at, n);
        }
      }
      at = body(n, at);
    }
    tail_[n] = at;
    leave(n);
  }

  /// First RG node of a non-source fragment: continues the single
  /// predecessor's route or opens a route on the node's direct channel.
  std::size_t entry(std::size_t n) {
    auto preds = main_preds(n);
    if (preds.size() == 1 && main_succs(preds.front()).size() == 1) return tail_.at(preds.front());
    auto r = new_route();
    PatternConfig from;
    from.uri = channel(n);
    auto at = add(RgKind::from_direct, from, r, n, std::nullopt);
    if (preds.size() > 1) {
      at = append(RgKind::join_aggregator, join_node(preds.size()), at, n);
    }
    return at;
  }

  /// Wiring after a fragment: nothing for a fused successor, a toDirect for
  /// a single join successor, a multicast with one toDirect per successor.
  void leave(std::size_t n) {
    auto succs = main_succs(n);
    auto at = tail_.at(n);
    if (succs.empty()) return;
    if (succs.size() == 1) {
      if (main_preds(succs.front()).size() == 1) return;
      PatternConfig to;
      to.uri = channel(succs.front());
      append(RgKind::to_direct, to, at, n);
      return;
    }
    PatternConfig mc;
    for (auto s : succs) mc.targets.push_back(channel(s));
    auto m = append(RgKind::multicast, mc, at, n);
    for (auto s : succs) {
      PatternConfig to;
      to.uri = channel(s);
      append(RgKind::to_direct, to, m, n);
    }
  }

  PatternConfig enricher_file(const ldg::Node& node) const {
    PatternConfig cfg;
    cfg.uri = node.annotation->location();
    cfg.format = lang::format_spec(*node.annotation);
    return cfg;
  }

  std::size_t body(std::size_t n, std::size_t at) {
    const auto& node = g_.nodes[n];
    switch (node.kind) {
      case NodeKind::processor: {
        PatternConfig cfg;
        cfg.rules = node.rules;
        cfg.exposed = sorted(node.produced);
        auto kind = single_atom_rules(node.rules, node.produced) ? RgKind::content_filter : RgKind::translator;
        return append(kind, cfg, at, n);
      }
      case NodeKind::routing_goal: {
        const auto& a = *node.annotation;
        PatternConfig filter;
        filter.exposed = a.exposed;
        for (const auto& p : a.exposed) {
          auto it = arity_.find(p);
          if (it == arity_.end()) throw SynthesisError(make_error("arity", "unknown arity of " + p, a.span));
          filter.conditions.push_back({{}, open_atom(p, it->second)});
        }
        at = append(RgKind::message_filter, filter, at, n);
        PatternConfig conv;
        conv.format = lang::format_spec(a);
        conv.to_cdm = false;
        conv.exposed = a.exposed;
        at = append(RgKind::format_converter, conv, at, n);
        PatternConfig to;
        to.uri = a.location();
        to.exposed = a.exposed;
        return append(RgKind::to_endpoint, to, at, n);
      }
      case NodeKind::aggregator: {
        PatternConfig cfg;
        cfg.aggregator = aggregator_config(*node.annotation);
        at = append(RgKind::aggregator, cfg, at, n);
        PatternConfig ren;
        ren.suffix = patterns::aggregate_suffix;
        return append(RgKind::renaming_translator, ren, at, n);
      }
      case NodeKind::splitter: {
        PatternConfig cfg;
        cfg.queries = node.annotation->queries;
        at = append(RgKind::splitter, cfg, at, n);
        PatternConfig ren;
        ren.suffix = patterns::split_suffix;
        return append(RgKind::renaming_translator, ren, at, n);
      }
      case NodeKind::enricher: return append(RgKind::enricher_call, enricher_file(node), at, n);
      case NodeKind::inline_facts: {
        PatternConfig cfg;
        cfg.facts = node.facts;
        return append(RgKind::enricher_call, cfg, at, n);
      }
      case NodeKind::fact_source: break;
    }
    throw SynthesisError(make_error("internal", "unexpected node " + node.label()));
  }

};

void link_directs(RouteGraph& rg) {
  rg.links.clear();
  for (std::size_t i = 0; i < rg.nodes.size(); ++i) {
    if (rg.nodes[i].kind != RgKind::to_direct) continue;
    if (auto r = rg.receiver(rg.nodes[i].config.uri)) rg.links.insert({i, *r});
  }
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string_view rg_kind_name(RgKind k) {
  switch (k) {
    case RgKind::from_endpoint: return "fromEndpoint";
    case RgKind::to_endpoint: return "toEndpoint";
    case RgKind::from_direct: return "fromDirect";
    case RgKind::to_direct: return "toDirect";
    case RgKind::multicast: return "multicast";
    case RgKind::join_aggregator: return "joinAggregator";
    case RgKind::content_filter: return "contentFilter";
    case RgKind::translator: return "translator";
    case RgKind::enricher_call: return "enricherCall";
    case RgKind::splitter: return "splitter";
    case RgKind::aggregator: return "aggregator";
    case RgKind::message_filter: return "messageFilter";
    case RgKind::format_converter: return "formatConverter";
    case RgKind::renaming_translator: return "renamingTranslator";
  }
  return "?";
}

std::string RgNode::label() const {
  const auto& c = config;
  auto agg = [&] {
    std::string s = "union";
    if (c.aggregator.completion_size) s += ",completionSize=" + std::to_string(*c.aggregator.completion_size);
    if (c.aggregator.completion_millis) s += ",completionTime=" + std::to_string(*c.aggregator.completion_millis) + "ms";
    return s;
  };
  switch (kind) {
    case RgKind::from_endpoint:
    case RgKind::from_direct: return "from(" + c.uri + ")";
    case RgKind::to_endpoint: return "to(" + c.uri + ")";
    case RgKind::to_direct: return (c.call ? "call(" : "to(") + c.uri + ")";
    case RgKind::multicast: return "multicast(" + join(c.targets, ",") + ")";
    case RgKind::join_aggregator: return "joinAggregator(" + agg() + ")";
    case RgKind::aggregator: return "aggregator(" + agg() + ")";
    case RgKind::content_filter: return "contentFilter(" + join(c.exposed, ",") + ")";
    case RgKind::translator: return "translator(" + join(c.exposed, ",") + ")";
    case RgKind::enricher_call:
      if (c.uri.empty()) return "enrich(" + std::to_string(c.facts.size()) + " facts)";
      return "enrich(" + c.uri + "," + std::string(cdm::format_name(c.format->format)) + ")";
    case RgKind::splitter: {
      std::vector<std::string> qs;
      for (const auto& q : c.queries) qs.push_back(q.predicate);
      return "split(" + join(qs, ",") + ")";
    }
    case RgKind::message_filter: return "messageFilter(nonEmpty " + join(c.exposed, ",") + ")";
    case RgKind::format_converter: {
      std::string f(cdm::format_name(c.format->format));
      return c.to_cdm ? "convert(" + f + "->cdm)" : "convert(cdm->" + f + ")";
    }
    case RgKind::renaming_translator: return "rename(" + c.suffix + ")";
  }
  return "?";
}

std::vector<std::size_t> RouteGraph::successors(std::size_t n) const {
  std::vector<std::size_t> out;
  for (auto it = edges.lower_bound({n, 0}); it != edges.end() && it->first == n; ++it) out.push_back(it->second);
  return out;
}

std::vector<std::size_t> RouteGraph::predecessors(std::size_t n) const {
  std::vector<std::size_t> out;
  for (const auto& [u, v] : edges) {
    if (v == n) out.push_back(u);
  }
  return out;
}

std::size_t RouteGraph::in_degree(std::size_t n) const { return predecessors(n).size(); }
std::size_t RouteGraph::out_degree(std::size_t n) const { return successors(n).size(); }

std::optional<std::size_t> RouteGraph::receiver(const std::string& channel) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].kind == RgKind::from_direct && nodes[i].config.uri == channel) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> RouteGraph::nodes_of(RgKind k) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].kind == k) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> detect_join_router(const Ldg& g) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.in_degree(i) > 1) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> detect_multicast(const Ldg& g) {
  // Called enrichers answer each consumer separately and need no copy.
  return Builder(g, {}).multicast_sites();
}

RouteGraph transform_join_router(const Ldg& g, std::size_t site) {
  RouteGraph rg;
  auto preds = g.predecessors(site);
  if (preds.size() < 2) return rg;
  std::string channel = "direct:" + g.nodes[site].label();
  rg.routes.push_back({});
  RgNode from{RgKind::from_direct, {}, 0, site};
  from.config.uri = channel;
  rg.nodes.push_back(from);
  rg.nodes.push_back({RgKind::join_aggregator, join_node(preds.size()), 0, site});
  rg.edges.insert({0, 1});
  rg.routes[0].nodes = {0, 1};
  for (auto p : preds) {
    rg.routes.push_back({});
    RgNode to{RgKind::to_direct, {}, rg.routes.size() - 1, p};
    to.config.uri = channel;
    rg.nodes.push_back(to);
    rg.routes.back().nodes.push_back(rg.nodes.size() - 1);
  }
  link_directs(rg);
  for (auto& r : rg.routes) r.name = rg.nodes[r.nodes.front()].label();
  return rg;
}

RouteGraph transform_multicast(const Ldg& g, std::size_t site) {
  RouteGraph rg;
  auto succs = g.successors(site);
  if (succs.size() < 2) return rg;
  rg.routes.push_back({});
  RgNode mc{RgKind::multicast, {}, 0, site};
  for (auto s : succs) mc.config.targets.push_back("direct:" + g.nodes[s].label());
  rg.nodes.push_back(mc);
  rg.routes[0].nodes.push_back(0);
  for (const auto& target : mc.config.targets) {
    RgNode to{RgKind::to_direct, {}, 0, site};
    to.config.uri = target;
    rg.nodes.push_back(to);
    rg.edges.insert({0, rg.nodes.size() - 1});
    rg.routes[0].nodes.push_back(rg.nodes.size() - 1);
  }
  for (std::size_t i = 0; i < succs.size(); ++i) {
    rg.routes.push_back({});
    RgNode from{RgKind::from_direct, {}, rg.routes.size() - 1, succs[i]};
    from.config.uri = mc.config.targets[i];
    rg.nodes.push_back(from);
    rg.routes.back().nodes.push_back(rg.nodes.size() - 1);
  }
  link_directs(rg);
  for (auto& r : rg.routes) r.name = rg.nodes[r.nodes.front()].label();
  return rg;
}

RouteGraph detect_and_transform_enricher(const Ldg& g) {
  RouteGraph full = synthesize_routes(g);
  RouteGraph rg;
  rg.warnings = full.warnings;
  std::map<std::size_t, std::size_t> remap;
  for (const auto& route : full.routes) {
    const auto& head = full.nodes[route.nodes.front()];
    if (head.kind != RgKind::from_direct || !head.origin || g.nodes[*head.origin].kind != NodeKind::enricher) {
      continue;
    }
    rg.routes.push_back({route.name, {}});
    for (auto id : route.nodes) {
      remap[id] = rg.nodes.size();
      auto node = full.nodes[id];
      node.route = rg.routes.size() - 1;
      rg.nodes.push_back(node);
      rg.routes.back().nodes.push_back(remap[id]);
    }
  }
  for (const auto& [u, v] : full.edges) {
    if (remap.count(u) && remap.count(v)) rg.edges.insert({remap[u], remap[v]});
  }
  return rg;
}

RouteGraph synthesize_routes(const Ldg& g, const SynthOptions& options) {
  RouteGraph rg = Builder(g, options).run();
  link_directs(rg);
  auto problems = check_invariants(rg);
  if (!problems.empty()) {
    throw SynthesisError(make_error("internal", "route graph invariant violated: " + problems.front().message));
  }
  return rg;
}

RouteGraph compile(const lang::LilaProgram& program, const SynthOptions& options) {
  auto g = ldg::prune_unused(ldg::build_ldg(program));
  auto rg = synthesize_routes(g, options);
  rg.warnings.insert(rg.warnings.begin(), g.warnings.begin(), g.warnings.end());
  return rg;
}

Diagnostics check_invariants(const RouteGraph& rg) {
  Diagnostics out;
  auto fail = [&](const std::string& what) { out.push_back(make_error("invariant", what)); };
  std::vector<std::size_t> in(rg.nodes.size(), 0), outd(rg.nodes.size(), 0);
  for (const auto& [u, v] : rg.edges) {
    ++outd[u];
    ++in[v];
    if (rg.nodes[u].route != rg.nodes[v].route) {
      fail("channel edge " + rg.nodes[u].label() + " -> " + rg.nodes[v].label() + " crosses routes");
    }
  }
  for (std::size_t i = 0; i < rg.nodes.size(); ++i) {
    const auto& n = rg.nodes[i];
    if (in[i] > 1) fail(n.label() + " has in-degree " + std::to_string(in[i]));
    if (outd[i] > 1 && n.kind != RgKind::multicast) fail(n.label() + " has out-degree " + std::to_string(outd[i]));
    if ((n.kind == RgKind::from_direct || n.kind == RgKind::from_endpoint) && in[i] != 0) {
      fail(n.label() + " is not the head of its route");
    }
    if (n.kind == RgKind::to_direct && !n.config.call && outd[i] != 0) fail(n.label() + " continues its route");
  }
  std::map<std::string, std::size_t> receivers;
  for (std::size_t i = 0; i < rg.nodes.size(); ++i) {
    if (rg.nodes[i].kind != RgKind::from_direct) continue;
    if (!receivers.emplace(rg.nodes[i].config.uri, i).second) fail("channel " + rg.nodes[i].config.uri + " has two receivers");
  }
  std::set<RgEdge> expected;
  for (std::size_t i = 0; i < rg.nodes.size(); ++i) {
    if (rg.nodes[i].kind != RgKind::to_direct) continue;
    auto it = receivers.find(rg.nodes[i].config.uri);
    if (it == receivers.end()) {
      fail("channel " + rg.nodes[i].config.uri + " has no receiver");
    } else {
      expected.insert({i, it->second});
    }
  }
  for (const auto& [u, v] : rg.links) {
    if (rg.nodes[u].kind != RgKind::to_direct || rg.nodes[v].kind != RgKind::from_direct) {
      fail("link " + rg.nodes[u].label() + " -> " + rg.nodes[v].label() + " is not a toDirect/fromDirect pair");
    } else if (rg.nodes[u].config.uri != rg.nodes[v].config.uri) {
      fail("link " + rg.nodes[u].label() + " -> " + rg.nodes[v].label() + " joins different channels");
    }
  }
  if (rg.links != expected) fail("direct links do not match the channel names");
  // Every node sits in exactly one route, each route is a tree from its head.
  std::vector<int> seen(rg.nodes.size(), 0);
  for (std::size_t r = 0; r < rg.routes.size(); ++r) {
    for (auto id : rg.routes[r].nodes) {
      ++seen[id];
      if (rg.nodes[id].route != r) fail(rg.nodes[id].label() + " is listed in the wrong route");
    }
    if (!rg.routes[r].nodes.empty() && in[rg.routes[r].nodes.front()] != 0) fail("route " + rg.routes[r].name + " has no head");
  }
  for (std::size_t i = 0; i < rg.nodes.size(); ++i) {
    if (seen[i] != 1) fail(rg.nodes[i].label() + " belongs to " + std::to_string(seen[i]) + " routes");
  }
  std::map<std::size_t, std::set<std::size_t>> origin_routes;
  for (const auto& n : rg.nodes) {
    if (n.origin) origin_routes[*n.origin].insert(n.route);
  }
  for (const auto& [o, routes] : origin_routes) {
    if (routes.size() != 1) fail("LDG node " + std::to_string(o) + " spans " + std::to_string(routes.size()) + " routes");
  }
  // Acyclic over channels and links together.
  std::vector<std::vector<std::size_t>> adj(rg.nodes.size());
  std::vector<std::size_t> indeg(rg.nodes.size(), 0);
  for (const auto* set : {&rg.edges, &rg.links}) {
    for (const auto& [u, v] : *set) {
      adj[u].push_back(v);
      ++indeg[v];
    }
  }
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < rg.nodes.size(); ++i) {
    if (indeg[i] == 0) ready.push_back(i);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto n = ready.back();
    ready.pop_back();
    ++visited;
    for (auto s : adj[n]) {
      if (--indeg[s] == 0) ready.push_back(s);
    }
  }
  if (visited != rg.nodes.size()) fail("route graph is cyclic");
  return out;
}

std::string export_rg_dot(const RouteGraph& rg) {
  std::string out = "digraph rg {\n";
  if (!rg.nodes.empty()) out += "  rankdir=LR;\n  compound=true;\n";
  for (std::size_t r = 0; r < rg.routes.size(); ++r) {
    out += "  subgraph cluster_" + std::to_string(r) + " {\n";
    out += "    label=\"route " + std::to_string(r) + ": " + dot_escape(rg.routes[r].name) + "\";\n";
    for (auto id : rg.routes[r].nodes) {
      std::string shape = "box";
      auto k = rg.nodes[id].kind;
      if (k == RgKind::from_endpoint || k == RgKind::to_endpoint) shape = "cds";
      if (k == RgKind::from_direct || k == RgKind::to_direct) shape = "oval";
      if (k == RgKind::multicast || k == RgKind::join_aggregator || k == RgKind::aggregator ||
          k == RgKind::splitter) {
        shape = "diamond";
      }
      out += "    n" + std::to_string(id) + " [label=\"" + dot_escape(rg.nodes[id].label()) + "\", shape=" + shape + "];\n";
    }
    out += "  }\n";
  }
  for (const auto& [u, v] : rg.edges) out += "  n" + std::to_string(u) + " -> n" + std::to_string(v) + ";\n";
  for (const auto& [u, v] : rg.links) {
    out += "  n" + std::to_string(u) + " -> n" + std::to_string(v) + " [style=dashed];\n";
  }
  return out + "}\n";
}

std::string canonical_form(const RouteGraph& rg) {
  // A route prints as its head followed by subtrees; children sorted by text.
  std::function<std::string(std::size_t)> tree = [&](std::size_t n) {
    std::vector<std::string> kids;
    for (auto s : rg.successors(n)) kids.push_back(tree(s));
    std::sort(kids.begin(), kids.end());
    std::string out = rg.nodes[n].label();
    if (kids.size() == 1) return out + " -> " + kids.front();
    if (!kids.empty()) out += " -> [" + join(kids, " | ") + "]";
    return out;
  };
  std::vector<std::string> routes;
  for (const auto& r : rg.routes) {
    if (!r.nodes.empty()) routes.push_back(tree(r.nodes.front()));
  }
  std::sort(routes.begin(), routes.end());
  std::multiset<std::string> links;
  for (const auto& [u, v] : rg.links) {
    links.insert(rg.nodes[u].label() + " ~> " + rg.nodes[v].label());
  }
  std::string out;
  for (const auto& r : routes) out += "route: " + r + "\n";
  for (const auto& l : links) out += "link: " + l + "\n";
  return out;
}

}  // namespace lila::synth
