#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lila/cdm/convert.hpp"
#include "lila/datalog/ast.hpp"
#include "lila/diagnostics.hpp"
#include "lila/ldg/ldg.hpp"
#include "lila/patterns/ilp.hpp"

namespace lila::synth {

enum class RgKind {
  from_endpoint,
  to_endpoint,
  from_direct,
  to_direct,
  multicast,
  join_aggregator,
  content_filter,
  translator,
  enricher_call,
  splitter,
  aggregator,
  message_filter,
  format_converter,
  renaming_translator,
};

std::string_view rg_kind_name(RgKind k);

/// Node configuration; which members are meaningful depends on the kind.
struct PatternConfig {
  std::string uri;                              // endpoints, direct channels, enricher file
  std::optional<cdm::FormatSpec> format;        // converters, enricher file
  bool to_cdm = true;                           // formatConverter direction
  std::vector<std::string> exposed;             // processor outputs, goal predicates
  std::vector<datalog::Rule> rules;             // contentFilter / translator
  std::vector<patterns::Condition> conditions;  // messageFilter: passes if any holds
  std::vector<std::string> targets;             // multicast channels
  patterns::AggregatorConfig aggregator;        // aggregator / joinAggregator
  std::vector<datalog::Atom> queries;           // splitter
  std::string suffix;                           // renamingTranslator
  datalog::FactSet facts;                       // enricherCall with inline facts
  cdm::MetaFacts meta;                          // enricherCall with inline facts
  /// toDirect with a successor in its route: waits for the target route and
  /// passes the original message followed by the replies.
  bool call = false;
};

struct RgNode {
  RgKind kind = RgKind::translator;
  PatternConfig config;
  std::size_t route = 0;
  std::optional<std::size_t> origin;  // LDG node the component was synthesized for

  std::string label() const;
};

using RgEdge = std::pair<std::size_t, std::size_t>;

struct Route {
  std::string name;
  std::vector<std::size_t> nodes;  // in creation order, the head first
};

/// Components wired by channels inside routes (`edges`) and by named direct
/// channels across routes (`links`, always toDirect -> fromDirect).
struct RouteGraph {
  std::vector<RgNode> nodes;
  std::set<RgEdge> edges;
  std::set<RgEdge> links;
  std::vector<Route> routes;
  Diagnostics warnings;

  std::vector<std::size_t> successors(std::size_t n) const;
  std::vector<std::size_t> predecessors(std::size_t n) const;
  std::size_t in_degree(std::size_t n) const;
  std::size_t out_degree(std::size_t n) const;
  /// fromDirect node listening on `channel`.
  std::optional<std::size_t> receiver(const std::string& channel) const;
  std::vector<std::size_t> nodes_of(RgKind k) const;
};

class SynthesisError : public Error {
 public:
  using Error::Error;
};

/// Nodes with more than one predecessor.
std::vector<std::size_t> detect_join_router(const ldg::Ldg& g);
/// Nodes with more than one successor.
std::vector<std::size_t> detect_multicast(const ldg::Ldg& g);

/// fromDirect + joinAggregator(union, size = in-degree) for the site and one
/// toDirect per predecessor. Empty when the in-degree is below 2.
RouteGraph transform_join_router(const ldg::Ldg& g, std::size_t site);
/// Multicast + one toDirect per successor, and a fromDirect route per
/// successor. Empty when the out-degree is below 2.
RouteGraph transform_multicast(const ldg::Ldg& g, std::size_t site);
/// One route per enricher that is called before its consumers:
/// fromDirect + enricherCall. Enrichers without consumers get a warning.
RouteGraph detect_and_transform_enricher(const ldg::Ldg& g);

struct SynthOptions {
  /// Breaks topological ties pseudo-randomly instead of by node index.
  std::optional<unsigned> shuffle_seed;
};

RouteGraph synthesize_routes(const ldg::Ldg& g, const SynthOptions& options = {});

/// normalize + build_ldg + prune_unused + synthesize_routes.
RouteGraph compile(const lang::LilaProgram& program, const SynthOptions& options = {});

/// Degree bounds, acyclicity, route-local edges, paired direct links and
/// origin uniqueness. Empty when everything holds.
Diagnostics check_invariants(const RouteGraph& rg);

std::string export_rg_dot(const RouteGraph& rg);
std::string export_rg_json(const RouteGraph& rg);
/// Text independent of node numbering: sorted route paths and links.
std::string canonical_form(const RouteGraph& rg);

}  // namespace lila::synth
