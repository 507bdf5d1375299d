#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lila/datalog/ast.hpp"
#include "lila/diagnostics.hpp"
#include "lila/lang/program.hpp"

namespace lila::ldg {

enum class NodeKind { processor, fact_source, routing_goal, enricher, aggregator, splitter, inline_facts };

std::string_view kind_name(NodeKind k);

struct Node {
  NodeKind kind = NodeKind::processor;
  std::set<std::string> produced;
  std::set<std::string> consumed;
  std::vector<datalog::Rule> rules;             // processor
  std::optional<lang::Annotation> annotation;   // annotation nodes
  datalog::FactSet facts;                       // inline facts

  /// Predicate names for processors and inline facts, the annotation head
  /// otherwise.
  std::string label() const;
};

using Edge = std::pair<std::size_t, std::size_t>;

/// Dependency graph over processors (rule groups) and annotation nodes. An
/// edge u->v exists exactly when u produces a predicate v consumes.
struct Ldg {
  std::vector<Node> nodes;
  std::set<Edge> edges;
  Diagnostics warnings;

  std::vector<std::size_t> successors(std::size_t n) const;
  std::vector<std::size_t> predecessors(std::size_t n) const;
  std::size_t in_degree(std::size_t n) const;
  std::size_t out_degree(std::size_t n) const;
  /// Node indices in a topological order (ties by index); nullopt on a cycle.
  std::optional<std::vector<std::size_t>> topological_order() const;
  std::optional<std::size_t> find(const std::string& label) const;

  /// Recomputes `edges` from produced/consumed sets.
  void connect();
};

class LdgError : public Error {
 public:
  using Error::Error;
};

/// Nodes and edges only: one processor per head predicate, mutually
/// recursive head predicates merged into one processor; aggregators and
/// splitters still produce the names they read.
Ldg construct_ldg(const lang::LilaProgram& program);

/// Renames what aggregator (splitter) nodes produce to `p-aggregate`
/// (`p-split`) and reconnects. A node downstream of such a node that still
/// reads the unsuffixed `p` is an "ambiguous-reference" error.
Ldg apply_suffix_rewriting(Ldg ldg);

/// construct_ldg + apply_suffix_rewriting, then checks that every consumed
/// predicate has a producer ("unresolved-dependency") and that the graph is
/// acyclic ("cycle"). Rules are normalized (named parameters) first.
Ldg build_ldg(const lang::LilaProgram& program);

/// Drops nodes without a path to a routing goal, one warning per node.
Ldg prune_unused(Ldg ldg);

std::string export_ldg_dot(const Ldg& ldg);

}  // namespace lila::ldg
