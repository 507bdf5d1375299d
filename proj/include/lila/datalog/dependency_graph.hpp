#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lila/datalog/ast.hpp"

namespace lila::datalog {

/// Predicate dependency graph: an edge head -> body predicate for every rule
/// (min/max pattern predicates count as body predicates). Cycles allowed.
struct PredicateGraph {
  std::set<std::string> nodes;
  std::map<std::string, std::set<std::string>> edges;

  bool has_edge(const std::string& from, const std::string& to) const;
  std::size_t edge_count() const;
  /// Strongly connected components, each sorted, listed in order of their
  /// smallest member.
  std::vector<std::vector<std::string>> components() const;
};

PredicateGraph rule_dependency_graph(const std::vector<Rule>& rules);

}  // namespace lila::datalog
