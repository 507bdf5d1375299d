#include "lila/datalog/dependency_graph.hpp"

#include <algorithm>
#include <functional>

namespace lila::datalog {

bool PredicateGraph::has_edge(const std::string& from, const std::string& to) const {
  auto it = edges.find(from);
  return it != edges.end() && it->second.count(to) > 0;
}

std::size_t PredicateGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& [_, out] : edges) n += out.size();
  return n;
}

std::vector<std::vector<std::string>> PredicateGraph::components() const {
  // Tarjan over the sorted node set keeps the output deterministic.
  std::map<std::string, int> index, low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> out;
  int counter = 0;
  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    if (auto it = edges.find(v); it != edges.end()) {
      for (const auto& w : it->second) {
        if (!index.count(w)) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.count(w)) {
          low[v] = std::min(low[v], index[w]);
        }
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> comp;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (const auto& n : nodes) {
    if (!index.count(n)) visit(n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

PredicateGraph rule_dependency_graph(const std::vector<Rule>& rules) {
  PredicateGraph g;
  for (const auto& r : rules) {
    g.nodes.insert(r.head.predicate);
    for (const auto& p : r.body_predicates()) {
      g.nodes.insert(p);
      g.edges[r.head.predicate].insert(p);
    }
  }
  return g;
}

}  // namespace lila::datalog
