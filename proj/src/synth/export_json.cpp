#include <json.hpp>

#include "lila/synth/route_graph.hpp"

namespace lila::synth {

namespace {

nlohmann::json config_json(const PatternConfig& c) {
  nlohmann::json j = nlohmann::json::object();
  if (!c.uri.empty()) j["uri"] = c.uri;
  if (c.format) {
    j["format"] = std::string(cdm::format_name(c.format->format));
    auto rels = nlohmann::json::array();
    for (const auto& r : c.format->relations) rels.push_back(r.to_string());
    if (!rels.empty()) j["relations"] = rels;
  }
  if (!c.exposed.empty()) j["exposed"] = c.exposed;
  if (!c.rules.empty()) {
    auto rules = nlohmann::json::array();
    for (const auto& r : c.rules) rules.push_back(r.to_string());
    j["rules"] = rules;
  }
  if (!c.targets.empty()) j["targets"] = c.targets;
  if (c.aggregator.completion_size) j["completionSize"] = *c.aggregator.completion_size;
  if (c.aggregator.completion_millis) j["completionMillis"] = *c.aggregator.completion_millis;
  if (!c.aggregator.correlation.empty()) {
    auto qs = nlohmann::json::array();
    for (const auto& q : c.aggregator.correlation) qs.push_back(q.to_string());
    j["correlation"] = qs;
  }
  if (!c.queries.empty()) {
    auto qs = nlohmann::json::array();
    for (const auto& q : c.queries) qs.push_back(q.to_string());
    j["queries"] = qs;
  }
  if (!c.suffix.empty()) j["suffix"] = c.suffix;
  if (!c.facts.empty()) {
    auto fs = nlohmann::json::array();
    for (const auto& f : c.facts.to_vector()) fs.push_back(f.to_string());
    j["facts"] = fs;
  }
  if (c.call) j["call"] = true;
  return j;
}

}  // namespace

std::string export_rg_json(const RouteGraph& rg) {
  nlohmann::json doc;
  auto nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < rg.nodes.size(); ++i) {
    const auto& n = rg.nodes[i];
    nlohmann::json j;
    j["id"] = i;
    j["kind"] = std::string(rg_kind_name(n.kind));
    j["route"] = n.route;
    j["label"] = n.label();
    j["config"] = config_json(n.config);
    nodes.push_back(j);
  }
  auto pairs = [](const std::set<RgEdge>& es) {
    auto a = nlohmann::json::array();
    for (const auto& [u, v] : es) a.push_back({u, v});
    return a;
  };
  auto routes = nlohmann::json::array();
  for (std::size_t r = 0; r < rg.routes.size(); ++r) {
    routes.push_back({{"id", r}, {"name", rg.routes[r].name}, {"nodes", rg.routes[r].nodes}});
  }
  doc["nodes"] = nodes;
  doc["edges"] = pairs(rg.edges);
  doc["links"] = pairs(rg.links);
  doc["routes"] = routes;
  return doc.dump(2) + "\n";
}

}  // namespace lila::synth
