#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include <json.hpp>

#include "lila/lang/program.hpp"
#include "lila/ldg/ldg.hpp"
#include "lila/synth/route_graph.hpp"
#include "support/files.hpp"
#include "support/random_lila.hpp"

using namespace lila;
using namespace lila::synth;
using test_support::corpus;

namespace {

ldg::Ldg ldg_of(const std::string& text) { return ldg::prune_unused(ldg::build_ldg(lang::parse(text))); }

RouteGraph rg_of(const std::string& text) { return compile(lang::parse(text)); }

std::vector<std::string> labels_of(const ldg::Ldg& g, const std::vector<std::size_t>& ids) {
  std::vector<std::string> out;
  for (auto i : ids) out.push_back(g.nodes[i].label());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t count_kind(const RouteGraph& rg, RgKind k) { return rg.nodes_of(k).size(); }

/// Kinds along a route that has no branches.
std::vector<RgKind> route_kinds(const RouteGraph& rg, std::size_t r) {
  std::vector<RgKind> out;
  std::optional<std::size_t> n = rg.routes[r].nodes.front();
  while (n) {
    out.push_back(rg.nodes[*n].kind);
    auto s = rg.successors(*n);
    n = s.empty() ? std::nullopt : std::optional<std::size_t>(s.front());
  }
  return out;
}

std::size_t only_successor(const RouteGraph& rg, std::size_t n) {
  auto s = rg.successors(n);
  EXPECT_EQ(s.size(), 1u) << rg.nodes[n].label();
  return s.empty() ? n : s.front();
}

std::optional<std::size_t> find_label(const RouteGraph& rg, const std::string& label) {
  for (std::size_t i = 0; i < rg.nodes.size(); ++i) {
    if (rg.nodes[i].label() == label) return i;
  }
  return std::nullopt;
}

std::vector<std::string> corpus_programs() {
  std::vector<std::string> names = {"soccer.lila", "soccer_extended.lila", "message_filter.lila",
                                    "content_filter.lila"};
  for (const auto& e : std::filesystem::directory_iterator(test_support::data_path("corpus/synthetic"))) {
    names.push_back("synthetic/" + e.path().filename().string());
  }
  std::sort(names.begin() + 4, names.end());
  return names;
}

}  // namespace

TEST(DetectJoinRouter, Examples) {
  auto soccer = ldg_of(corpus("soccer.lila"));
  EXPECT_EQ(labels_of(soccer, detect_join_router(soccer)), (std::vector<std::string>{"gByP", "pAtB"}));
  auto ext = ldg_of(corpus("soccer_extended.lila"));
  auto sites = labels_of(ext, detect_join_router(ext));
  EXPECT_TRUE(std::count(sites.begin(), sites.end(), "posAtShotOnGoal"));
  auto chain = ldg_of(corpus("synthetic/chain.lila"));
  EXPECT_TRUE(detect_join_router(chain).empty());
}

TEST(DetectMulticast, Examples) {
  auto soccer = ldg_of(corpus("soccer.lila"));
  EXPECT_EQ(labels_of(soccer, detect_multicast(soccer)), (std::vector<std::string>{"@from(file:gameEvents.json,json)"}));
  auto ext = ldg_of(corpus("soccer_extended.lila"));
  EXPECT_EQ(labels_of(ext, detect_multicast(ext)),
            (std::vector<std::string>{"@from(file:gameEvents.json,json)", "@from(file:playerPosition.json,json)",
                                      "gByP"}));
  auto chain = ldg_of(corpus("synthetic/chain.lila"));
  EXPECT_TRUE(detect_multicast(chain).empty());
}

TEST(TransformJoinRouter, FragmentShape) {
  auto g = ldg_of(corpus("synthetic/join_sources.lila"));
  auto site = *g.find("both");
  auto frag = transform_join_router(g, site);
  EXPECT_EQ(count_kind(frag, RgKind::from_direct), 1u);
  EXPECT_EQ(count_kind(frag, RgKind::to_direct), 2u);
  ASSERT_EQ(count_kind(frag, RgKind::join_aggregator), 1u);
  EXPECT_EQ(frag.nodes[frag.nodes_of(RgKind::join_aggregator).front()].config.aggregator.completion_size, 2u);
  EXPECT_EQ(frag.links.size(), 2u);
  EXPECT_TRUE(check_invariants(frag).empty());

  auto three = ldg_of(
      "@from(mock:a,json){a(x).}\n@from(mock:b,json){b(x).}\n@from(mock:c,json){c(x).}\n"
      "abc(x):-a(x),b(x),c(x).\n@to(mock:o){abc}\n");
  auto frag3 = transform_join_router(three, *three.find("abc"));
  EXPECT_EQ(frag3.nodes[frag3.nodes_of(RgKind::join_aggregator).front()].config.aggregator.completion_size, 3u);
  EXPECT_EQ(count_kind(frag3, RgKind::to_direct), 3u);

  auto chain = ldg_of(corpus("synthetic/chain.lila"));
  EXPECT_TRUE(transform_join_router(chain, *chain.find("flagged")).nodes.empty());
}

TEST(TransformMulticast, FragmentShape) {
  auto g = ldg_of(corpus("soccer.lila"));
  auto frag = transform_multicast(g, *g.find("@from(file:gameEvents.json,json)"));
  ASSERT_EQ(count_kind(frag, RgKind::multicast), 1u);
  EXPECT_EQ(frag.nodes[frag.nodes_of(RgKind::multicast).front()].config.targets.size(), 2u);
  EXPECT_EQ(frag.routes.size(), 3u);  // the site's route plus one per successor
  EXPECT_TRUE(check_invariants(frag).empty());

  auto four = ldg_of(corpus("synthetic/fan_out.lila"));
  auto frag4 = transform_multicast(four, *four.find("@from(mock:readings,csv)"));
  EXPECT_EQ(frag4.nodes[frag4.nodes_of(RgKind::multicast).front()].config.targets.size(), 4u);
  EXPECT_EQ(count_kind(frag4, RgKind::from_direct), 4u);

  auto chain = ldg_of(corpus("synthetic/chain.lila"));
  EXPECT_TRUE(transform_multicast(chain, *chain.find("big")).nodes.empty());
}

TEST(Enricher, OwnRouteSharedByConsumers) {
  auto frag = detect_and_transform_enricher(ldg_of(corpus("soccer.lila")));
  ASSERT_EQ(frag.routes.size(), 1u);
  EXPECT_EQ(route_kinds(frag, 0), (std::vector<RgKind>{RgKind::from_direct, RgKind::enricher_call}));
  EXPECT_EQ(frag.nodes[frag.routes[0].nodes.front()].config.uri, "direct:pInfo");

  auto rg = rg_of(corpus("soccer.lila"));
  std::size_t calls = 0;
  for (auto id : rg.nodes_of(RgKind::to_direct)) {
    if (!rg.nodes[id].config.call) continue;
    ++calls;
    auto join = only_successor(rg, id);
    EXPECT_EQ(rg.nodes[join].kind, RgKind::join_aggregator);
    EXPECT_EQ(rg.nodes[join].config.aggregator.completion_size, 2u);
  }
  EXPECT_EQ(calls, 2u);
}

TEST(Enricher, AfterProducerAndDirectlyBeforeConsumer) {
  // Relation also produced by a rule: the enrichment runs on that output.
  auto after = rg_of(corpus("synthetic/enrich_after.lila"));
  auto enrich = after.nodes_of(RgKind::enricher_call);
  ASSERT_EQ(enrich.size(), 1u);
  auto head = after.routes[after.nodes[enrich.front()].route].nodes.front();
  EXPECT_EQ(after.nodes[head].config.uri, "direct:known");
  EXPECT_TRUE(find_label(after, "multicast(direct:known,direct:greeting)"));

  // One consumer, no other producer: called right before the consumer.
  auto single = rg_of(corpus("synthetic/enrich_single.lila"));
  auto call = find_label(single, "call(direct:price)");
  ASSERT_TRUE(call);
  auto join = only_successor(single, *call);
  EXPECT_EQ(single.nodes[only_successor(single, join)].label(), "translator(revenue)");
}

TEST(Enricher, WithoutConsumersWarns) {
  ldg::Ldg g;
  ldg::Node n;
  n.kind = ldg::NodeKind::enricher;
  n.annotation = lang::parse("@enrich(x.json,json){q(a).}").annotations.front();
  n.produced = {"q"};
  g.nodes.push_back(n);
  auto frag = detect_and_transform_enricher(g);
  EXPECT_TRUE(frag.routes.empty());
  ASSERT_EQ(frag.warnings.size(), 1u);
  EXPECT_EQ(frag.warnings.front().code, "unused-enricher");
}

TEST(SynthesizeRoutes, SoccerHasFourRoutes) {
  auto rg = rg_of(corpus("soccer.lila"));
  EXPECT_EQ(rg.routes.size(), 4u);
  EXPECT_EQ(count_kind(rg, RgKind::multicast), 1u);
  std::size_t enricher_routes = 0;
  for (std::size_t r = 0; r < rg.routes.size(); ++r) {
    auto kinds = route_kinds(rg, r);
    if (kinds == std::vector<RgKind>{RgKind::from_direct, RgKind::enricher_call}) ++enricher_routes;
  }
  EXPECT_EQ(enricher_routes, 1u);
  EXPECT_TRUE(check_invariants(rg).empty());
  EXPECT_EQ(export_rg_dot(rg), test_support::read_file(test_support::data_path("golden/soccer.rg.dot")));
}

TEST(SynthesizeRoutes, ExtendedSoccerJoinAndMulticasts) {
  auto rg = rg_of(corpus("soccer_extended.lila"));
  auto target = find_label(rg, "translator(posAtShotOnGoal)");
  ASSERT_TRUE(target);
  auto preds = rg.predecessors(*target);
  ASSERT_EQ(preds.size(), 1u);
  EXPECT_EQ(rg.nodes[preds.front()].kind, RgKind::join_aggregator);
  EXPECT_EQ(rg.nodes[preds.front()].config.aggregator.completion_size, 2u);

  auto mc_after = [&](const std::string& label) {
    auto n = find_label(rg, label);
    EXPECT_TRUE(n) << label;
    return n && rg.nodes[only_successor(rg, *n)].kind == RgKind::multicast;
  };
  EXPECT_TRUE(mc_after("translator(gByP)"));
  auto pos_src = find_label(rg, "from(file:playerPosition.json)");
  ASSERT_TRUE(pos_src);
  EXPECT_EQ(rg.nodes[only_successor(rg, only_successor(rg, *pos_src))].kind, RgKind::multicast);
  EXPECT_TRUE(check_invariants(rg).empty());
  EXPECT_EQ(export_rg_dot(rg), test_support::read_file(test_support::data_path("golden/soccer_extended.rg.dot")));
}

TEST(SynthesizeRoutes, MinimalSourceToGoalIsOneRoute) {
  auto rg = rg_of("@from(file:in.json,json){p(x).}\n@to(file:out.json,json){p}\n");
  ASSERT_EQ(rg.routes.size(), 1u);
  EXPECT_EQ(route_kinds(rg, 0), (std::vector<RgKind>{RgKind::from_endpoint, RgKind::format_converter,
                                                     RgKind::message_filter, RgKind::format_converter,
                                                     RgKind::to_endpoint}));
  auto dot = export_rg_dot(rg);
  EXPECT_EQ(std::count(dot.begin(), dot.end(), '\n') > 0, true);
  EXPECT_EQ(dot.find("dashed"), std::string::npos);
  EXPECT_EQ(dot.find("cluster_1"), std::string::npos);
}

TEST(SynthesizeRoutes, ProcessorKindsAndSuffixNodes) {
  auto cf = rg_of(corpus("content_filter.lila"));
  EXPECT_EQ(count_kind(cf, RgKind::content_filter), 1u);
  auto rec = rg_of(corpus("synthetic/recursion.lila"));
  EXPECT_EQ(count_kind(rec, RgKind::translator), 1u);
  EXPECT_EQ(count_kind(rec, RgKind::content_filter), 0u);

  auto sa = rg_of(corpus("synthetic/split_aggregate.lila"));
  EXPECT_EQ(route_kinds(sa, 0),
            (std::vector<RgKind>{RgKind::from_endpoint, RgKind::format_converter, RgKind::splitter,
                                 RgKind::renaming_translator, RgKind::aggregator, RgKind::renaming_translator,
                                 RgKind::message_filter, RgKind::format_converter, RgKind::to_endpoint}));
}

TEST(SynthesizeRoutes, GoalFilterDiscardsEmptyMessages) {
  auto rg = rg_of(corpus("synthetic/multi_goal.lila"));
  auto filter = find_label(rg, "messageFilter(nonEmpty cheap,available)");
  ASSERT_TRUE(filter);
  const auto& conds = rg.nodes[*filter].config.conditions;
  ASSERT_EQ(conds.size(), 2u);
  EXPECT_EQ(conds[0].goal.to_string(), "cheap(X1)");
  EXPECT_EQ(conds[1].goal.to_string(), "available(X1,X2)");
}

TEST(RgExport, JsonIsDeterministicAndComplete) {
  auto rg = rg_of(corpus("soccer.lila"));
  auto text = export_rg_json(rg);
  EXPECT_EQ(text, export_rg_json(rg_of(corpus("soccer.lila"))));
  auto doc = nlohmann::json::parse(text);
  EXPECT_EQ(doc["nodes"].size(), rg.nodes.size());
  EXPECT_EQ(doc["routes"].size(), 4u);
  EXPECT_EQ(doc["links"].size(), rg.links.size());
  std::size_t listed = 0;
  for (const auto& r : doc["routes"]) listed += r["nodes"].size();
  EXPECT_EQ(listed, rg.nodes.size());
}

TEST(RgProperties, InvariantsOnCorpus) {
  for (const auto& name : corpus_programs()) {
    auto rg = rg_of(corpus(name));
    EXPECT_TRUE(check_invariants(rg).empty()) << name;
    for (const auto& [u, v] : rg.links) {
      EXPECT_EQ(rg.nodes[u].kind, RgKind::to_direct) << name;
      EXPECT_EQ(rg.nodes[v].kind, RgKind::from_direct) << name;
    }
  }
}

TEST(RgProperties, BrokenGraphsAreReported) {
  auto rg = rg_of(corpus("soccer.lila"));
  auto extra = rg;
  extra.edges.insert({0, 5});  // a channel edge across routes
  EXPECT_FALSE(check_invariants(extra).empty());
  auto dangling = rg;
  dangling.nodes[dangling.nodes_of(RgKind::to_direct).front()].config.uri = "direct:nowhere";
  EXPECT_FALSE(check_invariants(dangling).empty());
}

// Visiting order of independent sites does not change the graph.
TEST(RgProperties, ConfluenceUnderSiteOrder) {
  for (const auto& name : corpus_programs()) {
    auto g = ldg_of(corpus(name));
    auto base = canonical_form(synthesize_routes(g));
    for (unsigned seed = 1; seed <= 8; ++seed) {
      EXPECT_EQ(canonical_form(synthesize_routes(g, {seed})), base) << name << " seed " << seed;
    }
  }
  std::mt19937 rng(404);
  int checked = 0;
  for (int iter = 0; iter < 150; ++iter) {
    auto prog = test_support::random_lila(rng);
    ldg::Ldg g;
    try {
      g = ldg_of(prog.text);
    } catch (const Error&) {
      continue;
    }
    auto base = synthesize_routes(g);
    ASSERT_TRUE(check_invariants(base).empty()) << prog.text;
    // Every LDG node ends up in exactly one route.
    std::map<std::size_t, std::set<std::size_t>> routes;
    for (const auto& n : base.nodes) {
      if (n.origin) routes[*n.origin].insert(n.route);
    }
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if (g.nodes[i].kind == ldg::NodeKind::inline_facts) continue;
      EXPECT_EQ(routes[i].size(), 1u) << g.nodes[i].label() << "\n" << prog.text;
    }
    for (unsigned seed = 1; seed <= 3; ++seed) {
      ASSERT_EQ(canonical_form(synthesize_routes(g, {seed})), canonical_form(base)) << prog.text;
    }
    ++checked;
  }
  EXPECT_GT(checked, 100);
}
