#include <gtest/gtest.h>

#include <algorithm>

#include "lila/bench/bench.hpp"

using namespace lila;
using namespace lila::bench;

namespace {

std::size_t count_true(const std::vector<cdm::MessagePtr>& ms) {
  std::size_t n = 0;
  for (const auto& m : ms) n += m->body.facts.contains("match", {datalog::Value{"true"}});
  return n;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

BenchResult fake(const std::string& name, std::size_t sizes) {
  BenchResult r;
  r.scenario = name;
  for (std::size_t i = 0; i < sizes; ++i) {
    r.sizes.push_back(100 << i);
    r.ilp_millis.push_back(1.0 * (1 << i));
    r.baseline_millis.push_back(0.5 * (1 << i));
  }
  return r;
}

}  // namespace

TEST(GenSingleFact, Alternates) {
  auto two = gen_single_fact_messages(2);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_TRUE(two[0]->body.facts.contains("match", {datalog::Value{"true"}}));
  EXPECT_TRUE(two[1]->body.facts.contains("match", {datalog::Value{"false"}}));
  EXPECT_EQ(cdm::parameter_names(two[0]->header.meta, "match"), (std::vector<std::string>{"matching"}));

  auto one = gen_single_fact_messages(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(count_true(one), 1u);

  auto many = gen_single_fact_messages(10000);
  EXPECT_EQ(count_true(many), 5000u);
  for (const auto& m : many) EXPECT_EQ(m->body.facts.size(), 1u);
}

TEST(GenMultiFact, MatchesDeclaredBody) {
  auto two = gen_multi_fact_message(2);
  EXPECT_EQ(two->body.facts, (datalog::FactSet{{"match", {datalog::Value{"true"}, datalog::Value{1}}},
                                               {"match", {datalog::Value{"false"}, datalog::Value{2}}}}));
  EXPECT_EQ(cdm::parameter_names(two->header.meta, "match"), (std::vector<std::string>{"matching", "count"}));
  EXPECT_EQ(gen_multi_fact_message(1)->body.facts.size(), 1u);
  auto big = gen_multi_fact_message(1000);
  std::size_t matching = 0;
  for (const auto& t : big->body.facts.relation("match")) matching += t[0] == datalog::Value{"true"};
  EXPECT_EQ(matching, 500u);
}

TEST(Pipelines, AgreeAndSelectHalf) {
  for (std::size_t n : {1u, 2u, 7u, 100u}) {
    auto input = gen_single_fact_messages(n);
    auto ilp = run_ilp(ScenarioKind::message_filter, input);
    EXPECT_EQ(ilp, run_baseline(ScenarioKind::message_filter, input));
    EXPECT_EQ(ilp.size(), (n + 1) / 2);
  }
  for (std::size_t f : {1u, 2u, 9u, 100u}) {
    std::vector<cdm::MessagePtr> input{gen_multi_fact_message(f)};
    auto ilp = run_ilp(ScenarioKind::content_filter, input);
    EXPECT_EQ(ilp, run_baseline(ScenarioKind::content_filter, input));
    EXPECT_EQ(ilp.size(), (f + 1) / 2);
  }
  std::vector<cdm::MessagePtr> two{gen_multi_fact_message(2)};
  EXPECT_EQ(run_ilp(ScenarioKind::content_filter, two), (FactBag{"match-filtered(\"true\",1)."}));
}

TEST(RunBench, ProducesMediansAndRatios) {
  BenchScenario s;
  s.sizes = {50, 100, 200};
  auto r = run_bench(s);
  EXPECT_EQ(r.scenario, "message-filter");
  EXPECT_EQ(r.ilp_millis.size(), 3u);
  EXPECT_EQ(r.baseline_millis.size(), 3u);
  EXPECT_EQ(r.passed, (std::vector<std::size_t>{25, 50, 100}));
  EXPECT_EQ(r.ilp_ratios().size(), 2u);

  s.kind = ScenarioKind::content_filter;
  s.sizes = {10};
  auto single = run_bench(s);
  EXPECT_TRUE(single.ilp_ratios().empty());
  EXPECT_EQ(single.passed, (std::vector<std::size_t>{5}));
}

TEST(RunBench, RejectsInvalidScenarios) {
  BenchScenario s;
  s.sizes = {10, 20};
  auto bad = s;
  bad.repetitions = 4;
  EXPECT_THROW(run_bench(bad), BenchError);
  bad = s;
  bad.warmup = 1;
  EXPECT_THROW(run_bench(bad), BenchError);
  bad = s;
  bad.sizes = {20, 20};
  EXPECT_THROW(run_bench(bad), BenchError);
  bad.sizes = {};
  EXPECT_THROW(run_bench(bad), BenchError);
  bad.sizes = {0, 1};
  EXPECT_THROW(run_bench(bad), BenchError);
  EXPECT_THROW(parse_scenario("router"), BenchError);
  EXPECT_EQ(parse_scenario("content-filter"), ScenarioKind::content_filter);
}

TEST(Report, CsvRows) {
  EXPECT_EQ(emit_report({}), "scenario,size,medianMillis,pipeline\n");
  auto one = emit_report({fake("message-filter", 4)});
  EXPECT_EQ(count_lines(one), 1u + 8u);
  EXPECT_NE(one.find("message-filter,100,1.000,ilp\n"), std::string::npos);
  EXPECT_NE(one.find("message-filter,100,0.500,baseline\n"), std::string::npos);
  auto two = emit_report({fake("message-filter", 4), fake("content-filter", 4)});
  EXPECT_EQ(count_lines(two), 1u + 16u);
  EXPECT_EQ(two, emit_report({fake("message-filter", 4), fake("content-filter", 4)}));
  auto plot = emit_gnuplot({fake("message-filter", 2), fake("content-filter", 2)});
  EXPECT_NE(plot.find("200 2.000 1.000\n"), std::string::npos);
  EXPECT_NE(plot.find("\n\n\n# content-filter"), std::string::npos);
}

TEST(Report, Band) {
  EXPECT_TRUE(within_band({}));
  EXPECT_TRUE(within_band({1.5, 2.0, 3.0}));
  EXPECT_FALSE(within_band({1.49}));
  EXPECT_FALSE(within_band({2.0, 3.01}));
  EXPECT_EQ(fake("x", 3).ilp_ratios(), (std::vector<double>{2.0, 2.0}));
}
