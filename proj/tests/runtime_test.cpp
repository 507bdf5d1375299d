#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <random>
#include <thread>

#include <json.hpp>

#include "lila/cdm/convert.hpp"
#include "lila/datalog/evaluate.hpp"
#include "lila/lang/program.hpp"
#include "lila/runtime/engine.hpp"
#include "lila/synth/route_graph.hpp"
#include "support/files.hpp"
#include "support/random_lila.hpp"

using namespace lila;
using namespace lila::runtime;
using test_support::corpus;
using test_support::TempDir;

namespace {

synth::RouteGraph rg_of(const std::string& text, const std::map<std::string, std::string>& bind = {}) {
  return synth::compile(lang::resolve_config(lang::parse(text), bind));
}

synth::RouteGraph soccer_rg() { return rg_of(corpus("soccer.lila"), {{"config", "tweets"}}); }

datalog::FactSet facts_of(const std::vector<std::string>& payloads) {
  datalog::FactSet out;
  for (const auto& p : payloads) out.merge(cdm::to_cdm(p, {cdm::Format::datalog, {}}).body.facts);
  return out;
}

std::multiset<std::string> all_sink_payloads(const RunReport& r) {
  std::multiset<std::string> out;
  for (const auto& s : r.sinks) {
    for (const auto& p : s.payloads) out.insert(s.uri + " " + p);
  }
  return out;
}

void expect_conserved(const RunReport& r) {
  EXPECT_EQ(r.consumed, r.produced + r.dropped + r.errored);
}

}  // namespace

TEST(EndpointUri, Schemes) {
  EXPECT_EQ(EndpointUri::parse("file:a/b.json").scheme, Scheme::file);
  EXPECT_EQ(EndpointUri::parse("file:a/b.json").path, "a/b.json");
  EXPECT_EQ(EndpointUri::parse("playersAtBall.json").scheme, Scheme::file);
  EXPECT_EQ(EndpointUri::parse("mock:out").path, "out");
  EXPECT_EQ(EndpointUri::parse("direct:gByP").scheme, Scheme::direct);
  auto tw = EndpointUri::parse("twitter:tweets");
  EXPECT_EQ(tw.scheme, Scheme::mock);
  EXPECT_EQ(tw.path, "tweets");
}

TEST(DirectChannels, FifoAndWiring) {
  auto rg = soccer_rg();
  DirectChannels ch(rg);
  const std::string name = rg.nodes[rg.nodes_of(synth::RgKind::from_direct).front()].config.uri;
  for (int i = 0; i < 3; ++i) {
    Exchange ex;
    ex.trace_id = "t" + std::to_string(i);
    ch.send_direct(name, ex);
  }
  EXPECT_EQ(ch.pending(name), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(ch.receive_direct(name)->trace_id, "t" + std::to_string(i));
  EXPECT_FALSE(ch.receive_direct(name));
  EXPECT_THROW(ch.send_direct("direct:nowhere", Exchange{}), WiringError);
}

TEST(Run, SoccerEndToEnd) {
  TempDir dir;
  dir.copy_fixture("soccer");
  for (bool parallel : {false, true}) {
    RunOptions o;
    o.base_dir = dir.path();
    o.parallel = parallel;
    auto r = run(soccer_rg(), o);
    ASSERT_EQ(r.mock_sink("tweets").size(), 1u);
    EXPECT_EQ(nlohmann::json::parse(r.mock_sink("tweets")[0]),
              nlohmann::json::parse(R"([{"period":1,"time":10,"firstN":"A","lastN":"B"}])"));
    EXPECT_EQ(nlohmann::json::parse(test_support::read_file((dir / "playersAtBall.json").string())),
              nlohmann::json::parse(R"([{"period":1,"time":20,"firstN":"C","lastN":"D"}])"));
    EXPECT_EQ(r.consumed, 1u);
    EXPECT_EQ(r.produced, 1u);
    EXPECT_EQ(r.records_consumed, 2u);
    EXPECT_EQ(r.records_produced, 2u);
    EXPECT_TRUE(r.dead_letters.empty());
    expect_conserved(r);
  }
}

TEST(Run, EmptyInputProducesNothing) {
  TempDir dir;
  dir.copy_fixture("soccer");
  RunOptions o;
  o.base_dir = dir.path();
  o.inputs["file:gameEvents.json"] = {"[]"};
  auto r = run(soccer_rg(), o);
  EXPECT_TRUE(r.mock_sink("tweets").empty());
  EXPECT_FALSE(std::filesystem::exists(dir / "playersAtBall.json"));
  EXPECT_EQ(r.consumed, 1u);
  EXPECT_EQ(r.dropped, 1u);
  expect_conserved(r);
}

TEST(Run, ExtendedSoccerJoinsPositions) {
  TempDir dir;
  dir.copy_fixture("soccer_extended");
  auto rg = rg_of(corpus("soccer_extended.lila"), {{"config", "tweets"}});
  RunOptions o;
  o.base_dir = dir.path();
  auto r = run(rg, o);
  auto out = r.sink("file:positionAtShotOnGoal");
  ASSERT_EQ(out.size(), 1u) << r.to_json(rg);
  EXPECT_NE(out[0].find("posAtShotOnGoal(1,1300,\"A\",\"B\",30,40)."), std::string::npos) << out[0];
  expect_conserved(r);
}

TEST(Run, SplitThenAggregateRestoresMessage) {
  RunOptions o;
  o.mock_inputs["in"] = {"a(1). b(2)."};
  auto r = run(rg_of(corpus("synthetic/split_aggregate.lila")), o);
  auto out = r.mock_sink("out");
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(facts_of(out), (datalog::FactSet{{"a-split-aggregate", {datalog::Value{1}}},
                                             {"b-split-aggregate", {datalog::Value{2}}}}));
  expect_conserved(r);
}

TEST(Run, TimeAggregatorFlushesAtEndOfBatch) {
  RunOptions o;
  o.mock_inputs["ticks"] = {R"([{"n":1}])", R"([{"n":2}])", R"([{"n":3}])"};
  auto r = run(rg_of(corpus("synthetic/aggregate_time.lila")), o);
  auto out = r.mock_sink("batches");
  ASSERT_FALSE(out.empty());
  std::set<int> seen;
  for (const auto& p : out) {
    for (const auto& rec : nlohmann::json::parse(p)) seen.insert(rec["n"].get<int>());
  }
  EXPECT_EQ(seen, (std::set<int>{1, 2, 3}));
  EXPECT_EQ(r.produced, 3u);
  expect_conserved(r);
}

TEST(Run, EnricherFromFileBeforeSingleConsumer) {
  TempDir dir;
  dir.copy_fixture("synthetic");
  RunOptions o;
  o.base_dir = dir.path();
  o.mock_inputs["sales"] = {R"([{"product":"apple","qty":2},{"product":"plum","qty":1}])"};
  auto r = run(rg_of(corpus("synthetic/enrich_single.lila")), o);
  ASSERT_EQ(r.mock_sink("revenue").size(), 1u);
  EXPECT_EQ(nlohmann::json::parse(r.mock_sink("revenue")[0]),
            nlohmann::json::parse(R"([{"product":"apple","total":6}])"));
}

TEST(Run, EnricherAfterProducer) {
  TempDir dir;
  dir.copy_fixture("synthetic");
  RunOptions o;
  o.base_dir = dir.path();
  o.mock_inputs["people"] = {R"([{"id":1,"name":"Ada"}])"};
  auto r = run(rg_of(corpus("synthetic/enrich_after.lila")), o);
  ASSERT_EQ(r.mock_sink("greetings").size(), 1u);
  std::set<std::string> names;
  for (const auto& rec : nlohmann::json::parse(r.mock_sink("greetings")[0])) names.insert(rec["name"]);
  EXPECT_EQ(names, (std::set<std::string>{"Ada", "Kari", "Ola"}));
}

TEST(Run, DirectorySinkGetsOneFilePerPayload) {
  TempDir dir;
  auto rg = rg_of(corpus("message_filter.lila"));
  RunOptions o;
  o.base_dir = dir.path();
  o.inputs["file:data/testMessageFilter"] = {R"([{"matching":"true"}])", R"([{"matching":"false"}])",
                                             R"([{"matching":"true"}])"};
  auto r = run(rg, o);
  EXPECT_EQ(r.produced, 2u);
  EXPECT_EQ(r.dropped, 1u);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "data/filtered")) {
    ++files;
    EXPECT_EQ(facts_of({test_support::read_file(e.path().string())}),
              (datalog::FactSet{{"match-filtered", {datalog::Value{"true"}}}}));
  }
  EXPECT_EQ(files, 2u);
}

TEST(Run, FailedPayloadBecomesDeadLetter) {
  TempDir dir;
  dir.copy_fixture("soccer");
  RunOptions o;
  o.base_dir = dir.path();
  o.dead_letter_dir = dir / "dead";
  o.trace_hops = true;
  o.inputs["file:gameEvents.json"] = {"[{\"period\":1", test_support::read_file((dir / "gameEvents.json").string())};
  auto r = run(soccer_rg(), o);
  EXPECT_EQ(r.consumed, 2u);
  EXPECT_EQ(r.errored, 1u);
  EXPECT_EQ(r.produced, 1u);
  expect_conserved(r);
  ASSERT_EQ(r.dead_letters.size(), 1u);
  const auto& d = r.dead_letters[0];
  EXPECT_EQ(d.payload, "[{\"period\":1");
  auto doc = nlohmann::json::parse(test_support::read_file((dir / "dead" / (d.trace_id + ".json")).string()));
  EXPECT_EQ(doc["traceId"], d.trace_id);
  EXPECT_EQ(doc["payload"], d.payload);
  EXPECT_FALSE(doc["error"].get<std::string>().empty());
  EXPECT_FALSE(doc["hops"].empty());
  EXPECT_EQ(r.mock_sink("tweets").size(), 1u);
}

TEST(Run, SplitArraysGivesOnePayloadPerRecord) {
  TempDir dir;
  dir.copy_fixture("soccer");
  RunOptions o;
  o.base_dir = dir.path();
  o.split_arrays = true;
  auto r = run(soccer_rg(), o);
  EXPECT_EQ(r.consumed, 2u);
  EXPECT_EQ(r.mock_sink("tweets").size(), 1u);
  expect_conserved(r);
}

TEST(Run, ReportJson) {
  TempDir dir;
  dir.copy_fixture("soccer");
  RunOptions o;
  o.base_dir = dir.path();
  auto rg = soccer_rg();
  auto doc = nlohmann::json::parse(run(rg, o).to_json(rg));
  EXPECT_EQ(doc["consumed"], 1);
  EXPECT_EQ(doc["recordsProduced"], 2);
  EXPECT_EQ(doc["nodes"].size(), rg.nodes.size());
}

TEST(Run, WatchModePicksUpChangedFile) {
  TempDir dir;
  dir.copy_fixture("soccer");
  RunOptions o;
  o.base_dir = dir.path();
  o.mode = Mode::watch;
  o.poll_millis = 20;
  auto start = std::chrono::steady_clock::now();
  bool rewritten = false;
  o.stop = [&] {
    auto elapsed = std::chrono::steady_clock::now() - start;
    if (!rewritten && elapsed > std::chrono::milliseconds(100)) {
      std::filesystem::last_write_time(dir / "gameEvents.json",
                                       std::filesystem::file_time_type::clock::now() + std::chrono::seconds(5));
      rewritten = true;
    }
    return elapsed > std::chrono::milliseconds(400);
  };
  auto r = run(soccer_rg(), o);
  EXPECT_EQ(r.consumed, 2u);
  EXPECT_EQ(r.mock_sink("tweets").size(), 2u);
}

TEST(Pipeline, MessageFilterRoute) {
  auto rg = rg_of(corpus("message_filter.lila"));
  Pipeline p(rg);
  EXPECT_EQ(p.kinds(), (std::vector<synth::RgKind>{synth::RgKind::content_filter, synth::RgKind::message_filter}));
  auto spec = lang::format_spec(lang::parse(corpus("message_filter.lila")).annotations.front());
  auto keep = cdm::share(cdm::to_cdm(R"([{"matching":"true"}])", spec));
  auto drop = cdm::share(cdm::to_cdm(R"([{"matching":"false"}])", spec));
  EXPECT_EQ(p.process(keep).size(), 1u);
  EXPECT_TRUE(p.process(drop).empty());
}

// Messages and the facts they reach do not depend on scheduling.
TEST(RuntimeProperties, ParallelMatchesSequential) {
  std::mt19937 rng(77);
  int checked = 0;
  for (int iter = 0; iter < 60; ++iter) {
    auto prog = test_support::random_lila(rng);
    synth::RouteGraph rg;
    try {
      rg = rg_of(prog.text);
    } catch (const Error&) {
      continue;
    }
    TempDir dir;
    for (const auto& [f, text] : prog.files) test_support::write_file(dir / f, text);
    RunOptions o;
    o.base_dir = dir.path();
    o.mock_inputs = prog.mock_inputs;
    o.parallel = false;
    auto seq = run(rg, o);
    o.parallel = true;
    o.workers = 4;
    auto par = run(rg, o);
    EXPECT_EQ(all_sink_payloads(seq), all_sink_payloads(par)) << prog.text;
    EXPECT_EQ(seq.produced, par.produced);
    expect_conserved(seq);
    expect_conserved(par);
    ++checked;
  }
  EXPECT_GT(checked, 40);
}

// The synthesized routes compute what the program computes in one piece.
TEST(RuntimeProperties, SemanticsPreserved) {
  std::mt19937 rng(2024);
  int checked = 0;
  for (int iter = 0; iter < 120; ++iter) {
    auto prog = test_support::random_lila(rng);
    synth::RouteGraph rg;
    try {
      rg = rg_of(prog.text);
    } catch (const Error&) {
      continue;
    }
    datalog::Program mono;
    mono.facts = prog.facts;
    mono.rules = prog.rules;
    auto expected = datalog::evaluate(mono);
    TempDir dir;
    for (const auto& [f, text] : prog.files) test_support::write_file(dir / f, text);
    RunOptions o;
    o.base_dir = dir.path();
    o.mock_inputs = prog.mock_inputs;
    auto r = run(rg, o);
    EXPECT_TRUE(r.dead_letters.empty()) << prog.text;
    for (const auto& [goal, exposed] : prog.goals) {
      auto want = expected.restricted_to({exposed.begin(), exposed.end()});
      auto got = r.mock_sink(goal);
      if (want.empty()) {
        EXPECT_TRUE(got.empty()) << goal << "\n" << prog.text;
      } else {
        EXPECT_EQ(facts_of(got), want) << goal << "\n" << prog.text;
      }
    }
    ++checked;
  }
  EXPECT_GT(checked, 80);
}
