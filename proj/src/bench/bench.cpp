#include "lila/bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <sstream>

#include "lila/lang/program.hpp"
#include "lila/runtime/engine.hpp"
#include "lila/synth/route_graph.hpp"

namespace lila::bench {

namespace {

const std::string filtered = "match-filtered";

cdm::Message with_meta(std::vector<std::string> names) {
  cdm::Message m;
  cdm::declare(m.header.meta, "match", names);
  return m;
}

const runtime::Pipeline& pipeline(ScenarioKind kind) {
  // Compiled once; Pipeline is immutable after construction.
  static const runtime::Pipeline filter(synth::compile(lang::parse(scenario_program(ScenarioKind::message_filter))));
  static const runtime::Pipeline content(synth::compile(lang::parse(scenario_program(ScenarioKind::content_filter))));
  return kind == ScenarioKind::message_filter ? filter : content;
}

std::vector<cdm::MessagePtr> ilp_outputs(ScenarioKind kind, const std::vector<cdm::MessagePtr>& input) {
  const auto& p = pipeline(kind);
  std::vector<cdm::MessagePtr> out;
  for (const auto& m : input) {
    for (auto& o : p.process(m)) out.push_back(std::move(o));
  }
  return out;
}

std::vector<cdm::MessagePtr> baseline_outputs(ScenarioKind kind, const std::vector<cdm::MessagePtr>& input) {
  static const datalog::Value yes{"true"};
  std::vector<cdm::MessagePtr> out;
  for (const auto& m : input) {
    cdm::Message o;
    for (const auto& t : m->body.facts.relation("match")) {
      if (t.empty() || t.front() != yes) continue;
      if (kind == ScenarioKind::message_filter) {
        o.body.facts.insert(filtered, {yes});
      } else if (t.size() == 2) {
        o.body.facts.insert(filtered, t);
      }
    }
    if (o.body.facts.empty()) continue;
    o.header.meta = cdm::rename_meta(m->header.meta, [](const std::string&) { return filtered; });
    out.push_back(cdm::share(std::move(o)));
  }
  return out;
}

FactBag bag_of(const std::vector<cdm::MessagePtr>& messages) {
  FactBag out;
  for (const auto& m : messages) {
    for (const auto& t : m->body.facts.relation(filtered)) out.push_back(datalog::Fact{filtered, t}.to_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<cdm::MessagePtr> input_for(ScenarioKind kind, std::size_t size) {
  if (kind == ScenarioKind::message_filter) return gen_single_fact_messages(size);
  return {gen_multi_fact_message(size)};
}

template <typename Fn>
double median_millis(const BenchScenario& s, Fn&& fn) {
  for (std::size_t i = 0; i < s.warmup; ++i) fn();
  std::vector<double> times;
  for (std::size_t i = 0; i < s.repetitions; ++i) {
    auto start = std::chrono::steady_clock::now();
    fn();
    times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(times.begin(), times.end());
  auto n = times.size();
  return n % 2 ? times[n / 2] : (times[n / 2 - 1] + times[n / 2]) / 2;
}

std::vector<double> ratios(const std::vector<double>& medians) {
  std::vector<double> out;
  for (std::size_t i = 1; i < medians.size(); ++i) {
    out.push_back(medians[i - 1] > 0 ? medians[i] / medians[i - 1] : 0.0);
  }
  return out;
}

void validate(const BenchScenario& s) {
  auto bad = [](const std::string& what) { throw BenchError(make_error("bench", what)); };
  if (s.repetitions < 5) bad("at least 5 repetitions are required");
  if (s.warmup < 2) bad("at least 2 warmup runs are required");
  if (s.sizes.empty()) bad("no sizes given");
  for (std::size_t i = 0; i < s.sizes.size(); ++i) {
    if (s.sizes[i] == 0) bad("sizes must be positive");
    if (i > 0 && s.sizes[i] <= s.sizes[i - 1]) bad("sizes must be strictly increasing");
  }
}

}  // namespace

std::vector<cdm::MessagePtr> gen_single_fact_messages(std::size_t n) {
  std::vector<cdm::MessagePtr> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto m = with_meta({"matching"});
    m.body.facts.insert("match", {datalog::Value{i % 2 == 0 ? "true" : "false"}});
    out.push_back(cdm::share(std::move(m)));
  }
  return out;
}

cdm::MessagePtr gen_multi_fact_message(std::size_t f) {
  auto m = with_meta({"matching", "count"});
  for (std::size_t i = 0; i < f; ++i) {
    m.body.facts.insert("match", {datalog::Value{i % 2 == 0 ? "true" : "false"},
                                  datalog::Value{static_cast<long long>(i + 1)}});
  }
  return cdm::share(std::move(m));
}

const std::string& scenario_program(ScenarioKind kind) {
  static const std::string filter =
      "@from(mock:messages,json)\n{match(matching).}\n"
      "match-filtered(matching):-match(\"true\").\n"
      "@to(mock:filtered,json)\n{match-filtered}\n";
  static const std::string content =
      "@from(mock:messages,json)\n{match(matching,count).}\n"
      "match-filtered(matching,count):-match(\"true\",count).\n"
      "@to(mock:filtered,json)\n{match-filtered}\n";
  return kind == ScenarioKind::message_filter ? filter : content;
}

std::string scenario_name(ScenarioKind kind) {
  return kind == ScenarioKind::message_filter ? "message-filter" : "content-filter";
}

ScenarioKind parse_scenario(const std::string& name) {
  if (name == "message-filter") return ScenarioKind::message_filter;
  if (name == "content-filter") return ScenarioKind::content_filter;
  throw BenchError(make_error("bench", "unknown scenario '" + name + "' (message-filter, content-filter)"));
}

std::vector<double> BenchResult::ilp_ratios() const { return ratios(ilp_millis); }
std::vector<double> BenchResult::baseline_ratios() const { return ratios(baseline_millis); }

FactBag run_ilp(ScenarioKind kind, const std::vector<cdm::MessagePtr>& input) {
  return bag_of(ilp_outputs(kind, input));
}

FactBag run_baseline(ScenarioKind kind, const std::vector<cdm::MessagePtr>& input) {
  return bag_of(baseline_outputs(kind, input));
}

BenchResult run_bench(const BenchScenario& s) {
  validate(s);
  BenchResult r;
  r.scenario = scenario_name(s.kind);
  r.sizes = s.sizes;
  for (auto size : s.sizes) {
    auto input = input_for(s.kind, size);
    auto ilp = run_ilp(s.kind, input);
    auto base = run_baseline(s.kind, input);
    if (ilp != base) {
      throw BenchError(make_error("result-mismatch", r.scenario + " at size " + std::to_string(size) + ": ILP gave " +
                                                         std::to_string(ilp.size()) + " facts, baseline " +
                                                         std::to_string(base.size())));
    }
    r.passed.push_back(ilp.size());
    r.ilp_millis.push_back(median_millis(s, [&] { return ilp_outputs(s.kind, input); }));
    r.baseline_millis.push_back(median_millis(s, [&] { return baseline_outputs(s.kind, input); }));
  }
  return r;
}

bool within_band(const std::vector<double>& ratios, double lo, double hi) {
  return std::all_of(ratios.begin(), ratios.end(), [&](double x) { return x >= lo && x <= hi; });
}

std::string emit_report(const std::vector<BenchResult>& results) {
  std::ostringstream out;
  out << "scenario,size,medianMillis,pipeline\n" << std::fixed << std::setprecision(3);
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.sizes.size(); ++i) {
      out << r.scenario << ',' << r.sizes[i] << ',' << r.ilp_millis[i] << ",ilp\n";
      out << r.scenario << ',' << r.sizes[i] << ',' << r.baseline_millis[i] << ",baseline\n";
    }
  }
  return out.str();
}

std::string emit_gnuplot(const std::vector<BenchResult>& results) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  bool first = true;
  for (const auto& r : results) {
    if (!first) out << "\n\n";  // gnuplot index separator
    first = false;
    out << "# " << r.scenario << "\n# size ilp baseline\n";
    for (std::size_t i = 0; i < r.sizes.size(); ++i) {
      out << r.sizes[i] << ' ' << r.ilp_millis[i] << ' ' << r.baseline_millis[i] << '\n';
    }
  }
  return out.str();
}

}  // namespace lila::bench
