#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lila/cdm/message.hpp"
#include "lila/diagnostics.hpp"

namespace lila::bench {

/// n messages with body match("true") / match("false") alternating, starting
/// with "true", each declaring meta("match","matching",1).
std::vector<cdm::MessagePtr> gen_single_fact_messages(std::size_t n);

/// One message with facts match("true",1), match("false",2), ... up to f,
/// declaring matching and count.
cdm::MessagePtr gen_multi_fact_message(std::size_t f);

enum class ScenarioKind {
  message_filter,  // size = number of single-fact messages
  content_filter,  // size = facts in one message
};

/// Program text the ILP side of a scenario is compiled from.
const std::string& scenario_program(ScenarioKind kind);
std::string scenario_name(ScenarioKind kind);
/// "message-filter" / "content-filter"; throws BenchError otherwise.
ScenarioKind parse_scenario(const std::string& name);

struct BenchScenario {
  ScenarioKind kind = ScenarioKind::message_filter;
  std::vector<std::size_t> sizes;
  std::size_t repetitions = 5;
  std::size_t warmup = 2;
};

class BenchError : public Error {
 public:
  using Error::Error;
};

struct BenchResult {
  std::string scenario;
  std::vector<std::size_t> sizes;
  std::vector<double> ilp_millis;  // median per size
  std::vector<double> baseline_millis;
  /// Facts let through at each size (same for both pipelines).
  std::vector<std::size_t> passed;

  /// median[i+1] / median[i]; empty for a single size.
  std::vector<double> ilp_ratios() const;
  std::vector<double> baseline_ratios() const;
};

/// Output of either pipeline: match-filtered facts, one entry per occurrence.
using FactBag = std::vector<std::string>;

/// The synthesized route without endpoints, applied to every input message.
FactBag run_ilp(ScenarioKind kind, const std::vector<cdm::MessagePtr>& input);
/// Direct iteration over the same messages.
FactBag run_baseline(ScenarioKind kind, const std::vector<cdm::MessagePtr>& input);

/// Throws BenchError on an invalid scenario (repetitions < 5, warmup < 2,
/// no sizes, sizes not strictly increasing, size 0) and when the two
/// pipelines disagree on any input.
BenchResult run_bench(const BenchScenario& scenario);

/// True when every ratio lies in [lo, hi].
bool within_band(const std::vector<double>& ratios, double lo = 1.5, double hi = 3.0);

/// scenario,size,medianMillis,pipeline rows, ilp before baseline per size.
std::string emit_report(const std::vector<BenchResult>& results);
/// Whitespace-separated columns (size ilp baseline), one block per scenario.
std::string emit_gnuplot(const std::vector<BenchResult>& results);

}  // namespace lila::bench
