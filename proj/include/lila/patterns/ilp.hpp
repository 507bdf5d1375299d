#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lila/cdm/message.hpp"
#include "lila/datalog/ast.hpp"
#include "lila/datalog/evaluate.hpp"
#include "lila/diagnostics.hpp"

namespace lila::patterns {

using cdm::Message;
using datalog::Atom;
using datalog::FactSet;
using datalog::Rule;

/// Supporting rules plus the goal query whose answers decide the condition.
struct Condition {
  std::vector<Rule> rules;
  Atom goal;
};

struct Channel {
  std::string id;
  Condition condition;
};

struct RoutingCondition {
  std::vector<Channel> channels;
};

using ChannelFacts = std::vector<std::pair<std::string, FactSet>>;

class ExclusivityViolation : public Error {
 public:
  using Error::Error;
};
class AggregationError : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Goal answers over body plus channel rules, per channel. Evaluation errors
/// are rethrown with the channel id prepended.
ChannelFacts ilp_rc(const Message& message, const RoutingCondition& conds);
std::vector<std::pair<std::string, bool>> help_rc(const ChannelFacts& per_channel);
/// The single channel whose condition holds; ExclusivityViolation otherwise.
std::string content_based_route(const Message& message, const RoutingCondition& conds);

/// The message itself when the goal has answers, nothing otherwise.
std::optional<Message> message_filter(const Message& message, const Condition& cond);

/// Receiver keys from a unary-headed rule, distinct and sorted.
std::vector<std::string> rd_ilp(const Message& message, const Rule& rule);

struct SplitConfig {
  std::vector<Atom> queries;
};

/// One message per query with answers, body = the answers, header copied.
/// Predicates keep their names (see sc_ilp for the suffixed form).
std::vector<Message> split_raw(const Message& message, const SplitConfig& split);
/// split_raw followed by the `-split` renaming.
std::vector<Message> sc_ilp(const Message& message, const SplitConfig& split);

enum class Strategy { union_ };

struct AggregatorConfig {
  Strategy strategy = Strategy::union_;
  std::optional<std::size_t> completion_size;
  std::optional<std::int64_t> completion_millis;
  std::vector<Atom> correlation;
};

/// Per-query nonemptiness over the message body.
std::vector<bool> crc_ilp(const Message& message, const AggregatorConfig& cfg);
bool cpc_ilp(std::size_t collection_size, const AggregatorConfig& cfg, std::int64_t elapsed_millis);
bool cpc_ilp(const std::vector<Message>& collection, const AggregatorConfig& cfg,
             std::int64_t elapsed_millis);

/// Union of bodies and meta-facts; properties first-writer-wins, conflicting
/// values reported in `warnings`. Conflicting meta-facts throw.
Message union_raw(const std::vector<Message>& collection, Diagnostics* warnings = nullptr);
/// union_raw followed by the `-aggregate` renaming.
Message as_ilp(const std::vector<Message>& collection, Diagnostics* warnings = nullptr);

/// Body := facts of `exposed` in evaluate(body ∪ mapping). Meta-facts of
/// exposed predicates come from the input header when present, else from the
/// variable names of the first rule producing the predicate.
Message mt_ilp(const Message& message, const std::vector<Rule>& mapping,
               const std::vector<std::string>& exposed);
/// Same with a precompiled rule set.
Message mt_ilp(const Message& message, const datalog::RuleSet& mapping,
               const std::vector<std::string>& exposed);

/// Parameter names for `predicate` taken from the first rule with that head;
/// positions holding constants or repeated variables become arg<i>.
std::vector<std::string> head_parameter_names(const std::vector<Rule>& rules,
                                              const std::string& predicate);

struct EnrichData {
  datalog::Program program;
  cdm::MetaFacts meta;
};

/// Body ∪ data (facts and rules); meta-facts merged, conflicts throw.
Message ep_ilp(const Message& message, const EnrichData& data);

/// Renames every predicate of body facts, rules, queries and meta-facts.
Message rename_predicates(const Message& message, const std::string& suffix);
std::string suffixed(const std::string& predicate, const std::string& suffix);

inline constexpr const char* split_suffix = "-split";
inline constexpr const char* aggregate_suffix = "-aggregate";

}  // namespace lila::patterns
