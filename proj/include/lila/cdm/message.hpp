#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lila/datalog/ast.hpp"

namespace lila::cdm {

/// meta(predicate, name, position): names the position-th argument (1-based).
struct MetaFact {
  std::string predicate;
  std::string name;
  std::size_t position = 1;

  friend bool operator==(const MetaFact&, const MetaFact&) = default;
  friend auto operator<=>(const MetaFact&, const MetaFact&) = default;
};

using MetaFacts = std::set<MetaFact>;

struct Header {
  MetaFacts meta;
  std::map<std::string, std::string> properties;

  friend bool operator==(const Header&, const Header&) = default;
};

/// Canonical message: meta-facts and properties in the header, a Datalog
/// program as body. Shared between pipeline stages as MessagePtr and never
/// modified after it is emitted.
struct Message {
  Header header;
  datalog::Program body;

  friend bool operator==(const Message&, const Message&) = default;
};

using MessagePtr = std::shared_ptr<const Message>;

inline MessagePtr share(Message m) { return std::make_shared<const Message>(std::move(m)); }

/// Parameter names of `predicate` ordered by position; empty if undeclared.
std::vector<std::string> parameter_names(const MetaFacts& meta, const std::string& predicate);
void declare(MetaFacts& meta, const std::string& predicate, const std::vector<std::string>& names);
std::set<std::string> described_predicates(const MetaFacts& meta);

/// Positions of a predicate contiguous from 1 with unique names; returns a
/// description of the first violation.
std::optional<std::string> check_meta(const MetaFacts& meta);

/// Adds `from` into `into`; a predicate described differently on the two
/// sides is a conflict and leaves `into` untouched for that predicate.
/// Returns the conflicting predicates.
std::vector<std::string> merge_meta(MetaFacts& into, const MetaFacts& from);

template <typename Fn>
MetaFacts rename_meta(const MetaFacts& meta, Fn&& rename) {
  MetaFacts out;
  for (const auto& m : meta) out.insert({rename(m.predicate), m.name, m.position});
  return out;
}

/// meta("p","name",i) facts as Datalog.
datalog::FactSet meta_facts(const MetaFacts& meta);
/// Removes meta/3 facts from `facts` and returns them as MetaFacts.
MetaFacts lift_meta(datalog::FactSet& facts);

/// True when a rule body (or min/max pattern) mentions the `meta` predicate.
bool references_meta(const std::vector<datalog::Rule>& rules);

/// Body facts, with header meta-facts mirrored in when `rules` read `meta`.
datalog::FactSet evaluation_facts(const Message& msg, const std::vector<datalog::Rule>& rules);

/// Resolves head variables that occur nowhere in the body by parameter name:
/// when a body atom holds a constant at the position whose meta-fact name
/// equals the variable, the rule gains `var = constant`. So
/// `mf(matching):-match("true")` reads as `mf(matching):-match("true"),matching="true"`.
std::vector<datalog::Rule> bind_named_parameters(std::vector<datalog::Rule> rules,
                                                 const MetaFacts& meta);

}  // namespace lila::cdm
