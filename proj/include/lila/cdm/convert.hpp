#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lila/cdm/message.hpp"
#include "lila/diagnostics.hpp"

namespace lila::cdm {

enum class Format { json, csv, datalog };

std::string_view format_name(Format f);
/// Case-insensitive "json" / "csv" / "datalog".
std::optional<Format> parse_format(std::string_view name);

/// Payload format plus the relations declared for it. Each declared relation
/// is an atom whose arguments are the parameter names, e.g. gE(period,time).
struct FormatSpec {
  Format format = Format::json;
  std::vector<datalog::Atom> relations;
};

class ConversionError : public Error {
 public:
  using Error::Error;
};

/// Payload -> message.
///
/// JSON: an array of flat objects (a single object counts as one record);
/// numbers become numerics, strings strings, booleans the strings
/// "true"/"false"; null and nested values are rejected. A record becomes a
/// fact of every declared relation whose parameter names are all keys of the
/// record; keys that are not declared are dropped.
///
/// CSV: header row naming the columns, RFC 4180 quoting. Unquoted cells that
/// read as integers or decimals become numerics; quoted cells stay strings.
/// A blank line starts a new block with its own header.
///
/// Datalog: parsed as-is; meta/3 facts move into the header.
Message to_cdm(std::string_view payload, const FormatSpec& spec);

/// Message -> payload with the facts of `exposed` only, ordered by the
/// listed predicates then by fact order. JSON is one array of objects keyed
/// by parameter names; CSV is one header+rows block per predicate, blocks
/// separated by a blank line; Datalog is meta-facts followed by facts.
std::string from_cdm(const Message& message, const FormatSpec& spec,
                     const std::vector<std::string>& exposed);

/// Projection rule selecting named parameters of `predicate`, e.g.
/// match-projection(x1):-match(x1,_). for names [matching].
datalog::Rule project_by_name(const Message& message, const std::string& predicate,
                              const std::vector<std::string>& names,
                              const std::string& head_predicate = "");

}  // namespace lila::cdm
