#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lila::cdm {

struct CsvCell {
  std::string text;
  bool quoted = false;
};

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// RFC 4180 reader. LF or CRLF line ends; a blank line yields an empty row;
/// no trailing empty row for a final line break.
std::vector<std::vector<CsvCell>> read_csv(std::string_view text);

std::string csv_quote(std::string_view s);

}  // namespace lila::cdm
