#include "cdm/csv.hpp"

namespace lila::cdm {

std::vector<std::vector<CsvCell>> read_csv(std::string_view text) {
  std::vector<std::vector<CsvCell>> rows;
  std::vector<CsvCell> row;
  std::size_t i = 0;
  std::size_t line = 1;
  const std::size_t n = text.size();
  auto end_line = [&](std::size_t& pos) {
    if (pos < n && text[pos] == '\r') ++pos;
    if (pos < n && text[pos] == '\n') ++pos;
    ++line;
  };
  while (i < n) {
    if (text[i] == '\n' || text[i] == '\r') {
      // Blank line.
      end_line(i);
      rows.emplace_back();
      continue;
    }
    for (;;) {
      CsvCell cell;
      if (i < n && text[i] == '"') {
        cell.quoted = true;
        ++i;
        for (;;) {
          if (i >= n) throw CsvError("unterminated quoted cell on line " + std::to_string(line));
          if (text[i] == '"') {
            if (i + 1 < n && text[i + 1] == '"') {
              cell.text.push_back('"');
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (text[i] == '\n') ++line;
          cell.text.push_back(text[i++]);
        }
        if (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
          throw CsvError("unexpected character after closing quote on line " + std::to_string(line));
        }
      } else {
        while (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
          if (text[i] == '"') throw CsvError("quote inside unquoted cell on line " + std::to_string(line));
          cell.text.push_back(text[i++]);
        }
      }
      row.push_back(std::move(cell));
      if (i < n && text[i] == ',') {
        ++i;
        continue;
      }
      break;
    }
    end_line(i);
    rows.push_back(std::move(row));
    row.clear();
  }
  // Trailing blank lines carry no records.
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  return rows;
}

std::string csv_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace lila::cdm
