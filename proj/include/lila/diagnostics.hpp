#pragma once

#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lila {

/// 1-based source region; an all-zero span means "no position".
struct SourceSpan {
  std::size_t line = 0;
  std::size_t column = 0;
  std::size_t end_line = 0;
  std::size_t end_column = 0;

  bool valid() const { return line != 0; }
  bool encloses(std::size_t l, std::size_t c) const;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class Severity { warning, error };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string code;
  std::string message;
  SourceSpan span;

  bool is_error() const { return severity == Severity::error; }
  std::string to_string() const;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diags);
Diagnostic make_error(std::string code, std::string message, SourceSpan span = {});
Diagnostic make_warning(std::string code, std::string message, SourceSpan span = {});

std::ostream& operator<<(std::ostream& os, const Diagnostic& d);

/// Base of every error thrown by the library. Carries the diagnostic that
/// explains it so callers can report positions.
class Error : public std::runtime_error {
 public:
  explicit Error(Diagnostic diag);
  const Diagnostic& diagnostic() const noexcept { return diag_; }

 private:
  Diagnostic diag_;
};

}  // namespace lila
