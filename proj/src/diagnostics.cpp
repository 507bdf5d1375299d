#include "lila/diagnostics.hpp"

#include <algorithm>
#include <sstream>

namespace lila {

bool SourceSpan::encloses(std::size_t l, std::size_t c) const {
  if (!valid()) return false;
  auto start = std::pair{line, column};
  auto end = std::pair{end_line, end_column};
  auto pos = std::pair{l, c};
  return start <= pos && pos <= end;
}

std::string Diagnostic::to_string() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

bool has_errors(const Diagnostics& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.is_error(); });
}

Diagnostic make_error(std::string code, std::string message, SourceSpan span) {
  return {Severity::error, std::move(code), std::move(message), span};
}

Diagnostic make_warning(std::string code, std::string message, SourceSpan span) {
  return {Severity::warning, std::move(code), std::move(message), span};
}

std::ostream& operator<<(std::ostream& os, const Diagnostic& d) {
  if (d.span.valid()) os << d.span.line << ':' << d.span.column << ": ";
  os << (d.is_error() ? "error" : "warning") << '[' << d.code << "]: " << d.message;
  return os;
}

Error::Error(Diagnostic diag) : std::runtime_error(diag.to_string()), diag_(std::move(diag)) {}

}  // namespace lila
