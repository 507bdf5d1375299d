#include "lila/datalog/value.hpp"

#include <charconv>
#include <cmath>
#include <functional>

namespace lila::datalog {

double Value::to_double() const {
  switch (kind()) {
    case Kind::integer: return as_integer().convert_to<double>();
    case Kind::decimal: return as_decimal();
    case Kind::string: break;
  }
  return std::nan("");
}

std::string format_decimal(double d) {
  if (std::isnan(d)) return "nan";
  if (std::isinf(d)) return d < 0 ? "-inf" : "inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  std::string out(buf, res.ptr);
  if (out.find_first_of(".eE") == std::string::npos) out += ".0";
  return out;
}

std::string quote_string(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string Value::to_literal() const {
  switch (kind()) {
    case Kind::integer: return as_integer().str();
    case Kind::decimal: return format_decimal(as_decimal());
    case Kind::string: return quote_string(as_string());
  }
  return {};
}

std::string Value::to_text() const {
  return is_string() ? as_string() : to_literal();
}

namespace {

std::strong_ordering compare_numeric(const Value& a, const Value& b) {
  if (a.kind() == Value::Kind::integer && b.kind() == Value::Kind::integer) {
    int c = a.as_integer().compare(b.as_integer());
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  double x = a.to_double();
  double y = b.to_double();
  if (x < y) return std::strong_ordering::less;
  if (x > y) return std::strong_ordering::greater;
  // Numeric tie between different kinds: integer first.
  return static_cast<int>(a.kind()) <=> static_cast<int>(b.kind());
}

}  // namespace

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.is_numeric() && b.is_numeric()) return compare_numeric(a, b);
  if (a.is_numeric() != b.is_numeric()) {
    return a.is_numeric() ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  int c = a.as_string().compare(b.as_string());
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

bool Value::numerically_equal(const Value& a, const Value& b) {
  if (a.is_numeric() && b.is_numeric() && a.kind() != b.kind()) {
    return a.to_double() == b.to_double();
  }
  return a == b;
}

std::size_t hash_value(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::integer: return boost::multiprecision::hash_value(v.as_integer());
    case Value::Kind::decimal: return std::hash<double>{}(v.as_decimal()) ^ 0x9e3779b97f4a7c15ULL;
    case Value::Kind::string: return std::hash<std::string>{}(v.as_string());
  }
  return 0;
}

}  // namespace lila::datalog
