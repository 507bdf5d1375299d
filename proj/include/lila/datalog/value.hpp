#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace lila::datalog {

using Integer = boost::multiprecision::cpp_int;

/// A ground constant: arbitrary-precision integer, 64-bit decimal or string.
///
/// Identity (==, hashing, set membership) distinguishes the three kinds, so
/// `1` and `1.0` are different facts. The total order places all numerics
/// before strings and compares numerics by value; on a numeric tie the
/// integer sorts first.
class Value {
 public:
  enum class Kind { integer, decimal, string };

  Value() : v_(Integer{0}) {}
  Value(Integer i) : v_(std::move(i)) {}
  Value(int i) : v_(Integer{i}) {}
  Value(long long i) : v_(Integer{i}) {}
  Value(double d) : v_(d) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(const char* s) : v_(std::string{s}) {}

  Kind kind() const { return static_cast<Kind>(v_.index()); }
  bool is_numeric() const { return kind() != Kind::string; }
  bool is_string() const { return kind() == Kind::string; }

  const Integer& as_integer() const { return std::get<Integer>(v_); }
  double as_decimal() const { return std::get<double>(v_); }
  const std::string& as_string() const { return std::get<std::string>(v_); }
  /// Numeric value as double (integers converted).
  double to_double() const;

  /// Datalog literal syntax: strings quoted and escaped, decimals always
  /// carry a '.' or exponent so they reparse as decimals.
  std::string to_literal() const;
  /// Unquoted text (strings verbatim, numerics as literals).
  std::string to_text() const;

  friend bool operator==(const Value& a, const Value& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

  /// Numeric equality across kinds (1 = 1.0), identity otherwise.
  static bool numerically_equal(const Value& a, const Value& b);

 private:
  std::variant<Integer, double, std::string> v_;
};

using Tuple = std::vector<Value>;

std::size_t hash_value(const Value& v);

std::string format_decimal(double d);
std::string quote_string(std::string_view s);

}  // namespace lila::datalog
