#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gcurve {

/// Compiled scalar expression over a fixed set of named variables.
///
/// Grammar: binary + - * / ^ (right associative), unary minus, parentheses,
/// numeric literals, the constant `pi`, and the functions
/// sin, cos, exp, abs (one argument) and min, max (two or more arguments).
/// Immutable once compiled; evaluation is thread-safe.
class Expr {
 public:
  struct Node;

  /// Throws Error(ParseError) with the character offset on malformed input.
  static Expr compile(const std::string& source, std::vector<std::string> variables);

  double operator()(std::span<const double> values) const;
  double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

  const std::string& source() const { return source_; }
  const std::vector<std::string>& variables() const { return variables_; }

 private:
  std::string source_;
  std::vector<std::string> variables_;
  std::shared_ptr<const Node> root_;
};

}  // namespace gcurve
