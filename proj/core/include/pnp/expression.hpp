#pragma once

#include <memory>
#include <string>

#include "pnp/grid.hpp"

namespace pnp {

/// A compiled arithmetic expression in the variables x, y, z and t.
///
/// Grammar (usual precedence, `^` right-associative, unary minus binds
/// looser than `^`, so -2^2 == -4):
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' unary)?
///   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
///
/// Names: x, y, z, t, pi, e. Functions: exp, log, sin, cos, tan, sqrt, abs
/// (one argument); min, max, pow (two); chi(v, a, b), the indicator of
/// a <= v <= b.
class Expression {
 public:
  struct Node;

  /// Throws InvalidArgument with the offending column on a syntax error.
  static Expression parse(const std::string& source);

  double operator()(const Point& p, double t) const;

  const std::string& source() const noexcept { return source_; }

 private:
  Expression(std::string source, std::shared_ptr<const Node> root)
      : source_(std::move(source)), root_(std::move(root)) {}

  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace pnp
