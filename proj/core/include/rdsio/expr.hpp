#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rdsio/types.hpp"

namespace rdsio {

/// Piecewise-linear function through (xs[i], ys[i]); constant beyond the ends.
struct Table {
  std::vector<double> xs;
  std::vector<double> ys;

  double operator()(double x) const;
  /// Throws Error unless xs is strictly increasing and sizes match.
  void validate() const;
};

/// Names an expression may refer to. States are x0, x1, ... and inputs u0,
/// u1, ...; with a single state or input, x and u are accepted as well.
struct ExprSymbols {
  std::size_t state_dim = 0;
  std::size_t input_dim = 0;
  std::vector<std::string> noises;
  std::map<std::string, Table> tables;
};

class ExprError : public Error {
 public:
  ExprError(const std::string& msg, std::size_t column);
  /// 1-based column in the expression text.
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

/// Arithmetic expression over states, inputs and named noise values:
/// numbers, + - * /, unary minus, parentheses, abs(e), min(a, b), max(a, b),
/// clamp(e, lo, hi) and tab(name, e).
class Expr {
 public:
  static Expr parse(const std::string& text, const ExprSymbols& symbols);

  /// `noise` holds the current values of the declared noises, in order.
  double eval(const Vec& x, const Vec& u, const Vec& noise) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace rdsio
