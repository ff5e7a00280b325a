#pragma once

// Closed-form scalar expressions over the unit cube: constants, coordinates,
// +, -, *, pow with a real exponent, abs. Serialized as prefix s-expressions,
// e.g. "(+ 0.2 (pow x1 2) (* 0.1 x2))". Coordinates are 1-based.

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nsreg {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { kConst, kCoord, kAdd, kSub, kMul, kPow, kAbs };

  Kind kind = Kind::kConst;
  double value = 0.0;            // kConst
  int coord = 0;                 // kCoord, 1-based
  double exponent = 0.0;         // kPow
  std::vector<ExprPtr> args;

  double eval(std::span<const double> x) const;

  /// Highest coordinate index referenced (0 if none).
  int max_coord() const;
};

ExprPtr make_const(double v);
ExprPtr make_coord(int index);
ExprPtr make_add(std::vector<ExprPtr> args);
ExprPtr make_sub(ExprPtr a, ExprPtr b);
ExprPtr make_mul(std::vector<ExprPtr> args);
ExprPtr make_pow(ExprPtr base, double exponent);
ExprPtr make_abs(ExprPtr a);

/// Parses the prefix notation; throws std::invalid_argument on bad syntax.
ExprPtr parse_expr(std::string_view text);

std::string to_prefix(const Expr& e);

}  // namespace nsreg
