#include "nsreg/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace nsreg {

double Expr::eval(std::span<const double> x) const {
  switch (kind) {
    case Kind::kConst:
      return value;
    case Kind::kCoord:
      if (coord < 1 || static_cast<size_t>(coord) > x.size())
        throw std::invalid_argument("expr: coordinate x" +
                                    std::to_string(coord) +
                                    " out of range for dimension " +
                                    std::to_string(x.size()));
      return x[static_cast<size_t>(coord) - 1];
    case Kind::kAdd: {
      double s = 0.0;
      for (const auto& a : args) s += a->eval(x);
      return s;
    }
    case Kind::kSub:
      return args[0]->eval(x) - args[1]->eval(x);
    case Kind::kMul: {
      double p = 1.0;
      for (const auto& a : args) p *= a->eval(x);
      return p;
    }
    case Kind::kPow:
      return std::pow(args[0]->eval(x), exponent);
    case Kind::kAbs:
      return std::fabs(args[0]->eval(x));
  }
  throw std::logic_error("expr: bad kind");
}

int Expr::max_coord() const {
  if (kind == Kind::kCoord) return coord;
  int m = 0;
  for (const auto& a : args) m = std::max(m, a->max_coord());
  return m;
}

ExprPtr make_const(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::kConst;
  e->value = v;
  return e;
}

ExprPtr make_coord(int index) {
  if (index < 1) throw std::invalid_argument("expr: coordinate index must be >= 1");
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::kCoord;
  e->coord = index;
  return e;
}

namespace {
ExprPtr make_nary(Expr::Kind k, std::vector<ExprPtr> args, size_t min_args) {
  if (args.size() < min_args)
    throw std::invalid_argument("expr: operator needs more arguments");
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->args = std::move(args);
  return e;
}
}  // namespace

ExprPtr make_add(std::vector<ExprPtr> args) {
  return make_nary(Expr::Kind::kAdd, std::move(args), 1);
}

ExprPtr make_sub(ExprPtr a, ExprPtr b) {
  return make_nary(Expr::Kind::kSub, {std::move(a), std::move(b)}, 2);
}

ExprPtr make_mul(std::vector<ExprPtr> args) {
  return make_nary(Expr::Kind::kMul, std::move(args), 1);
}

ExprPtr make_pow(ExprPtr base, double exponent) {
  auto e = make_nary(Expr::Kind::kPow, {std::move(base)}, 1);
  const_cast<Expr&>(*e).exponent = exponent;
  return e;
}

ExprPtr make_abs(ExprPtr a) {
  return make_nary(Expr::Kind::kAbs, {std::move(a)}, 1);
}

namespace {

struct Parser {
  std::string_view s;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("expr parse error at offset " +
                                std::to_string(pos) + ": " + what);
  }

  std::string_view token() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
           s[pos] != '(' && s[pos] != ')')
      ++pos;
    if (pos == start) fail("expected token");
    return s.substr(start, pos - start);
  }

  double number(std::string_view t) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size())
      fail("bad number '" + std::string(t) + "'");
    return v;
  }

  ExprPtr atom(std::string_view t) {
    if (t.size() >= 2 && t[0] == 'x') {
      int idx = 0;
      auto [ptr, ec] = std::from_chars(t.data() + 1, t.data() + t.size(), idx);
      if (ec == std::errc{} && ptr == t.data() + t.size()) return make_coord(idx);
    }
    return make_const(number(t));
  }

  ExprPtr parse() {
    skip_ws();
    if (pos >= s.size()) fail("empty expression");
    if (s[pos] != '(') return atom(token());
    ++pos;  // '('
    std::string op(token());
    std::vector<ExprPtr> args;
    while (true) {
      skip_ws();
      if (pos >= s.size()) fail("missing ')'");
      if (s[pos] == ')') {
        ++pos;
        break;
      }
      args.push_back(parse());
    }
    if (op == "+") return make_add(std::move(args));
    if (op == "*") return make_mul(std::move(args));
    if (op == "-") {
      if (args.size() == 1) return make_sub(make_const(0.0), args[0]);
      if (args.size() == 2) return make_sub(args[0], args[1]);
      fail("'-' takes 1 or 2 arguments");
    }
    if (op == "pow") {
      if (args.size() != 2 || args[1]->kind != Expr::Kind::kConst)
        fail("pow takes (pow base exponent-literal)");
      return make_pow(args[0], args[1]->value);
    }
    if (op == "abs") {
      if (args.size() != 1) fail("abs takes 1 argument");
      return make_abs(args[0]);
    }
    fail("unknown operator '" + op + "'");
  }
};

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExprPtr parse_expr(std::string_view text) {
  Parser p{text};
  ExprPtr e = p.parse();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

std::string to_prefix(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kConst:
      return format_number(e.value);
    case Expr::Kind::kCoord:
      return "x" + std::to_string(e.coord);
    case Expr::Kind::kAdd:
    case Expr::Kind::kSub:
    case Expr::Kind::kMul: {
      std::string out = "(";
      out += e.kind == Expr::Kind::kAdd ? "+" : e.kind == Expr::Kind::kSub ? "-" : "*";
      for (const auto& a : e.args) out += " " + to_prefix(*a);
      return out + ")";
    }
    case Expr::Kind::kPow:
      return "(pow " + to_prefix(*e.args[0]) + " " + format_number(e.exponent) + ")";
    case Expr::Kind::kAbs:
      return "(abs " + to_prefix(*e.args[0]) + ")";
  }
  throw std::logic_error("expr: bad kind");
}

}  // namespace nsreg
