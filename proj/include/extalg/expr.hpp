#ifndef EXTALG_EXPR_HPP
#define EXTALG_EXPR_HPP

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "extalg/error.hpp"

namespace extalg {

/// Syntax error in an expression; column() is 1-based, end of input is size()+1.
class ParseError : public ArgumentError {
 public:
  ParseError(const std::string& what, std::size_t column)
      : ArgumentError(what + " at column " + std::to_string(column)), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

/// Evaluation left the domain of an operation (division by zero, log or
/// sqrt of an out-of-range value). Carries the evaluation point.
class DomainError : public NumericError {
 public:
  DomainError(const std::string& what, std::vector<double> point)
      : NumericError(what + " at " + format_point(point)), point_(std::move(point)) {}
  const std::vector<double>& point() const { return point_; }

 private:
  static std::string format_point(const std::vector<double>& p) {
    std::string s = "(";
    char buf[32];
    for (std::size_t i = 0; i < p.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", p[i]);
      s += (i ? ", " : "") + std::string(buf);
    }
    return s + ")";
  }
  std::vector<double> point_;
};

/// Immutable expression tree over coordinates x1..xn. Construction through the
/// operators folds constants and drops neutral elements; there is no other
/// simplification.
class Expr {
 public:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Log, Sqrt };

  Expr() : Expr(0.0) {}
  Expr(double v) : node_(std::make_shared<Node>(Node{Op::Const, v, 0, 0, {}, {}})) {}  // NOLINT

  /// Coordinate x_{k+1} (0-based k).
  static Expr var(int k) {
    if (k < 0) throw ArgumentError("Expr::var: negative index");
    return Expr(std::make_shared<Node>(Node{Op::Var, 0.0, k, 0, {}, {}}));
  }

  Op op() const { return node_->op; }
  double value() const { return node_->value; }
  int var_index() const { return node_->var; }
  int exponent() const { return node_->exponent; }
  Expr lhs() const { return Expr(node_->a); }
  Expr rhs() const { return Expr(node_->b); }

  bool is_const() const { return op() == Op::Const; }
  bool is_const(double v) const { return is_const() && value() == v; }

  friend Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const()) return a.value() + b.value();
    if (a.is_const(0.0)) return b;
    if (b.is_const(0.0)) return a;
    return binary(Op::Add, a, b);
  }
  friend Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const()) return a.value() - b.value();
    if (b.is_const(0.0)) return a;
    if (a.is_const(0.0)) return -b;
    return binary(Op::Sub, a, b);
  }
  friend Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const()) return a.value() * b.value();
    if (a.is_const(0.0) || b.is_const(0.0)) return 0.0;
    if (a.is_const(1.0)) return b;
    if (b.is_const(1.0)) return a;
    if (a.is_const(-1.0)) return -b;
    if (b.is_const(-1.0)) return -a;
    return binary(Op::Mul, a, b);
  }
  friend Expr operator/(const Expr& a, const Expr& b) {
    if (a.is_const() && b.is_const() && b.value() != 0.0) return a.value() / b.value();
    if (a.is_const(0.0) && !b.is_const(0.0)) return 0.0;
    if (b.is_const(1.0)) return a;
    return binary(Op::Div, a, b);
  }
  Expr operator-() const {
    if (is_const()) return -value();
    if (op() == Op::Neg) return lhs();
    return unary(Op::Neg, *this);
  }
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }

  friend Expr pow(const Expr& a, int n) {
    if (n == 0) return 1.0;
    if (n == 1) return a;
    if (a.is_const() && (n > 0 || a.value() != 0.0)) return std::pow(a.value(), n);
    Expr r(std::make_shared<Node>(Node{Op::Pow, 0.0, 0, n, a.node_, {}}));
    return r;
  }
  friend Expr sin(const Expr& a) { return a.is_const() ? Expr(std::sin(a.value())) : unary(Op::Sin, a); }
  friend Expr cos(const Expr& a) { return a.is_const() ? Expr(std::cos(a.value())) : unary(Op::Cos, a); }
  friend Expr exp(const Expr& a) { return a.is_const() ? Expr(std::exp(a.value())) : unary(Op::Exp, a); }
  friend Expr log(const Expr& a) {
    return a.is_const() && a.value() > 0 ? Expr(std::log(a.value())) : unary(Op::Log, a);
  }
  friend Expr sqrt(const Expr& a) {
    return a.is_const() && a.value() >= 0 ? Expr(std::sqrt(a.value())) : unary(Op::Sqrt, a);
  }

 private:
  struct Node {
    Op op;
    double value;
    int var;
    int exponent;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
  };

  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr binary(Op op, const Expr& a, const Expr& b) {
    return Expr(std::make_shared<Node>(Node{op, 0.0, 0, 0, a.node_, b.node_}));
  }
  static Expr unary(Op op, const Expr& a) { return Expr(std::make_shared<Node>(Node{op, 0.0, 0, 0, a.node_, {}})); }

  std::shared_ptr<const Node> node_;
};

// Scalar customisation points (expressions are real-valued).
inline Expr conj_of(const Expr& e) { return e; }
inline bool is_exact_zero(const Expr& e) { return e.is_const(0.0); }
/// |value| for constants; 1 for anything that depends on a coordinate.
inline double magnitude(const Expr& e) { return e.is_const() ? std::abs(e.value()) : 1.0; }

/// Highest coordinate index used, or -1 for a constant expression.
inline int max_var(const Expr& e) {
  switch (e.op()) {
    case Expr::Op::Const: return -1;
    case Expr::Op::Var: return e.var_index();
    case Expr::Op::Add:
    case Expr::Op::Sub:
    case Expr::Op::Mul:
    case Expr::Op::Div: return std::max(max_var(e.lhs()), max_var(e.rhs()));
    default: return max_var(e.lhs());
  }
}

inline double eval(const Expr& e, std::span<const double> x) {
  using Op = Expr::Op;
  auto fail = [&](const char* what) -> double { throw DomainError(what, std::vector<double>(x.begin(), x.end())); };
  switch (e.op()) {
    case Op::Const: return e.value();
    case Op::Var:
      if (static_cast<std::size_t>(e.var_index()) >= x.size()) throw ArgumentError("eval: point has too few coordinates");
      return x[e.var_index()];
    case Op::Add: return eval(e.lhs(), x) + eval(e.rhs(), x);
    case Op::Sub: return eval(e.lhs(), x) - eval(e.rhs(), x);
    case Op::Mul: return eval(e.lhs(), x) * eval(e.rhs(), x);
    case Op::Div: {
      const double d = eval(e.rhs(), x);
      if (d == 0.0) return fail("division by zero");
      return eval(e.lhs(), x) / d;
    }
    case Op::Neg: return -eval(e.lhs(), x);
    case Op::Pow: {
      const double b = eval(e.lhs(), x);
      if (b == 0.0 && e.exponent() < 0) return fail("division by zero");
      return std::pow(b, e.exponent());
    }
    case Op::Sin: return std::sin(eval(e.lhs(), x));
    case Op::Cos: return std::cos(eval(e.lhs(), x));
    case Op::Exp: return std::exp(eval(e.lhs(), x));
    case Op::Log: {
      const double a = eval(e.lhs(), x);
      if (!(a > 0.0)) return fail("log of non-positive value");
      return std::log(a);
    }
    case Op::Sqrt: {
      const double a = eval(e.lhs(), x);
      if (!(a >= 0.0)) return fail("sqrt of negative value");
      return std::sqrt(a);
    }
  }
  return 0.0;
}

inline double eval(const Expr& e, std::initializer_list<double> x) {
  return eval(e, std::span<const double>(x.begin(), x.size()));
}

/// Exact partial derivative with respect to x_{k+1} (0-based k).
inline Expr diff(const Expr& e, int k) {
  using Op = Expr::Op;
  switch (e.op()) {
    case Op::Const: return 0.0;
    case Op::Var: return e.var_index() == k ? 1.0 : 0.0;
    case Op::Add: return diff(e.lhs(), k) + diff(e.rhs(), k);
    case Op::Sub: return diff(e.lhs(), k) - diff(e.rhs(), k);
    case Op::Mul: return diff(e.lhs(), k) * e.rhs() + e.lhs() * diff(e.rhs(), k);
    case Op::Div: {
      const Expr a = e.lhs();
      const Expr b = e.rhs();
      return (diff(a, k) * b - a * diff(b, k)) / pow(b, 2);
    }
    case Op::Neg: return -diff(e.lhs(), k);
    case Op::Pow: return Expr(e.exponent()) * pow(e.lhs(), e.exponent() - 1) * diff(e.lhs(), k);
    case Op::Sin: return cos(e.lhs()) * diff(e.lhs(), k);
    case Op::Cos: return -(sin(e.lhs()) * diff(e.lhs(), k));
    case Op::Exp: return e * diff(e.lhs(), k);
    case Op::Log: return diff(e.lhs(), k) / e.lhs();
    case Op::Sqrt: return diff(e.lhs(), k) / (Expr(2.0) * e);
  }
  return 0.0;
}

/// Replaces every x_{i+1} by repl[i].
inline Expr substitute(const Expr& e, std::span<const Expr> repl) {
  using Op = Expr::Op;
  switch (e.op()) {
    case Op::Const: return e;
    case Op::Var:
      if (static_cast<std::size_t>(e.var_index()) >= repl.size()) throw ArgumentError("substitute: missing replacement");
      return repl[e.var_index()];
    case Op::Add: return substitute(e.lhs(), repl) + substitute(e.rhs(), repl);
    case Op::Sub: return substitute(e.lhs(), repl) - substitute(e.rhs(), repl);
    case Op::Mul: return substitute(e.lhs(), repl) * substitute(e.rhs(), repl);
    case Op::Div: return substitute(e.lhs(), repl) / substitute(e.rhs(), repl);
    case Op::Neg: return -substitute(e.lhs(), repl);
    case Op::Pow: return pow(substitute(e.lhs(), repl), e.exponent());
    case Op::Sin: return sin(substitute(e.lhs(), repl));
    case Op::Cos: return cos(substitute(e.lhs(), repl));
    case Op::Exp: return exp(substitute(e.lhs(), repl));
    case Op::Log: return log(substitute(e.lhs(), repl));
    case Op::Sqrt: return sqrt(substitute(e.lhs(), repl));
  }
  return e;
}

namespace detail {

inline int precedence(const Expr& e) {
  switch (e.op()) {
    case Expr::Op::Add:
    case Expr::Op::Sub: return 1;
    case Expr::Op::Mul:
    case Expr::Op::Div: return 2;
    case Expr::Op::Neg: return 3;
    case Expr::Op::Pow: return 4;
    case Expr::Op::Const: return e.value() < 0 ? 0 : 5;
    default: return 5;
  }
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string print(const Expr& e, int min_prec);

inline std::string wrap(const Expr& e, int min_prec) {
  if (precedence(e) >= min_prec) return print(e, min_prec);
  return "(" + print(e, 0) + ")";
}

inline std::string print(const Expr& e, int) {
  using Op = Expr::Op;
  switch (e.op()) {
    case Op::Const: return e.value() < 0 ? "(" + format_number(e.value()) + ")" : format_number(e.value());
    case Op::Var: return "x" + std::to_string(e.var_index() + 1);
    case Op::Add: return wrap(e.lhs(), 1) + " + " + wrap(e.rhs(), 2);
    case Op::Sub: return wrap(e.lhs(), 1) + " - " + wrap(e.rhs(), 2);
    case Op::Mul: return wrap(e.lhs(), 2) + "*" + wrap(e.rhs(), 3);
    case Op::Div: return wrap(e.lhs(), 2) + "/" + wrap(e.rhs(), 3);
    case Op::Neg: return "-" + wrap(e.lhs(), 3);
    case Op::Pow: return wrap(e.lhs(), 5) + "^" + std::to_string(e.exponent());
    case Op::Sin: return "sin(" + print(e.lhs(), 0) + ")";
    case Op::Cos: return "cos(" + print(e.lhs(), 0) + ")";
    case Op::Exp: return "exp(" + print(e.lhs(), 0) + ")";
    case Op::Log: return "log(" + print(e.lhs(), 0) + ")";
    case Op::Sqrt: return "sqrt(" + print(e.lhs(), 0) + ")";
  }
  return {};
}

class Parser {
 public:
  Parser(std::string_view src, int dim) : s_(src), dim_(dim) {}

  Expr run() {
    Expr e = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_ + 1); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const { throw ParseError(what, at + 1); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr e = term();
    while (true) {
      if (accept('+')) e = e + term();
      else if (accept('-')) e = e - term();
      else return e;
    }
  }
  Expr term() {
    Expr e = unary();
    while (true) {
      if (accept('*')) e = e * unary();
      else if (accept('/')) e = e / unary();
      else return e;
    }
  }
  Expr unary() {
    if (accept('-')) return -unary();
    return power();
  }
  Expr power() {
    Expr e = primary();
    while (accept('^')) e = pow(e, integer_literal());
    return e;
  }
  int integer_literal() {
    skip();
    const bool paren = accept('(');
    skip();
    const std::size_t start = pos_;
    bool neg = false;
    if (pos_ < s_.size() && s_[pos_] == '-') {
      neg = true;
      ++pos_;
    }
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("expected integer exponent");
    long v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_++] - '0');
      if (v > 1000) fail_at("exponent too large", start);
    }
    if (paren) expect(')');
    return static_cast<int>(neg ? -v : v);
  }
  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }
  Expr number() {
    const std::string rest(s_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return v;
  }
  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string id(s_.substr(start, pos_ - start));
    if (id == "pi") return std::numbers::pi;
    if (id.size() > 1 && id[0] == 'x' && id.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int k = std::atoi(id.c_str() + 1);
      if (k < 1 || (dim_ >= 0 && k > dim_)) fail_at("unknown variable '" + id + "'", start);
      return Expr::var(k - 1);
    }
    if (id == "pow") {
      expect('(');
      Expr base = expr();
      expect(',');
      const int n = integer_literal();
      expect(')');
      return pow(base, n);
    }
    Expr (*fn)(const Expr&) = nullptr;
    if (id == "sin") fn = [](const Expr& a) { return sin(a); };
    else if (id == "cos") fn = [](const Expr& a) { return cos(a); };
    else if (id == "exp") fn = [](const Expr& a) { return exp(a); };
    else if (id == "log") fn = [](const Expr& a) { return log(a); };
    else if (id == "sqrt") fn = [](const Expr& a) { return sqrt(a); };
    else fail_at("unknown identifier '" + id + "'", start);
    expect('(');
    Expr arg = expr();
    expect(')');
    return fn(arg);
  }

  std::string_view s_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Canonical text form; parse(to_string(e)) prints back to the same string.
inline std::string to_string(const Expr& e) { return detail::print(e, 0); }

/// Parses the expression grammar. `dim` bounds the coordinate names x1..x{dim};
/// a negative value accepts any index.
inline Expr parse(std::string_view src, int dim = -1) { return detail::Parser(src, dim).run(); }

}  // namespace extalg

#endif  // EXTALG_EXPR_HPP
