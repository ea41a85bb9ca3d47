#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "extalg/expr.hpp"
#include "extalg/random.hpp"

using namespace extalg;
using Catch::Matchers::WithinAbs;

namespace {

/// Random source text paired with a closure that evaluates the same formula
/// without going through the parser or the tree.
struct Sample {
  std::string text;
  std::function<double(const std::vector<double>&)> fn;
};

Sample random_sample(Rng& rng, int n, int depth) {
  if (depth == 0 || rng.uniform() < 0.25) {
    if (rng.coin()) {
      const int k = rng.integer(0, n - 1);
      return {"x" + std::to_string(k + 1), [k](const std::vector<double>& x) { return x[k]; }};
    }
    const int hundredths = rng.integer(10, 200);
    const double c = hundredths / 100.0;
    return {std::to_string(hundredths / 100) + "." + std::to_string(hundredths % 100 / 10) +
                std::to_string(hundredths % 10),
            [c](const std::vector<double>&) { return c; }};
  }
  const Sample a = random_sample(rng, n, depth - 1), b = random_sample(rng, n, depth - 1);
  switch (rng.integer(0, 8)) {
    case 0: return {"(" + a.text + " + " + b.text + ")", [a, b](const auto& x) { return a.fn(x) + b.fn(x); }};
    case 1: return {"(" + a.text + " - " + b.text + ")", [a, b](const auto& x) { return a.fn(x) - b.fn(x); }};
    case 2: return {"(" + a.text + " * " + b.text + ")", [a, b](const auto& x) { return a.fn(x) * b.fn(x); }};
    case 3:
      return {"(" + a.text + " / (2 + " + b.text + "^2))",
              [a, b](const auto& x) { return a.fn(x) / (2 + b.fn(x) * b.fn(x)); }};
    case 4: return {"sin(" + a.text + ")", [a](const auto& x) { return std::sin(a.fn(x)); }};
    case 5: return {"cos(" + a.text + ")", [a](const auto& x) { return std::cos(a.fn(x)); }};
    case 6: return {"exp(0.3*" + a.text + ")", [a](const auto& x) { return std::exp(0.3 * a.fn(x)); }};
    case 7:
      return {"sqrt(1 + " + a.text + "^2)", [a](const auto& x) { return std::sqrt(1 + a.fn(x) * a.fn(x)); }};
    default:
      return {"log(3 + sin(" + a.text + "))", [a](const auto& x) { return std::log(3 + std::sin(a.fn(x))); }};
  }
}

double central_difference(const Expr& e, std::vector<double> p, int k, double h) {
  p[k] += h;
  const double up = eval(e, p);
  p[k] -= 2 * h;
  return (up - eval(e, p)) / (2 * h);
}

}  // namespace

TEST_CASE("parsing and evaluation", "[expr]") {
  CHECK(eval(parse("x1*x1 + sin(x2)"), {2.0, 0.0}) == 4.0);
  CHECK_THAT(eval(parse("sin(x2)^2"), {0.0, M_PI / 2}), WithinAbs(1.0, 1e-15));
  CHECK(eval(parse("2^3^2"), {}) == 64.0);  // exponents are integer literals, applied left to right
  CHECK(eval(parse("-x1^2"), {3.0}) == -9.0);
  CHECK(eval(parse("1 - 2 - 3"), {}) == -4.0);
  CHECK(eval(parse("8 / 4 / 2"), {}) == 1.0);
  CHECK(eval(parse("2 * (x1 + 1)"), {1.0}) == 4.0);
  CHECK_THAT(eval(parse("exp(log(x1)) + sqrt(x2)"), {2.5, 9.0}), WithinAbs(5.5, 1e-14));
  CHECK_THAT(eval(parse("1.5e-1*x1"), {2.0}), WithinAbs(0.3, 1e-15));
}

TEST_CASE("syntax errors report their position", "[expr]") {
  try {
    parse("1/(x1");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.column() == 6);  // one past the last character
  }
  CHECK_THROWS_AS(parse("x1 +"), ParseError);
  CHECK_THROWS_AS(parse("foo(x1)"), ParseError);
  CHECK_THROWS_AS(parse("y"), ParseError);
  CHECK_THROWS_AS(parse("x3", 2), ParseError);
  CHECK_THROWS_AS(parse("x0"), ParseError);
  CHECK_THROWS_AS(parse("x1^0.5"), ParseError);
  CHECK_NOTHROW(parse("x2", 2));
}

TEST_CASE("evaluation outside the domain", "[expr]") {
  CHECK_THROWS_AS(eval(parse("1/x1"), {0.0}), DomainError);
  CHECK_THROWS_AS(eval(parse("log(x1)"), {-1.0}), DomainError);
  CHECK_THROWS_AS(eval(parse("sqrt(x1)"), {-1.0}), DomainError);
  try {
    eval(parse("log(x1 - x2)"), {1.0, 2.0});
  } catch (const DomainError& e) {
    CHECK(e.point() == std::vector<double>{1.0, 2.0});
  }
}

TEST_CASE("evaluation agrees with an independent evaluator", "[expr][property]") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(1, 4);
    const Sample s = random_sample(rng, n, 4);
    const Expr e = parse(s.text, n);
    std::vector<double> p(n);
    for (double& v : p) v = rng.uniform(-1.5, 1.5);
    INFO(s.text);
    CHECK_THAT(eval(e, p), WithinAbs(s.fn(p), 1e-12 * std::max(1.0, std::abs(s.fn(p)))));
  }
}

TEST_CASE("symbolic derivatives", "[expr]") {
  const Expr sq = diff(parse("x1*x1"), 0);
  for (double x : {-1.0, 0.5, 3.0}) CHECK_THAT(eval(sq, {x}), WithinAbs(2 * x, 1e-15));
  CHECK(diff(parse("3.5"), 0).is_const(0.0));
  CHECK(diff(parse("x2"), 0).is_const(0.0));
  CHECK(diff(parse("x1"), 0).is_const(1.0));
  CHECK(to_string(diff(parse("x1 + 7"), 0)) == "1");
}

TEST_CASE("derivatives match central differences", "[expr][property]") {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(1, 4);
    const Expr e = random_smooth_expr(n, rng, 3);
    std::vector<double> p(n);
    for (double& v : p) v = rng.uniform(-1, 1);
    for (int k = 0; k < n; ++k) {
      INFO(to_string(e));
      CHECK_THAT(eval(diff(e, k), p), WithinAbs(central_difference(e, p, k, 1e-5), 1e-6));
    }
  }
}

TEST_CASE("derivative is linear and obeys the product rule", "[expr][property]") {
  Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.integer(1, 4);
    const Expr a = random_smooth_expr(n, rng, 2), b = random_smooth_expr(n, rng, 2);
    std::vector<double> p(n);
    for (double& v : p) v = rng.uniform(-1, 1);
    const int k = rng.integer(0, n - 1);
    const double da = eval(diff(a, k), p), db = eval(diff(b, k), p);
    CHECK_THAT(eval(diff(Expr(2.0) * a - b, k), p), WithinAbs(2 * da - db, 1e-12));
    CHECK_THAT(eval(diff(a * b, k), p), WithinAbs(da * eval(b, p) + eval(a, p) * db, 1e-12));
  }
}

TEST_CASE("printing round trips through the parser", "[expr][property]") {
  Rng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.integer(1, 4);
    const Expr e = random_smooth_expr(n, rng, 3);
    const std::string once = to_string(e);
    const std::string twice = to_string(parse(once, n));
    CHECK(once == twice);
    std::vector<double> p(n);
    for (double& v : p) v = rng.uniform(-1, 1);
    CHECK_THAT(eval(parse(once, n), p), WithinAbs(eval(e, p), 1e-13));
  }
}
