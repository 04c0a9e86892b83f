#include <cmath>

#include "doctest.h"
#include "fairdyn/builtins.hpp"
#include "fairdyn/expression.hpp"

using namespace fairdyn;

namespace {

double eval(const std::string& s, double b0 = 0.0, double b1 = 0.0) { return Expression::parse(s)(b0, b1); }

ParseError::Kind error_kind(const std::string& s) {
  try {
    Expression::parse(s);
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("expected a parse error for " << s);
  return ParseError::Kind::Syntax;
}

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(eval("1 + 2 * 3") == 7.0);
  CHECK(eval("(1 + 2) * 3") == 9.0);
  CHECK(eval("8 / 4 / 2") == 1.0);
  CHECK(eval("10 - 4 - 3") == 3.0);
  CHECK(eval("2 ^ 3 ^ 2") == 512.0);
  CHECK(eval("-2 ^ 2") == -4.0);
  CHECK(eval("2 ^ -1") == 0.5);
  CHECK(eval("--3") == 3.0);
  CHECK(eval("3 * -b0", 2.0) == -6.0);
}

TEST_CASE("literals") {
  CHECK(eval("1e-3") == 0.001);
  CHECK(eval("2.5E2") == 250.0);
  CHECK(eval(".5") == 0.5);
  CHECK(eval("0.000000001") == 1e-9);
}

TEST_CASE("variables and functions") {
  CHECK(eval("b0 + 2*b1", 0.25, 0.5) == 1.25);
  CHECK(eval("min(b0, b1)", 0.3, 0.2) == 0.2);
  CHECK(eval("max(b0, b1)", 0.3, 0.2) == 0.3);
  CHECK(eval("abs(b0 - b1)", 0.2, 0.5) == doctest::Approx(0.3));
  CHECK(eval("sin(b0) + cos(b1)", 0.4, 0.7) == std::sin(0.4) + std::cos(0.7));
  CHECK(eval("exp(1)") == std::exp(1.0));
}

TEST_CASE("errors carry kind and position") {
  CHECK(error_kind("b2 + 1") == ParseError::Kind::UnknownIdentifier);
  CHECK(error_kind("sqrt(b0)") == ParseError::Kind::UnknownIdentifier);
  CHECK(error_kind("min(b0)") == ParseError::Kind::Arity);
  CHECK(error_kind("sin(b0, b1)") == ParseError::Kind::Arity);
  CHECK(error_kind("1 +") == ParseError::Kind::Syntax);
  CHECK(error_kind("(1 + 2") == ParseError::Kind::Syntax);
  CHECK(error_kind("1 2") == ParseError::Kind::Syntax);
  CHECK(error_kind("1e") == ParseError::Kind::Syntax);
  CHECK(error_kind("") == ParseError::Kind::Syntax);
  CHECK(error_kind("b0 # 1") == ParseError::Kind::Syntax);
  try {
    Expression::parse("0.5 + b7");
  } catch (const ParseError& e) {
    CHECK(e.position() == 6);
  }
}

TEST_CASE("constant expressions match the constant builtin") {
  const DynamicsSpec p = parse_dynamics("0.2", "0.8");
  const DynamicsSpec c = constant_dynamics(0.2, 0.8);
  for (double x : {0.0, 0.3, 1.0})
    for (double y : {0.0, 0.6, 1.0}) {
      CHECK(p.f0(x, y) == c.f0(x, y));
      CHECK(p.f1(x, y) == c.f1(x, y));
    }
}

TEST_CASE("three-equilibrium formulas match the builtin") {
  const DynamicsSpec p =
      parse_dynamics("(b1 + b1/5)/1.2 + 0.01",
                     "0.5*(b1 + b1/5)/1.4 + exp(-0.000000001*(b0+b1))*sin(18*(b0+b1)) + 0.1");
  const DynamicsSpec c = appendix_c_dynamics();
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; ++j) {
      const double x = i / 100.0, y = j / 100.0;
      worst = std::max(worst, std::abs(p.raw_f1(x, y) - c.raw_f1(x, y)));
      worst = std::max(worst, std::abs(p.raw_f0(x, y) - c.raw_f0(x, y)));
    }
  CHECK(worst <= 1e-12);
}
