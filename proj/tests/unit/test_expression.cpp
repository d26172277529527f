#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pnp/error.hpp"
#include "pnp/expression.hpp"

using namespace pnp;

namespace {
double eval(const std::string& s, Point p = {0, 0, 0}, double t = 0.0) {
  return Expression::parse(s)(p, t);
}
}  // namespace

TEST_CASE("arithmetic and precedence") {
  CHECK(eval("1 + 2 * 3") == 7.0);
  CHECK(eval("(1 + 2) * 3") == 9.0);
  CHECK(eval("2^3^2") == 512.0);
  CHECK(eval("-2^2") == -4.0);
  CHECK(eval("8 / 2 / 2") == 2.0);
  CHECK(eval("1e-3 * 2") == doctest::Approx(2e-3));
  CHECK(eval("--3") == 3.0);
}

TEST_CASE("variables and constants") {
  CHECK(eval("x + 2*y + 3*z + 4*t", {1, 2, 3}, 4) == 30.0);
  CHECK(eval("pi") == doctest::Approx(std::numbers::pi));
  CHECK(eval("e") == doctest::Approx(std::numbers::e));
}

TEST_CASE("functions") {
  CHECK(eval("exp(0) + log(1) + sin(0) + cos(0) + tan(0)") == 2.0);
  CHECK(eval("sqrt(16) + abs(-2)") == 6.0);
  CHECK(eval("min(3, 4) + max(3, 4) + pow(2, 5)") == 39.0);
  CHECK(eval("chi(x, 0, 0.25)", {0.1, 0, 0}) == 1.0);
  CHECK(eval("chi(x, 0, 0.25)", {0.25, 0, 0}) == 1.0);
  CHECK(eval("chi(x, 0, 0.25)", {0.3, 0, 0}) == 0.0);
}

TEST_CASE("closed form of the accuracy case") {
  const Point p{0.3, 0.6, 0.8};
  const double want = (0.09 * 0.49 + 0.24 + 0.64 * 0.04) * std::exp(-0.5);
  CHECK(eval("(x^2*(1-x)^2 + y*(1-y) + z^2*(1-z)^2)*exp(-t)", p, 0.5) ==
        doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("syntax errors name the column") {
  CHECK_THROWS_AS(eval(""), InvalidArgument);
  CHECK_THROWS_AS(eval("1 +"), InvalidArgument);
  CHECK_THROWS_AS(eval("foo(1)"), InvalidArgument);
  CHECK_THROWS_AS(eval("w"), InvalidArgument);
  CHECK_THROWS_AS(eval("min(1)"), InvalidArgument);
  CHECK_THROWS_AS(eval("(1"), InvalidArgument);
  CHECK_THROWS_AS(eval("1 2"), InvalidArgument);
  try {
    eval("1 + * 2");
    FAIL("expected a throw");
  } catch (const InvalidArgument& err) {
    CHECK(std::string(err.what()).find("column 5") != std::string::npos);
  }
}
