#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "nholo/errors.hpp"
#include "nholo/expression.hpp"
#include "test_support.hpp"

using namespace nholo;

namespace {

Eigen::VectorXd pt(std::initializer_list<double> v) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

double eval(const char* src, const Dims& dims, std::initializer_list<double> p) {
  return evaluate(parse(src, dims), pt(p));
}

}  // namespace

TEST_CASE("precedence and associativity") {
  Dims d21(2, 1);
  CHECK(eval("x1 - x2 - y1", d21, {1, 2, 3}) == -4.0);      // left associative
  CHECK(eval("x1 - (x2 - y1)", d21, {1, 2, 3}) == 2.0);
  CHECK(eval("2*x1^2", d21, {3, 0, 0}) == 18.0);            // power over product
  CHECK(eval("-x1^2", d21, {3, 0, 0}) == -9.0);             // power over negation
  CHECK(eval("(-x1)^2", d21, {3, 0, 0}) == 9.0);
  CHECK(eval("x1 + x2*y1", d21, {1, 2, 3}) == 7.0);
  CHECK(eval("12/x2/y1", d21, {0, 2, 3}) == 2.0);           // left associative
  CHECK(eval("x1/x2*y1", d21, {8, 2, 3}) == 12.0);
  CHECK(eval("--x1", d21, {5, 0, 0}) == 5.0);
  // exponent binds to the right; varying exponent goes through exp/log
  CHECK(eval("2^x1^2", d21, {2, 0, 0}) == doctest::Approx(16.0).epsilon(1e-14));
}

TEST_CASE("number forms") {
  Dims d11(1, 1);
  CHECK(eval(".5 + x1", d11, {0, 0}) == 0.5);
  CHECK(eval("1e-3", d11, {0, 0}) == 1e-3);
  CHECK(eval("2.5E+2", d11, {0, 0}) == 250.0);
  CHECK(eval("3.25*x1", d11, {2, 0}) == 6.5);
}

TEST_CASE("coordinate axes map into the combined point vector") {
  Dims d23(2, 3);
  CHECK(eval("x1", d23, {10, 20, 30, 40, 50}) == 10.0);
  CHECK(eval("x2", d23, {10, 20, 30, 40, 50}) == 20.0);
  CHECK(eval("y1", d23, {10, 20, 30, 40, 50}) == 30.0);
  CHECK(eval("y3", d23, {10, 20, 30, 40, 50}) == 50.0);
}

TEST_CASE("parse errors carry byte offsets") {
  Dims d11(1, 1);
  auto offset_of = [&](const char* src, Dims dims = Dims(1, 1)) {
    try {
      parse(src, dims);
    } catch (const ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1L;
  };

  CHECK(offset_of("x1 + * y1") == 5);
  CHECK(offset_of("x1 x2", Dims(2, 1)) == 3);
  CHECK(offset_of("(x1 + y1") == 8);
  CHECK(offset_of("x1 + @") == 5);
  CHECK(offset_of("") == 0);
  CHECK(offset_of("sin x1") == 4);
  CHECK(offset_of("foo(x1)") == 0);

  try {
    parse("y3", Dims(2, 2));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 0);
    CHECK(e.message() == "coordinate index out of range: y3 (m = 2)");
  }
  CHECK_THROWS_AS(parse("x3", Dims(2, 2)), ParseError);
  CHECK_THROWS_AS(parse("x0", Dims(2, 2)), ParseError);
  CHECK_NOTHROW(parse("x2 + y2", Dims(2, 2)));
}

TEST_CASE("printer emits a canonical reparseable form") {
  Dims d21(2, 1);
  CHECK(parse("x1 * (x2 + y1)", d21).str() == "x1*(x2 + y1)");
  CHECK(parse("x1^-2", d21).str() == "x1^(-2)");
  CHECK(parse("(x1 + x2)^2", d21).str() == "(x1 + x2)^2");
  CHECK(parse("(x1^2)^3", d21).str() == "(x1^2)^3");
  CHECK(parse("x1 - (x2 - y1)", d21).str() == "x1 - (x2 - y1)");
  CHECK(parse("sin(x1)*cos(y1)", d21).str() == "sin(x1)*cos(y1)");
  CHECK(parse("  x1   +y1 ", d21).str() == "x1 + y1");
}

TEST_CASE("structural comparison") {
  Dims d21(2, 1);
  CHECK(parse("x1 + x2", d21).same_structure(parse("x1+x2", d21)));
  CHECK(!parse("x1 + x2", d21).same_structure(parse("x2 + x1", d21)));
  CHECK(!parse("x1*x2", d21).same_structure(parse("x1/x2", d21)));
  CHECK(!parse("x1^2", d21).same_structure(parse("x1^3", d21)));
  CHECK(!parse("sin(x1)", d21).same_structure(parse("cos(x1)", d21)));
}

TEST_CASE("round trip: parse, print, reparse is structurally stable") {
  nholo::testing::Rng rng(31415u);
  Dims dims(2, 2);
  for (int trial = 0; trial < 300; ++trial) {
    std::string src = nholo::testing::random_expr(rng, dims, 4);
    Expression e1 = parse(src, dims);
    std::string printed = e1.str();
    Expression e2 = parse(printed, dims);
    REQUIRE_MESSAGE(e1.same_structure(e2), "source: ", src,
                    "  printed: ", printed);
    CHECK(e2.str() == printed);  // printing is a fixed point
  }
}

TEST_CASE("round trip preserves values") {
  nholo::testing::Rng rng(2718u);
  Dims dims(2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::string src = nholo::testing::random_expr(rng, dims, 3);
    Expression e1 = parse(src, dims);
    Expression e2 = parse(e1.str(), dims);
    Eigen::VectorXd p = nholo::testing::random_point(rng, 4);
    CHECK(evaluate(e1, p) == evaluate(e2, p));  // bitwise: same tree shape
  }
}

TEST_CASE("evaluation input validation") {
  Dims d21(2, 1);
  Expression e = parse("x1 + y1", d21);
  CHECK_THROWS_AS(evaluate_jet(e, pt({1, 2}), 1), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_jet(e, pt({1, 2, 3}), 7), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_jet(e, pt({1, 2, 3}), -1), std::invalid_argument);
  CHECK_NOTHROW(evaluate_jet(e, pt({1, 2, 3}), 4));
}
