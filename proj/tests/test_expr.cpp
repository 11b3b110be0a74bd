#include <doctest.h>

#include "lcd/expr.hpp"

using namespace lcd;
using namespace lcd::expr;

TEST_CASE("grammar builds the expected tree") {
  const Expression e = parse("v1^2/(2*x2^2)");
  CHECK(e->kind == Kind::Div);
  CHECK(depth(e) == 4);
  CHECK(free_variables(e) == std::vector<std::string>{"v1", "x2"});
}

TEST_CASE("precedence and associativity") {
  const EvalContext none;
  CHECK(evaluate(parse("2^3^2"), none) == doctest::Approx(512.0));
  CHECK(evaluate(parse("-2^2"), none) == doctest::Approx(-4.0));
  CHECK(evaluate(parse("2^-1"), none) == doctest::Approx(0.5));
  CHECK(evaluate(parse("8/2/2"), none) == doctest::Approx(2.0));
  CHECK(evaluate(parse("1-2-3"), none) == doctest::Approx(-4.0));
  CHECK(evaluate(parse("1.5e2 + .5"), none) == doctest::Approx(150.5));
  CHECK(evaluate(parse("atan2(1, 1)*4"), none) == doctest::Approx(3.141592653589793));
}

TEST_CASE("syntax errors carry position and expectations") {
  try {
    parse("sin(");
    FAIL("no error");
  } catch (const SyntaxError& e) {
    CHECK(e.line == 1);
    CHECK(e.column == 5);
    CHECK(std::string(e.what()).find("expected expression") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("x1 +* 2"), SyntaxError);
  CHECK_THROWS_AS(parse("foo(1)"), SyntaxError);
  CHECK_THROWS_AS(parse("pow(1)"), SyntaxError);
  CHECK_THROWS_AS(parse("sin"), SyntaxError);
  CHECK_THROWS_AS(parse("(x1"), SyntaxError);
  CHECK_THROWS_AS(parse("x1 $ 2"), SyntaxError);
  try {
    parse("x1 +\n  )");
    FAIL("no error");
  } catch (const SyntaxError& e) {
    CHECK(e.line == 2);
    CHECK(e.column == 3);
  }
}

TEST_CASE("render round trip") {
  for (const char* s : {"x1+2*v2", "-(x1-x2)^2/3", "sin(x1)*exp(-v1^2)", "atan2(x2, x1) - 1e-3",
                        "2^3^2", "(2^3)^2", "a-(b-c)", "-x^-2"}) {
    const Expression e = parse(s);
    CHECK(structurally_equal(parse(render(e)), e));
  }
}

TEST_CASE("evaluation and domain errors") {
  CHECK(evaluate(parse("x1+v1"), {{"x1", 1}, {"v1", 2}}) == 3.0);
  CHECK(evaluate(parse("sqrt(x1^2)"), {{"x1", -3}}) == doctest::Approx(3.0));
  CHECK_THROWS_AS(evaluate(parse("log(x1)"), {{"x1", 0}}), DomainError);
  CHECK_THROWS_AS(evaluate(parse("sqrt(x1)"), {{"x1", -1}}), DomainError);
  CHECK_THROWS_AS(evaluate(parse("1/x1"), {{"x1", 0}}), DomainError);
  CHECK_THROWS_AS(evaluate(parse("exp(x1)"), {{"x1", 1000}}), DomainError);
  CHECK_THROWS_AS(evaluate(parse("y"), {{"x1", 0}}), DomainError);
}

TEST_CASE("compiled evaluation matches the tree walk") {
  const Expression e = parse("x1*cos(v2) + abs(x2)^1.5 - pow(v1, 3)/(1+x1^2)");
  const std::vector<std::string> slots = {"x1", "x2", "v1", "v2"};
  const Compiled c(e, slots);
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> vals;
    EvalContext ctx;
    for (const auto& s : slots) {
      vals.push_back(rng.uniform(-2, 2));
      ctx[s] = vals.back();
    }
    CHECK(c(vals) == doctest::Approx(evaluate(e, ctx)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(Compiled(parse("q + 1"), slots), DomainError);
}
