#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "chronexp/expr.hpp"

using chronexp::expr::Bindings;
using chronexp::expr::DomainError;
using chronexp::expr::EvalError;
using chronexp::expr::Expression;
using chronexp::expr::ParseError;

TEST_CASE("parse shapes") {
  Expression e = Expression::parse("t*u^2");
  CHECK(e.variables() == std::vector<std::string>{"t", "u"});
  // mul(var t, pow(var u, 2))
  const auto& root = *e.root();
  CHECK(root.kind == Expression::Kind::Mul);
  CHECK(root.args[0]->kind == Expression::Kind::Variable);
  CHECK(root.args[0]->name == "t");
  CHECK(root.args[1]->kind == Expression::Kind::Pow);
  CHECK(root.args[1]->args[0]->name == "u");
  CHECK(root.args[1]->args[1]->value == 2.0);

  Expression s = Expression::parse("sin(x)+1");
  CHECK(s.root()->kind == Expression::Kind::Add);
  CHECK(s.root()->args[0]->kind == Expression::Kind::Call);
  CHECK(s.root()->args[1]->value == 1.0);
}

TEST_CASE("parse errors carry offsets") {
  try {
    Expression::parse("u***2");
    FAIL("expected ParseError");
  } catch (const ParseError& pe) {
    CHECK(pe.offset == 3);
  }
  CHECK_THROWS_AS(Expression::parse("foo(x)"), ParseError);
  CHECK_THROWS_AS(Expression::parse("sin(x, y)"), ParseError);  // arity
  CHECK_THROWS_AS(Expression::parse("pow(x)"), ParseError);
  CHECK_THROWS_AS(Expression::parse("2 x"), ParseError);  // implicit multiplication
  CHECK_THROWS_AS(Expression::parse("(x"), ParseError);
}

TEST_CASE("evaluation") {
  CHECK(Expression::parse("t*u^2").eval({{"t", 2}, {"u", 3}}) == doctest::Approx(18));
  CHECK(Expression::parse("exp(0)").eval({}) == doctest::Approx(1));
  CHECK(Expression::parse("2^3^2").eval({}) == doctest::Approx(512));  // right assoc

  EvalError err;
  CHECK(!Expression::parse("log(x)").try_eval({{"x", -1.0}}, &err).has_value());
  CHECK(err.message.find("log") != std::string::npos);
  CHECK_THROWS_AS(Expression::parse("log(x)").eval({{"x", -1.0}}), DomainError);
  CHECK_THROWS_AS(Expression::parse("1/x").eval({{"x", 0.0}}), DomainError);
  CHECK_THROWS_AS(Expression::parse("y+1").eval({{"x", 0.0}}), DomainError);  // unbound
}

TEST_CASE("derivatives: table cases") {
  Bindings at{{"t", 1.7}, {"u", -0.3}, {"x", 0.9}};

  Expression d1 = Expression::parse("t*u^2").derivative("u");
  CHECK(d1.eval(at) == doctest::Approx(2 * 1.7 * -0.3));

  Expression d2 = Expression::parse("sin(x)").derivative("x");
  CHECK(d2.eval(at) == doctest::Approx(std::cos(0.9)));

  Expression d3 = Expression::parse("u").derivative("t");
  CHECK(d3.is_constant());
  CHECK(d3.eval({}) == 0.0);

  // chain/quotient/pow-with-variable-exponent spot checks
  CHECK(Expression::parse("exp(2*x)").derivative("x").eval(at) ==
        doctest::Approx(2 * std::exp(1.8)));
  CHECK(Expression::parse("x^x").derivative("x").eval(at) ==
        doctest::Approx(std::pow(0.9, 0.9) * (std::log(0.9) + 1)));
  CHECK(Expression::parse("1/x").derivative("x").eval(at) ==
        doctest::Approx(-1.0 / (0.9 * 0.9)));
}

namespace {

// Small random expression trees over {x, y} for the finite-difference property.
Expression random_expr(std::mt19937_64& rng, int depth) {
  auto coin = [&](int n) { return static_cast<int>(rng() % n); };
  auto um = [&]() { return -1.0 + 2.0 * (rng() >> 11) * 0x1.0p-53; };
  if (depth <= 0 || coin(4) == 0) {
    switch (coin(3)) {
      case 0: return Expression::constant(std::round(um() * 4.0) / 2.0);
      case 1: return Expression::variable("x");
      default: return Expression::variable("y");
    }
  }
  switch (coin(7)) {
    case 0: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 1: return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
    case 2: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 3: return random_expr(rng, depth - 1) / random_expr(rng, depth - 1);
    case 4:
      return Expression::call(chronexp::expr::BuiltinFn::Sin, {random_expr(rng, depth - 1)});
    case 5:
      return Expression::call(chronexp::expr::BuiltinFn::Exp, {random_expr(rng, depth - 1)});
    default:
      return random_expr(rng, depth - 1).pow(Expression::constant(1 + coin(3)));
  }
}

}  // namespace

TEST_CASE("derivative matches central differences at order two") {
  std::mt19937_64 rng(20240817);
  auto um = [&]() { return -1.0 + 2.0 * (rng() >> 11) * 0x1.0p-53; };
  int tested = 0, exact_to_roundoff = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Expression e = random_expr(rng, 4);
    Expression de = e.derivative("x");
    Bindings b{{"x", 0.3 + 0.5 * um()}, {"y", 0.2 + 0.4 * um()}};
    auto exact = de.try_eval(b);
    if (!exact) continue;  // singular sample, skip

    auto fd_err = [&](double h) -> std::optional<double> {
      Bindings bp = b, bm = b;
      bp["x"] += h;
      bm["x"] -= h;
      auto fp = e.try_eval(bp), fm = e.try_eval(bm);
      if (!fp || !fm) return std::nullopt;
      double fd = (*fp - *fm) / (2 * h);
      return std::fabs(fd - *exact) / std::max(1.0, std::fabs(*exact));
    };
    const double h = 1e-3;
    auto e1 = fd_err(h), e2 = fd_err(h / 2);
    if (!e1 || !e2) continue;
    if (*e2 < 1e-11 || *e1 < 4e-11) {
      // derivative locally linear in x: the stencil is exact, which is the
      // property holding with C = 0
      ++exact_to_roundoff;
      continue;
    }
    double order = std::log2(*e1 / *e2);
    CHECK(order >= 1.9);
    ++tested;
  }
  CHECK(tested >= 25);
  CHECK(tested + exact_to_roundoff >= 80);
}

TEST_CASE("print-parse round trip is idempotent") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    Expression e = random_expr(rng, 4);
    Expression reparsed = Expression::parse(e.str());
    CHECK(reparsed.same_tree(e));
    CHECK(Expression::parse(reparsed.str()).same_tree(reparsed));
  }
  // fixed shapes with delicate precedence
  for (const char* s : {"x-(y-1)", "x-y-1", "2*(x+y)", "x/(y*x)", "(x^2)^3",
                        "x^(y^2)", "-(x+y)", "-x^2", "(-x)^2", "x^-2"}) {
    Expression e = Expression::parse(s);
    CHECK(Expression::parse(e.str()).same_tree(e));
  }
}
