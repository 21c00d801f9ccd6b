#include <doctest.h>

#include <cmath>
#include <numbers>

#include "metallab/errors.hpp"
#include "metallab/expr.hpp"
#include "support/expr_corpus.hpp"

using namespace metallab;

namespace {

const std::vector<std::string> kUV = {"u", "v"};

Jet2 at(std::string_view src, std::vector<std::string> names, std::vector<double> values, const Constants& c = {}) {
  return eval_jet2(parse(src, names), Point{names, std::move(values)}, c);
}

}  // namespace

TEST_SUITE("exprdsl") {

TEST_CASE("parse builds the expected tree") {
  const std::vector<std::string> vars = {"u", "t"};
  const Expr e = parse("u*cos(t)", vars);
  CHECK(e == Expr::binary(BinaryOp::Mul, Expr::variable("u"), Expr::unary(UnaryOp::Cos, Expr::variable("t"))));
  CHECK(e.variables() == std::vector<std::string>{"t", "u"});
}

TEST_CASE("precedence and associativity") {
  const Expr e = parse("1 + 2*u^2^1 - -v", kUV);
  CHECK(print(e) == "((1 + (2 * (u ^ (2 ^ 1)))) - (-v))");
  CHECK(print(parse("-u^2", kUV)) == "(-(u ^ 2))");
  CHECK(parse("u**3", kUV) == parse("u ^ 3", kUV));
}

TEST_CASE("syntax errors report byte offsets") {
  const std::vector<std::string> u = {"u"};
  try {
    parse("u**", u);
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 3);
  }
  CHECK_THROWS_AS(parse("(u", u), SyntaxError);
  CHECK_THROWS_AS(parse("", u), SyntaxError);
  CHECK_THROWS_AS(parse("u 2", u), SyntaxError);
  CHECK_THROWS_AS(parse("u^v", kUV), Error);
}

TEST_CASE("unknown identifiers are named") {
  try {
    parse("u + w", kUV);
    FAIL("expected an unknown identifier");
  } catch (const UnknownIdentifier& e) {
    CHECK(e.name() == "w");
    CHECK(e.offset() == 4);
  }
  const std::vector<std::string> extra = {"t"};
  CHECK_NOTHROW(parse("u*cos(t)", kUV, extra));
}

TEST_CASE("jet of u^2*v") {
  const Jet2 j = at("u^2*v", kUV, {2, 3});
  CHECK(j.value() == 12);
  CHECK(j.gradient() == std::vector<double>{12, 4});
  CHECK(j.hessian() == std::vector<double>{6, 4, 4, 0});
}

TEST_CASE("jet of sin at zero and of a constant") {
  const Jet2 s = at("sin(t)", {"t"}, {0});
  CHECK(s.value() == 0);
  CHECK(s.grad(0) == 1);
  CHECK(s.hess(0, 0) == 0);

  const Jet2 c = at("7", kUV, {0.3, -1});
  CHECK(c.value() == 7);
  CHECK(c.is_constant());
}

TEST_CASE("named constants") {
  const Constants c{{"sigma", 2.5}, {"sigma_bar", -0.4}};
  CHECK(at("pi", kUV, {0, 0}).value() == doctest::Approx(std::numbers::pi));
  CHECK(at("sigma*u + sigma_bar", kUV, {2, 0}, c).value() == doctest::Approx(4.6));
  CHECK_THROWS_AS(at("sigma", kUV, {0, 0}), Error);
}

TEST_CASE("domain errors locate the node") {
  const auto offset_of = [](std::string_view src, double u) {
    try {
      at(src, {"u"}, {u});
    } catch (const DomainError& e) {
      return static_cast<long>(e.offset());
    }
    return -1L;
  };
  CHECK(offset_of("1 + log(u)", 0.0) == 4);
  CHECK(offset_of("1/u", 0.0) >= 0);
  CHECK(offset_of("sqrt(u - 1)", 0.5) == 0);
  CHECK(offset_of("u^0.5", -1.0) >= 0);
  CHECK(offset_of("log(u)", 2.0) == -1);
}

TEST_CASE("integer powers and negative bases") {
  const Jet2 j = at("u^3", {"u"}, {-2});
  CHECK(j.value() == -8);
  CHECK(j.grad(0) == 12);
  CHECK(j.hess(0, 0) == -12);
  const Jet2 r = at("u^-2", {"u"}, {2});
  CHECK(r.value() == doctest::Approx(0.25));
  CHECK(r.grad(0) == doctest::Approx(-0.25));
  CHECK(r.hess(0, 0) == doctest::Approx(0.375));
}

TEST_CASE("sum and product rules are exact at the jet level") {
  const auto corpus = testing::expression_corpus(40, 11);
  for (std::size_t i = 0; i + 1 < corpus.size(); i += 2) {
    const auto& a = corpus[i];
    const auto& b = corpus[i + 1];
    const Expr sum = a.expr + b.expr;
    const Jet2 ja = eval_jet2(a.expr, a.point), jb = eval_jet2(b.expr, a.point);
    CHECK(eval_jet2(sum, a.point) == ja + jb);
    CHECK(eval_jet2(a.expr * b.expr, a.point) == ja * jb);
  }
}

TEST_CASE("hessians are exactly symmetric") {
  for (const auto& c : testing::expression_corpus(50, 5)) {
    const Jet2 j = eval_jet2(c.expr, c.point);
    for (std::size_t r = 0; r < j.size(); ++r)
      for (std::size_t s = 0; s < j.size(); ++s) REQUIRE(j.hess(r, s) == j.hess(s, r));
  }
}

TEST_CASE("print then parse is the identity") {
  for (const auto& c : testing::expression_corpus(200, 3)) {
    const std::string text = print(c.expr);
    INFO(c.source);
    CHECK(parse(text, testing::kCorpusVars) == c.expr);
    CHECK(print(parse(text, testing::kCorpusVars)) == text);
  }
}

TEST_CASE("derivatives agree with finite differences") {
  const auto corpus = testing::expression_corpus(250, 2024);
  for (const auto& c : corpus) {
    const auto cmp = testing::compare_with_fd(c);
    INFO(c.source);
    CHECK(cmp.grad_error < 1e-6);
    CHECK(cmp.hess_error < 1e-4);
  }
}

}
