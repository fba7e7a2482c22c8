#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sasaki/expression.hpp"

using namespace sasaki;

namespace {

std::size_t parse_position(const std::string& text) {
  try {
    parse_expression(text);
  } catch (const ParseError& e) {
    return e.position();
  }
  ADD_FAILURE() << "no parse error for " << text;
  return 0;
}

}  // namespace

TEST(Expression, PrecedenceAndAssociativity) {
  EXPECT_DOUBLE_EQ(parse_expression("1 + 2 * 3").eval(0, 0), 7.0);
  EXPECT_DOUBLE_EQ(parse_expression("(1 + 2) * 3").eval(0, 0), 9.0);
  EXPECT_DOUBLE_EQ(parse_expression("8 / 4 / 2").eval(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(parse_expression("2 ^ 3 ^ 2").eval(0, 0), 512.0);
  EXPECT_DOUBLE_EQ(parse_expression("-u ^ 2").eval(3, 0), -9.0);
  EXPECT_DOUBLE_EQ(parse_expression("2 ^ -1").eval(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(parse_expression("u - v - 1").eval(5, 2), 2.0);
  EXPECT_DOUBLE_EQ(parse_expression("+u").eval(4, 0), 4.0);
  EXPECT_DOUBLE_EQ(parse_expression("1.5e-1 * 2").eval(0, 0), 0.3);
  EXPECT_DOUBLE_EQ(parse_expression("cos(pi)").eval(0, 0), -1.0);
}

TEST(Expression, FunctionsMatchTheStandardLibrary) {
  const double u = 0.7, v = -0.3;
  EXPECT_NEAR(parse_expression("sin(u) * cos(v)").eval(u, v), std::sin(u) * std::cos(v), 1e-15);
  EXPECT_NEAR(parse_expression("tan(u + v)").eval(u, v), std::tan(u + v), 1e-15);
  EXPECT_NEAR(parse_expression("exp(v) + log(u)").eval(u, v), std::exp(v) + std::log(u), 1e-15);
  EXPECT_NEAR(parse_expression("sqrt(u^2 + v^2)").eval(u, v), std::hypot(u, v), 1e-15);
}

TEST(Expression, JetPartialsAreExact) {
  // f = u^2 v + sin(u v): f_u = 2uv + v cos(uv), f_uv = 2u + cos(uv) - uv sin(uv)
  const auto f = parse_expression("u^2 * v + sin(u * v)");
  const double u0 = 0.4, v0 = 1.3;
  const Jet J = f.eval(Jet::variable(u0, 2, 0), Jet::variable(v0, 2, 1));
  const double w = u0 * v0;
  EXPECT_NEAR(J.value(), u0 * u0 * v0 + std::sin(w), 1e-15);
  EXPECT_NEAR(J.d1(0), 2 * u0 * v0 + v0 * std::cos(w), 1e-14);
  EXPECT_NEAR(J.d1(1), u0 * u0 + u0 * std::cos(w), 1e-14);
  EXPECT_NEAR(J.d2(0, 1), 2 * u0 + std::cos(w) - w * std::sin(w), 1e-14);
  EXPECT_NEAR(J.d3(0, 0, 0), -v0 * v0 * v0 * std::cos(w), 1e-13);
}

TEST(Expression, ParseErrorsCarryPositions) {
  EXPECT_EQ(parse_position("u +* v"), 3u);
  EXPECT_EQ(parse_position("sin u"), 4u);
  EXPECT_EQ(parse_position("foo(u)"), 0u);
  EXPECT_EQ(parse_position("(u + v"), 6u);
  EXPECT_EQ(parse_position(""), 0u);
  EXPECT_EQ(parse_position("u v"), 2u);
  EXPECT_EQ(parse_position("2 * w"), 4u);
}

TEST(Expression, ComponentPositionsAreGlobal) {
  const auto c = parse_components("u; v; u*v");
  ASSERT_EQ(c.size(), 3u);
  EXPECT_DOUBLE_EQ(c[2].eval(2, 3), 6.0);
  try {
    parse_components("u; v; u*v +* 2");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 11u);
    EXPECT_NE(std::string(e.what()).find("unexpected '*'"), std::string::npos);
  }
}

TEST(Expression, DomainErrorsNameTheSubexpression) {
  const auto f = parse_expression("u + log(u - 1)");
  try {
    f.eval(0.5, 0.0);
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_NE(std::string(e.what()).find("in 'log(u - 1)'"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_expression("sqrt(v)").eval(0.0, -1.0), EvaluationError);
}
