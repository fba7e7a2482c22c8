#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sasaki/jet.hpp"
#include "sasaki/linalg.hpp"

using namespace sasaki;

TEST(JetSeeding, TwoVariables) {
  auto x = seed_independents({1.0, 2.0});
  ASSERT_EQ(x.size(), 2u);
  EXPECT_EQ(x[0].value(), 1.0);
  EXPECT_EQ(x[0].d1(0), 1.0);
  EXPECT_EQ(x[0].d1(1), 0.0);
  EXPECT_EQ(x[1].value(), 2.0);
  EXPECT_EQ(x[1].d1(1), 1.0);
}

TEST(JetSeeding, SingleVariableAtZero) {
  auto x = seed_independents({0.0});
  ASSERT_EQ(x.size(), 1u);
  EXPECT_EQ(x[0].value(), 0.0);
  EXPECT_EQ(x[0].d1(0), 1.0);
}

TEST(JetSeeding, EmptyPointIsDimensionError) {
  std::vector<double> empty;
  EXPECT_THROW(seed_independents(std::span<const double>(empty)), DimensionError);
}

TEST(JetArithmetic, SquareOfVariable) {
  auto x = seed_independents({3.0});
  Jet y = x[0] * x[0];
  EXPECT_EQ(y.value(), 9.0);
  EXPECT_EQ(y.d1(0), 6.0);
  EXPECT_EQ(y.d2(0, 0), 2.0);
  EXPECT_EQ(y.d3(0, 0, 0), 0.0);
}

TEST(JetApply, Constant) {
  auto x = seed_independents({0.3, -1.0});
  Jet f = jet_apply([](std::span<const Jet>) { return Jet(5.0); }, x);
  EXPECT_EQ(f.value(), 5.0);
  EXPECT_EQ(f.d1(0), 0.0);
  EXPECT_EQ(f.d2(0, 1), 0.0);
  EXPECT_EQ(f.d3(1, 1, 1), 0.0);
}

TEST(JetApply, SineAtZero) {
  auto x = seed_independents({0.0});
  Jet f = jet_apply([](std::span<const Jet> a) { return sin(a[0]); }, x);
  EXPECT_NEAR(f.value(), 0.0, 1e-16);
  EXPECT_NEAR(f.d1(0), 1.0, 1e-16);
  EXPECT_NEAR(f.d2(0, 0), 0.0, 1e-16);
  EXPECT_NEAR(f.d3(0, 0, 0), -1.0, 1e-16);
}

TEST(JetApply, Bilinear) {
  auto x = seed_independents({2.0, 3.0});
  Jet f = jet_apply([](std::span<const Jet> a) { return a[0] * a[1]; }, x);
  EXPECT_EQ(f.d1(0), 3.0);
  EXPECT_EQ(f.d1(1), 2.0);
  EXPECT_EQ(f.d2(0, 1), 1.0);
  EXPECT_EQ(f.d2(0, 0), 0.0);
  EXPECT_EQ(f.d3(0, 0, 1), 0.0);
}

TEST(JetApply, DomainViolationsNameTheOperation) {
  auto x = seed_independents({-0.5});
  try {
    (void)log(x[0]);
    FAIL();
  } catch (const EvaluationError& e) {
    EXPECT_NE(std::string(e.what()).find("log"), std::string::npos);
  }
  EXPECT_THROW((void)sqrt(x[0]), EvaluationError);
  EXPECT_THROW((void)(Jet(1.0) / (x[0] + 0.5)), EvaluationError);
}

TEST(JetApply, MixedDimensionsRejected) {
  auto x = seed_independents({1.0});
  auto y = seed_independents({1.0, 2.0});
  std::vector<Jet> args{x[0], y[0]};
  EXPECT_THROW(jet_apply([](std::span<const Jet> a) { return a[0] + a[1]; }, args), DimensionError);
}

TEST(JetExtract, Identity) {
  auto x = seed_independents({4.0});
  EXPECT_EQ(extract_partial(x[0], {0}), 1.0);
}

TEST(JetExtract, CubeThirdDerivative) {
  auto x = seed_independents({1.0});
  EXPECT_EQ(extract_partial(x[0] * x[0] * x[0], {0, 0, 0}), 6.0);
}

TEST(JetExtract, MixedThirdPartial) {
  auto x = seed_independents({1.0, 1.0});
  Jet f = x[0] * x[0] * x[1];
  EXPECT_EQ(extract_partial(f, {0, 0, 1}), 2.0);
  EXPECT_EQ(extract_partial(f, {0, 1, 0}), 2.0);
  EXPECT_EQ(extract_partial(f, {1, 0, 0}), 2.0);
}

TEST(JetExtract, OrderFourUnsupported) {
  auto x = seed_independents({1.0});
  EXPECT_THROW(extract_partial(x[0], {0, 0, 0, 0}), UnsupportedOrderError);
}

TEST(JetExtract, MixedPartialsCommuteExactly) {
  auto x = seed_independents({0.3, 0.7, -0.2});
  Jet f = exp(x[0] * x[1]) * sin(x[2] + x[0]) / (1.0 + x[1] * x[1]);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      EXPECT_EQ(extract_partial(f, {i, j}), extract_partial(f, {j, i}));
      for (int k = 0; k < 3; ++k) EXPECT_EQ(extract_partial(f, {i, j, k}), extract_partial(f, {k, j, i}));
    }
}

TEST(JetOracle, RandomPolynomialsMatchSymbolicDerivatives) {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> nv(1, 7);
  std::uniform_real_distribution<double> coord(-1.2, 1.2);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = nv(rng);
    const auto P = oracle::Polynomial::random(d, 5, 12, rng);
    std::vector<double> pt(static_cast<std::size_t>(d));
    for (auto& c : pt) c = coord(rng);
    const Jet J = P.eval(seed_independents(pt));
    worst = std::max(worst, std::abs(J.value() - P.eval(pt)));
    for (int i = 0; i < d; ++i) {
      const auto Pi = P.derivative(i);
      worst = std::max(worst, std::abs(J.d1(i) - Pi.eval(pt)));
      for (int j = 0; j < d; ++j) {
        const auto Pij = Pi.derivative(j);
        worst = std::max(worst, std::abs(J.d2(i, j) - Pij.eval(pt)));
        for (int k = 0; k < d; ++k)
          worst = std::max(worst, std::abs(J.d3(i, j, k) - Pij.derivative(k).eval(pt)));
      }
    }
  }
  EXPECT_LT(worst, 1e-12);
}

namespace {

template <class T>
T smooth_fn(const T& x, const T& y) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  return sin(x * y) * exp(0.3 * x) + log(2.0 + cos(y)) * sqrt(1.5 + x * x) + 1.0 / (2.0 + x * y);
}

double fd_error(double h) {
  const double x0 = 0.4, y0 = -0.7;
  auto s = seed_independents({x0, y0});
  const Jet J = smooth_fn(s[0], s[1]);
  auto f = [](double x, double y) { return smooth_fn(x, y); };
  double err = 0.0;
  err = std::max(err, std::abs(J.d1(0) - (f(x0 + h, y0) - f(x0 - h, y0)) / (2 * h)));
  err = std::max(err, std::abs(J.d1(1) - (f(x0, y0 + h) - f(x0, y0 - h)) / (2 * h)));
  err = std::max(err, std::abs(J.d2(0, 0) - (f(x0 + h, y0) - 2 * f(x0, y0) + f(x0 - h, y0)) / (h * h)));
  err = std::max(err, std::abs(J.d2(1, 1) - (f(x0, y0 + h) - 2 * f(x0, y0) + f(x0, y0 - h)) / (h * h)));
  err = std::max(err, std::abs(J.d2(0, 1) - (f(x0 + h, y0 + h) - f(x0 + h, y0 - h) - f(x0 - h, y0 + h) +
                                             f(x0 - h, y0 - h)) / (4 * h * h)));
  return err;
}

}  // namespace

TEST(JetOracle, CentralDifferencesConvergeQuadratically) {
  const double e1 = fd_error(1e-2), e2 = fd_error(5e-3), e3 = fd_error(2.5e-3);
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_GT(e2 / e3, 3.5);
  EXPECT_LT(e3, 1e-5);
}

TEST(JetCompose, MatchesDirectEvaluation) {
  auto uv = seed_independents({0.3, -0.4});
  JetVector inner{sin(uv[0]) + uv[1] * uv[1], exp(uv[1]) * uv[0], uv[0] - 2.0 * uv[1]};
  auto outer_fn = [](std::span<const Jet> x) { return x[0] * x[1] * x[2] + cos(x[0] - x[2]) + x[1] * x[1] * x[1]; };
  const Jet direct = outer_fn(inner);
  const auto at = seed_independents({inner[0].value(), inner[1].value(), inner[2].value()});
  const Jet composed = compose(outer_fn(at), inner);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(direct.d1(i), composed.d1(i), 1e-13);
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(direct.d2(i, j), composed.d2(i, j), 1e-13);
      for (int k = 0; k < 2; ++k) EXPECT_NEAR(direct.d3(i, j, k), composed.d3(i, j, k), 1e-12);
    }
  }
}

TEST(JetAntiderivative, RecoversPolynomial) {
  // F(s,t) = s^2 t + t^3, dF/ds = 2 s t, F(0,t) = t^3.
  auto st = seed_independents({0.0, 0.5});
  const Jet integrand = 2.0 * st[0] * st[1];
  const Jet initial = st[1] * st[1] * st[1];
  const Jet F = antiderivative(integrand, 0, initial);
  const Jet ref = st[0] * st[0] * st[1] + st[1] * st[1] * st[1];
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(F.d1(i), ref.d1(i), 1e-15);
    for (int j = 0; j < 2; ++j) {
      EXPECT_NEAR(F.d2(i, j), ref.d2(i, j), 1e-15);
      for (int k = 0; k < 2; ++k) EXPECT_NEAR(F.d3(i, j, k), ref.d3(i, j, k), 1e-15);
    }
  }
}

TEST(JetLinalg, SolveCarriesDerivatives) {
  auto x = seed_independents({0.2, 0.9});
  JetMatrix m(2, 2);
  m(0, 0) = 2.0 + x[0];
  m(0, 1) = x[1];
  m(1, 0) = x[1];
  m(1, 1) = 3.0 - x[0] * x[1];
  const JetMatrix inv = inverse(m);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Jet s(0.0);
      for (int k = 0; k < 2; ++k) s += m(i, k) * inv(k, j);
      EXPECT_NEAR(s.value(), i == j ? 1.0 : 0.0, 1e-14);
      for (int a = 0; a < 2; ++a) {
        EXPECT_NEAR(s.d1(a), 0.0, 1e-14);
        for (int b = 0; b < 2; ++b) {
          EXPECT_NEAR(s.d2(a, b), 0.0, 1e-13);
          for (int c = 0; c < 2; ++c) EXPECT_NEAR(s.d3(a, b, c), 0.0, 1e-12);
        }
      }
    }
}
