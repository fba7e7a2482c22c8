#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sasaki/models.hpp"
#include "sasaki/riemann.hpp"

using namespace sasaki;

namespace {

MetricChart euclidean(int d) {
  MetricChart c;
  c.dim = d;
  c.metric = [d](std::span<const Jet>) { return identity_jets(d); };
  c.domain = Box::cube(d, 100.0);
  return c;
}

MetricChart round_two_sphere() {
  MetricChart c;
  c.dim = 2;
  c.metric = [](std::span<const Jet> x) {
    JetMatrix g(2, 2);
    g(0, 0) = Jet(1.0);
    g(0, 1) = Jet(0.0);
    g(1, 0) = Jet(0.0);
    g(1, 1) = sin(x[0]) * sin(x[0]);
    return g;
  };
  c.domain = {Vec::Constant(2, -10.0), Vec::Constant(2, 10.0)};
  return c;
}

MetricChart scaled(const MetricChart& base, double lambda_sq) {
  MetricChart c = base;
  auto f = base.metric;
  c.metric = [f, lambda_sq](std::span<const Jet> x) {
    JetMatrix g = f(x);
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < g.cols(); ++j) g(i, j) = lambda_sq * g(i, j);
    return g;
  };
  return c;
}

Vec random_vec(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = nd(rng);
  return v;
}

std::vector<ModelSpace> all_models() {
  return {make_model(ModelKind::standard_sphere, 1), make_model(ModelKind::deformed_sphere, 2, {.a = 2.0}),
          make_model(ModelKind::heisenberg, 2), make_model(ModelKind::ball_times_line, 1, {.k = -4.0})};
}

}  // namespace

TEST(Christoffel, EuclideanIsZero) {
  const auto G = christoffel(euclidean(3), Vec::Constant(3, 0.4));
  EXPECT_EQ(G.max_abs(), 0.0);
}

TEST(Christoffel, RoundTwoSphereClosedForm) {
  const double th = std::numbers::pi / 3;
  Vec p(2);
  p << th, 0.0;
  const auto G = christoffel(round_two_sphere(), p);
  EXPECT_NEAR(G(0, 1, 1), -std::sin(th) * std::cos(th), 1e-14);
  EXPECT_NEAR(G(1, 0, 1), std::cos(th) / std::sin(th), 1e-14);
  const auto F = oracle::fd_christoffel(round_two_sphere(), p, 1e-4);
  EXPECT_LT(oracle::max_diff(G, F), 1e-7);
}

TEST(Christoffel, HeisenbergOriginMatchesFiniteDifferences) {
  const auto m = make_model(ModelKind::heisenberg, 3);
  const Vec p = Vec::Zero(7);
  EXPECT_LT(oracle::max_diff(christoffel(m.chart, p), oracle::fd_christoffel(m.chart, p, 1e-4)), 1e-8);
}

TEST(Christoffel, TorsionFreeExactly) {
  for (const auto& m : all_models()) {
    const auto p = sample_points(m, 1, 3)[0];
    const auto G = christoffel(m.chart, p);
    for (int k = 0; k < m.dim(); ++k)
      for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) EXPECT_EQ(G(k, i, j), G(k, j, i));
  }
}

TEST(Christoffel, MetricCompatibility) {
  for (const auto& m : all_models()) {
    double worst = 0.0;
    for (const auto& p : sample_points(m, 100, 11)) {
      const int d = m.dim();
      const JetMatrix g = m.chart.metric_jets(p, 1);
      const auto G = christoffel(m.chart, p);
      for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            double v = g(i, j).d1(k);
            for (int l = 0; l < d; ++l) v -= G(l, k, i) * g(l, j).value() + G(l, k, j) * g(i, l).value();
            worst = std::max(worst, std::abs(v));
          }
    }
    EXPECT_LT(worst, 1e-9) << m.name();
  }
}

TEST(Riemann, EuclideanIsZero) {
  EXPECT_EQ(riemann(euclidean(3), Vec::Constant(3, -0.2)).max_abs(), 0.0);
}

TEST(Riemann, UnitThreeSphereSectionalCurvatureIsOne) {
  const auto m = make_model(ModelKind::standard_sphere, 1);
  std::mt19937_64 rng(5);
  const auto pts = sample_points(m, 50, 9);
  for (const auto& p : pts) {
    const double K = sectional_curvature(m.chart, p, random_vec(3, rng), random_vec(3, rng));
    EXPECT_NEAR(K, 1.0, 1e-8);
  }
}

TEST(Riemann, ConstantScalingDividesSectionalCurvature) {
  const auto m = make_model(ModelKind::deformed_sphere, 1, {.a = 2.0});
  const MetricChart s = scaled(m.chart, 9.0);
  std::mt19937_64 rng(6);
  for (const auto& p : sample_points(m, 10, 10)) {
    const Vec X = random_vec(3, rng), Y = random_vec(3, rng);
    EXPECT_NEAR(sectional_curvature(s, p, X, Y), sectional_curvature(m.chart, p, X, Y) / 9.0, 1e-10);
  }
}

TEST(Riemann, SymmetriesAndFirstBianchi) {
  for (const auto& m : all_models()) {
    const int d = m.dim();
    double worst = 0.0;
    for (const auto& p : sample_points(m, 10, 21)) {
      const auto A = evaluate_ambient(m.chart, p, 1);
      const auto L = lowered_riemann(A);
      for (int l = 0; l < d; ++l)
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
              worst = std::max(worst, std::abs(L(l, i, j, k) + L(l, j, i, k)));
              worst = std::max(worst, std::abs(L(l, i, j, k) + L(k, i, j, l)));
              worst = std::max(worst, std::abs(A.riemann(l, i, j, k) + A.riemann(l, j, k, i) + A.riemann(l, k, i, j)));
            }
    }
    EXPECT_LT(worst, 1e-9) << m.name();
  }
}

TEST(Riemann, SecondBianchi) {
  for (const auto& m : all_models()) {
    const int d = m.dim();
    double worst = 0.0;
    for (const auto& p : sample_points(m, 3, 22)) {
      const auto A = evaluate_ambient(m.chart, p, 2);
      for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k)
          for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
              for (int c = 0; c < d; ++c)
                worst = std::max(worst, std::abs(A.nabla_riemann(a, l, b, c, k) + A.nabla_riemann(b, l, c, a, k) +
                                                 A.nabla_riemann(c, l, a, b, k)));
    }
    EXPECT_LT(worst, 1e-6) << m.name();
  }
}

TEST(Riemann, CrossOracleConvergesQuadratically) {
  for (const auto& m : all_models()) {
    const Vec p = sample_points(m, 1, 33)[0];
    const auto A = evaluate_ambient(m.chart, p, 1);
    std::vector<double> eg, er;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
      eg.push_back(oracle::max_diff(A.gamma, oracle::fd_christoffel(m.chart, p, h)));
      er.push_back(oracle::max_diff(A.riemann, oracle::fd_riemann(m.chart, p, h)));
    }
    // Polynomial metrics (Heisenberg) are differenced exactly; only check the rate above roundoff.
    for (int s = 0; s < 2; ++s) {
      if (eg[s + 1] > 1e-9) EXPECT_NEAR(std::log2(eg[s] / eg[s + 1]), 2.0, 0.3) << m.name();
      if (er[s + 1] > 1e-7) EXPECT_NEAR(std::log2(er[s] / er[s + 1]), 2.0, 0.3) << m.name();
    }
    EXPECT_LT(eg.back(), 1e-4) << m.name();
    EXPECT_LT(er.back(), 1e-3) << m.name();
  }
}

TEST(NablaRiemann, FlatIsZero) {
  EXPECT_EQ(nabla_riemann(euclidean(3), Vec::Zero(3), Vec::Ones(3)).max_abs(), 0.0);
}

TEST(NablaRiemann, RoundSphereIsParallel) {
  const auto m = make_model(ModelKind::standard_sphere, 1);
  for (const auto& p : sample_points(m, 5, 4)) {
    const auto A = evaluate_ambient(m.chart, p, 2);
    EXPECT_LT(A.nabla_riemann.max_abs(), 1e-7);
  }
}

TEST(NablaRiemann, HeisenbergIsNotParallel) {
  const auto m = make_model(ModelKind::heisenberg, 1);
  const auto A = evaluate_ambient(m.chart, sample_points(m, 1, 4)[0], 2);
  EXPECT_GT(A.nabla_riemann.max_abs(), 0.1);
}

TEST(CovariantDerivative, FlatConstantAndPositionFields) {
  const auto E = euclidean(3);
  const Vec p = Vec::Constant(3, 0.3);
  Vec X(3);
  X << 1.0, -2.0, 0.5;
  auto constant = [](std::span<const Jet>) { return JetVector{Jet(1.0), Jet(2.0), Jet(3.0)}; };
  auto position = [](std::span<const Jet> x) { return JetVector(x.begin(), x.end()); };
  EXPECT_EQ(max_abs(covariant_derivative(E, p, X, constant)), 0.0);
  EXPECT_LT(max_abs(Vec(covariant_derivative(E, p, X, position) - X)), 1e-15);
}

TEST(CovariantDerivative, SphereCoordinateFieldsMatchFiniteDifferences) {
  // nabla_{e_i} e_j = Gamma(e_i, e_j); compare with an FD oracle of the metric.
  const auto m = make_model(ModelKind::standard_sphere, 1);
  const Vec p = sample_points(m, 1, 8)[0];
  const auto F = oracle::fd_christoffel(m.chart, p, 1e-4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto field = [j](std::span<const Jet>) {
        JetVector e(3, Jet(0.0));
        e[j] = Jet(1.0);
        return e;
      };
      const Vec v = covariant_derivative(m.chart, p, Vec::Unit(3, i), field);
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(v[k], F(k, i, j), 1e-7);
    }
}

TEST(SectionalCurvature, EuclideanIsZero) {
  EXPECT_EQ(sectional_curvature(euclidean(3), Vec::Zero(3), Vec::Unit(3, 0), Vec::Unit(3, 1)), 0.0);
}

TEST(SectionalCurvature, PlaneDependenceOnly) {
  const auto m = make_model(ModelKind::heisenberg, 1);
  const Vec p = sample_points(m, 1, 2)[0];
  std::mt19937_64 rng(1);
  const Vec X = random_vec(3, rng), Y = random_vec(3, rng);
  const double K = sectional_curvature(m.chart, p, X, Y);
  EXPECT_NEAR(sectional_curvature(m.chart, p, 2.0 * X - Y, 0.5 * X + 3.0 * Y), K, 1e-9);
}

TEST(SectionalCurvature, DegeneratePlaneThrows) {
  const auto m = make_model(ModelKind::heisenberg, 1);
  const Vec X = Vec::Unit(3, 0);
  EXPECT_THROW(sectional_curvature(m.chart, Vec::Zero(3), X, 2.0 * X), DegeneratePlaneError);
}

TEST(MetricChart, OutsideDomainIsDomainError) {
  const auto m = make_model(ModelKind::ball_times_line, 1, {.k = -4.0});
  Vec p(3);
  p << 0.8, 0.8, 0.0;
  EXPECT_THROW(christoffel(m.chart, p), DomainError);
}

TEST(MetricChart, SampledMetricsArePositiveDefinite) {
  for (const auto& m : all_models())
    for (const auto& p : sample_points(m, 20, 77)) {
      Eigen::LLT<Mat> llt(m.metric(p));
      EXPECT_EQ(llt.info(), Eigen::Success) << m.name();
    }
}
