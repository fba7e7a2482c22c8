#include <gtest/gtest.h>

#include <numbers>

#include "sasaki/fibration.hpp"

using namespace sasaki;

namespace {

std::vector<ModelSpace> fibered_models() {
  return {make_sphere(1), make_sphere(2), make_sphere(1, 2.0), make_sphere(1, 0.5),
          make_heisenberg(1), make_heisenberg(2), make_ball(1, -4.0), make_ball(2, -1.5)};
}

/// Sample points whose projection stays in the affine base chart.
std::vector<Vec> fiber_samples(const ModelSpace& m, int count, std::uint64_t seed) {
  if (m.kind == ModelKind::heisenberg || m.kind == ModelKind::ball_times_line) return sample_points(m, count, seed);
  return sample_points(Box::cube(m.dim(), 0.5), count, seed);
}

double base_sectional(const FibrationData& F, const Vec& b, const Vec& X, const Vec& Y) {
  return sectional_curvature(F.base.chart, b, X, Y);
}

}  // namespace

TEST(Fibration, SubmersionAxioms) {
  for (const auto& m : fibered_models()) {
    const auto F = make_fibration(m);
    for (const auto& p : fiber_samples(m, 20, 11)) {
      const auto r = submersion_residuals(F, p);
      EXPECT_LT(r.isometry, 1e-8) << m.name() << " n=" << m.n;
      EXPECT_LT(r.verticality, 1e-10) << m.name();
      EXPECT_LT(r.complex, 1e-8) << m.name() << " n=" << m.n;
      EXPECT_LT(r.J_squared, 1e-10);
      EXPECT_LT(r.J_orthogonal, 1e-10);
    }
  }
}

TEST(Fibration, BaseHolomorphicCurvatureIsCPlusThree) {
  for (const auto& m : fibered_models()) {
    const auto F = make_fibration(m);
    for (const auto& p : fiber_samples(m, 5, 3)) {
      const Vec b = F.project(p);
      const Vec X = Vec::Unit(F.base_dim(), 0) + 0.3 * Vec::Unit(F.base_dim(), F.base_dim() - 1);
      EXPECT_NEAR(base_sectional(F, b, X, F.J() * X), m.c + 3.0, 1e-6) << m.name() << " n=" << m.n;
    }
  }
}

TEST(Fibration, NamedBases) {
  const auto S = make_fibration(make_sphere(1));
  const Vec o = Vec::Zero(2);
  EXPECT_NEAR(base_sectional(S, o, Vec::Unit(2, 0), Vec::Unit(2, 1)), 4.0, 1e-9);
  const auto D = make_fibration(make_sphere(1, 2.0));
  EXPECT_NEAR(base_sectional(D, o, Vec::Unit(2, 0), Vec::Unit(2, 1)), 2.0, 1e-6);
  const auto H = make_fibration(make_heisenberg(1));
  EXPECT_NEAR(base_sectional(H, o, Vec::Unit(2, 0), Vec::Unit(2, 1)), 0.0, 1e-12);
  EXPECT_THROW(make_fibration(make_model(ModelKind::euclidean, 3)), UnsupportedError);
}

TEST(Fibration, HorizontalLift) {
  for (const auto& m : fibered_models()) {
    const auto F = make_fibration(m);
    for (const auto& p : fiber_samples(m, 10, 5)) {
      const Vec b = F.project(p);
      const Mat gb = F.base.chart.metric_at(b);
      Vec X = Vec::LinSpaced(F.base_dim(), 0.3, 1.1);
      X /= std::sqrt(X.dot(gb * X));
      const Vec XH = horizontal_lift(F, b, X, p);
      EXPECT_NEAR(std::sqrt(XH.dot(m.metric(p) * XH)), 1.0, 1e-8);
      EXPECT_LT(std::abs(m.eta(p).dot(XH)), 1e-10);
      EXPECT_LT((F.differential(p) * XH - X).norm(), 1e-10);
      EXPECT_LT(horizontal_lift(F, b, Vec::Zero(F.base_dim()), p).norm(), 1e-15);
      EXPECT_THROW(horizontal_lift(F, b + Vec::Constant(F.base_dim(), 0.1), X, p), PreconditionError);
    }
  }
}

TEST(Fibration, ONeillHeisenberg) {
  const auto F = make_fibration(make_heisenberg(1));
  Vec p(3);
  p << 0.2, -0.4, 0.7;
  const auto r = oneill_residual(F, constant_field(Vec::Unit(2, 0)), constant_field(Vec::Unit(2, 1)), p);
  EXPECT_LT(r.residual, 1e-7);
  EXPECT_NEAR(r.vertical, r.expected_vertical, 1e-10);
  EXPECT_GT(std::abs(r.vertical), 0.1);
  const auto s = oneill_residual(F, constant_field(Vec::Unit(2, 0)), constant_field(Vec::Unit(2, 0)), p);
  EXPECT_LT(std::abs(s.vertical), 1e-8);
}

TEST(Fibration, ONeillAllModels) {
  for (const auto& m : fibered_models()) {
    const auto F = make_fibration(m);
    const int b = F.base_dim();
    // a non-constant base field
    const VectorFieldFn Y = [b](std::span<const Jet> w) {
      JetVector y(static_cast<std::size_t>(b), Jet(0.0));
      y[0] = 1.0 + 0.3 * w[static_cast<std::size_t>(b - 1)];
      y[static_cast<std::size_t>(b - 1)] = sin(w[0]);
      return y;
    };
    for (const auto& p : fiber_samples(m, 5, 9)) {
      for (int i = 0; i < b; ++i) {
        const auto r = oneill_residual(F, constant_field(Vec::Unit(b, i)), Y, p);
        EXPECT_LT(r.residual, 1e-6) << m.name() << " n=" << m.n;
      }
    }
  }
}

TEST(HopfCylinder, MeanCurvatureIsHalfTheBaseCurvature) {
  for (const auto& m : {make_sphere(1), make_heisenberg(1), make_ball(1, -4.0), make_sphere(1, 2.0)}) {
    const auto F = make_fibration(m);
    for (double k : {0.5, 1.0, 2.0}) {
      for (int tau : {1, -1}) {
        const auto P = hopf_cylinder(F, BaseCurve::circle(k, tau), 0.0, 0.6, 0.0, 0.6, 5, 5, 16);
        const auto G = surface_geometry(P);
        for (const auto& pt : G.points) EXPECT_NEAR(2.0 * pt.mean_curvature_norm(), k, 1e-7) << m.name();
        EXPECT_LT(pmc_residual(G), 1e-7) << m.name() << " k=" << k << " tau=" << tau;
        const auto fr = fundamental_equation_residuals(G);
        EXPECT_LT(std::max({fr.gauss, fr.codazzi, fr.ricci}), 1e-7);
        EXPECT_LT(P.compatibility(0.3, 0.3), 1e-10);
        // isothermal: tangent frame {E1^H, xi}
        for (const auto& pt : G.points) EXPECT_LT((pt.h - Mat::Identity(2, 2)).norm(), 1e-7);
      }
    }
  }
}

TEST(HopfCylinder, GeodesicBaseIsMinimal) {
  const auto F = make_fibration(make_sphere(1));
  const auto P = hopf_cylinder(F, BaseCurve::circle(0.0, 1), 0.0, 1.0, 0.0, 1.0, 4, 4, 16);
  EXPECT_LT(surface_geometry(P).max_over([](const SurfacePoint& p) { return p.mean_curvature_norm(); }), 1e-6);
}

TEST(HopfCylinder, PmcFailsForVaryingCurvatureOrZeroTorsion) {
  const auto F = make_fibration(make_heisenberg(1));
  const auto P = hopf_cylinder(F, BaseCurve::varying(1.0, 0.5, 1), 0.0, 1.0, 0.0, 0.5, 5, 5, 16);
  const auto G = surface_geometry(P);
  EXPECT_GT(pmc_residual(G), 1e-2);
  for (const auto& pt : G.points) EXPECT_NEAR(2.0 * pt.mean_curvature_norm(), 1.0 + 0.5 * std::sin(pt.u), 1e-7);

  const auto F2 = make_fibration(make_sphere(2));
  const auto Q = hopf_cylinder(F2, BaseCurve::circle(1.0, 0), 0.0, 0.5, 0.0, 0.5, 4, 4, 16);
  const auto GQ = surface_geometry(Q);
  EXPECT_GT(pmc_residual(GQ), 1e-2);
  for (const auto& pt : GQ.points) EXPECT_NEAR(2.0 * pt.mean_curvature_norm(), 1.0, 1e-7);
  EXPECT_THROW(hopf_cylinder(F, BaseCurve::circle(1.0, 0), 0, 1, 0, 1, 3, 3), PreconditionError);
}

TEST(ComplexTorsion, RecoversConstructionTorsion) {
  const auto F = make_fibration(make_sphere(2));
  for (int tau : {1, -1, 0}) {
    // sample the base-direction coordinate line of a cylinder at t = 0
    const auto P = hopf_cylinder(F, BaseCurve::circle(2.0, tau), 0.0, 3.0, 0.0, 0.1, 301, 2);
    std::vector<Vec> pts;
    for (int i = 0; i <= 3000; ++i) pts.push_back(P.point(i * 1e-3, 0.0));
    FrenetOptions opt;
    opt.max_derivatives = 3;
    const auto T = complex_torsions(pts, 1e-3, F, opt);
    ASSERT_EQ(T.base.osculating_order, 2);
    EXPECT_NEAR(T.tau(0, 1), tau, 1e-5) << "tau " << tau;
    EXPECT_LE(std::abs(T.tau(0, 1)), 1.0 + 1e-9);
  }
}
