#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "sasaki/surface.hpp"

using namespace sasaki;

namespace {

ModelSpace flat3() { return make_model(ModelKind::euclidean, 3); }

/// Round sphere of radius r in R^3 (latitude/longitude away from the poles).
SurfacePatch round_sphere(double r, int n = 6) {
  ImmersionFn f = [r](std::span<const Jet> uv) {
    return JetVector{r * cos(uv[0]) * cos(uv[1]), r * cos(uv[0]) * sin(uv[1]), r * sin(uv[0])};
  };
  return explicit_patch(flat3(), f, parameter_box(-0.6, 0.6, 0.0, 1.5), n, n, "sphere");
}

/// Graph surface (u, v, f(u, v)) in the first three coordinates of a model.
SurfacePatch graph(const ModelSpace& m, int n = 5) {
  const int d = m.dim();
  ImmersionFn f = [d](std::span<const Jet> uv) {
    JetVector x(static_cast<std::size_t>(d), Jet(0.0));
    x[0] = uv[0];
    x[1] = uv[1];
    x[2] = 0.3 * uv[0] * uv[1] + 0.2 * sin(uv[0]) - 0.1 * uv[1] * uv[1];
    if (d > 3) x[3] = 0.15 * uv[0] * uv[0];
    return x;
  };
  return explicit_patch(m, f, parameter_box(-0.3, 0.3, -0.2, 0.4), n, n, "graph");
}

}  // namespace

TEST(Surface, PlaneHasZeroSecondFundamentalForm) {
  ImmersionFn f = [](std::span<const Jet> uv) { return JetVector{uv[0] + uv[1], uv[0] - 2.0 * uv[1], Jet(0.5)}; };
  const auto P = explicit_patch(flat3(), f, parameter_box(0, 1, 0, 1), 3, 3);
  const auto G = surface_geometry(P);
  for (const auto& pt : G.points) {
    for (const auto& s : pt.sigma) EXPECT_LT(s.norm(), 1e-14);
    EXPECT_NEAR(pt.K_intrinsic, 0.0, 1e-12);
  }
}

TEST(Surface, RoundSphereInvariants) {
  const double r = 2.0;
  const auto G = surface_geometry(round_sphere(r));
  for (const auto& pt : G.points) {
    EXPECT_NEAR(pt.mean_curvature_norm(), 1.0 / r, 1e-12);
    EXPECT_NEAR(pt.K_intrinsic, 1.0 / (r * r), 1e-10);
    EXPECT_NEAR(pt.K_gauss, 1.0 / (r * r), 1e-12);
    EXPECT_LT(pmc_residual(pt), 1e-12);
    EXPECT_LT(umbilicity_residual(pt), 1e-12);
    EXPECT_LT(pt.gauss, 1e-10);
    EXPECT_LT(pt.codazzi, 1e-11);
    EXPECT_LT(sigma_normality_residual(pt), 1e-12);
    EXPECT_LT(mean_curvature_trace_residual(pt), 1e-12);
    // H points to the center
    EXPECT_LT((pt.H + pt.p / (r * r)).norm(), 1e-12);
  }
}

TEST(Surface, FundamentalEquationsHoldForArbitrarySurfaces) {
  for (const auto& m : {make_heisenberg(1), make_heisenberg(2), make_sphere(1), make_sphere(2, 2.0), make_ball(2, -1.5)}) {
    const auto G = surface_geometry(graph(m));
    const auto r = fundamental_equation_residuals(G);
    EXPECT_LT(r.gauss, 1e-8) << m.name() << " n=" << m.n;
    EXPECT_LT(r.codazzi, 1e-8) << m.name() << " n=" << m.n;
    EXPECT_LT(r.ricci, 1e-8) << m.name() << " n=" << m.n;
    for (const auto& pt : G.points) {
      EXPECT_NEAR(pt.K_gauss, pt.K_intrinsic, 1e-8);
      EXPECT_LT(sigma_normality_residual(pt), 1e-10);
    }
    // a generic graph is not pmc
    EXPECT_GT(pmc_residual(G), 1e-3);
  }
}

TEST(Surface, ZeroSffDetectorBreaksGauss) {
  SurfaceOptions opt;
  opt.zero_sff = true;
  const auto G = surface_geometry(round_sphere(2.0), opt);
  EXPECT_GT(fundamental_equation_residuals(G).gauss, 0.1);
}

TEST(Surface, FlowPatchMatchesExplicitPatch) {
  // helicoid-like flows in R^3: translation along x and rotation about x
  FlowSystem sys;
  sys.point_dim = 3;
  sys.A = [](std::span<const Jet>) { return JetVector{Jet(1.0), Jet(0.0), Jet(0.0)}; };
  sys.B = [](std::span<const Jet> s) { return JetVector{Jet(0.0), -s[2], s[1]}; };
  sys.start = Vec(3);
  sys.start << 0.0, 1.5, 0.0;
  const auto box = parameter_box(-0.5, 0.5, -0.4, 0.6);
  const auto F = flow_patch(flat3(), sys, box, 9, 11, 8);
  ImmersionFn f = [](std::span<const Jet> uv) { return JetVector{uv[0], 1.5 * cos(uv[1]), 1.5 * sin(uv[1])}; };
  const auto E = explicit_patch(flat3(), f, box, 9, 11);
  EXPECT_LT(flow_compatibility(sys, sys.start), 1e-15);
  const auto GF = surface_geometry(F), GE = surface_geometry(E);
  for (std::size_t k = 0; k < GF.points.size(); ++k) {
    EXPECT_LT((GF.points[k].p - GE.points[k].p).norm(), 1e-9);
    EXPECT_LT((GF.points[k].H - GE.points[k].H).norm(), 1e-9);
    EXPECT_NEAR(GF.points[k].K_intrinsic, GE.points[k].K_intrinsic, 1e-9);
  }
  // off-node evaluation
  const auto a = surface_point(F, 0.123, 0.0456), b = surface_point(E, 0.123, 0.0456);
  EXPECT_LT((a.p - b.p).norm(), 1e-9);
  EXPECT_LT((a.sigma[0] - b.sigma[0]).norm(), 1e-9);
}

TEST(Surface, ShapeOperator) {
  const auto pt = surface_point(round_sphere(2.0), 0.1, 0.2);
  const Vec N = -pt.p / 2.0;
  const Mat A = shape_operator(pt, N);
  EXPECT_LT((A - 0.5 * Mat::Identity(2, 2)).norm(), 1e-12);
  EXPECT_THROW(shape_operator(pt, pt.T.col(0)), PreconditionError);
}

TEST(Surface, DegenerateImmersionThrows) {
  ImmersionFn f = [](std::span<const Jet> uv) { return JetVector{uv[0] + uv[1], 2.0 * (uv[0] + uv[1]), Jet(0.0)}; };
  const auto P = explicit_patch(flat3(), f, parameter_box(0, 1, 0, 1), 3, 3);
  EXPECT_THROW(surface_geometry(P), ImmersionError);
}

TEST(Surface, ClassificationOfHorizontalAndVerticalPlanes) {
  const auto m = make_heisenberg(1);
  // the (x, y)-plane is not integral away from the origin
  ImmersionFn f = [](std::span<const Jet> uv) { return JetVector{uv[0], uv[1], Jet(0.0)}; };
  const auto P = explicit_patch(m, f, parameter_box(-0.5, 0.5, -0.5, 0.5), 5, 5);
  const auto c = classify_surface(surface_geometry(P));
  EXPECT_GT(c.integral_residual, 0.1);
}

TEST(Surface, CommutingShapeCheckApplicability) {
  const auto m = make_heisenberg(1);
  const auto pt = surface_point(graph(m), 0.1, 0.1);
  EXPECT_FALSE(commuting_shape_check(pt).has_value());
  const auto m2 = make_heisenberg(3);
  const auto pt2 = surface_point(graph(m2), 0.1, 0.1);
  EXPECT_TRUE(commuting_shape_check(pt2).has_value());
}

TEST(Surface, CsvExport) {
  const auto G = surface_geometry(round_sphere(1.0, 3));
  const auto path = std::filesystem::temp_directory_path() / "sasaki_surface_test.csv";
  write_surface_csv(G, path.string());
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "u,v,K,H_norm,a,pmc,gauss,codazzi,ricci");
  int rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  EXPECT_EQ(rows, 9);
  std::filesystem::remove(path);
}
