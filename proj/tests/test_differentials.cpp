#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "sasaki/differentials.hpp"
#include "sasaki/fibration.hpp"
#include "sasaki/theorems.hpp"

using namespace sasaki;

namespace {

/// Closed forms on the Hopf cylinder over a circle of curvature kappa and
/// complex torsion tau, coordinates (base arclength, fiber time):
/// sigma(E,E) = kappa N, sigma(E,xi) = tau N, sigma(xi,xi) = 0, H = kappa/2 N,
/// eta(Z) = -i/sqrt2, <phi Z, H> = -tau kappa/(2 sqrt2).
Complex hopf_q1(double c, double kappa, int tau) {
  return 2.0 * kappa * Complex(kappa, -2.0 * tau) + 0.5 * (c - 1.0);
}
Complex hopf_q2(double kappa, int tau) {
  const Complex w(0.5 * tau * kappa, -1.0);
  return 0.5 * w * w;
}

SurfacePatch conformal_cylinder() {
  static const auto F = make_fibration(make_heisenberg(1));
  static const auto cyl = hopf_cylinder(F, BaseCurve::circle(1.0, 1), -0.2, 0.8, -0.2, 0.8, 201, 201, 4);
  return cyl;
}

/// Legendrian graph (u, v, F_u, F_v, F) in Heisenberg n = 2.
SurfacePatch legendre_graph() {
  ImmersionFn f = [](std::span<const Jet> uv) {
    const Jet& u = uv[0];
    const Jet& v = uv[1];
    const Jet F = 0.3 * u * u * v + 0.2 * v * v * v + 0.1 * u * u;
    return JetVector{u, v, 0.6 * u * v + 0.2 * u, 0.3 * u * u + 0.6 * v * v, F};
  };
  return explicit_patch(make_heisenberg(2), f, parameter_box(-0.3, 0.3, -0.3, 0.3), 5, 5, "legendre_graph");
}

QGrid synthetic_grid(int n, const std::function<Complex(Complex)>& f) {
  QGrid Q;
  Q.nu = Q.nv = n;
  Q.du = Q.dv = 1.0 / (n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Complex w(i * Q.du, j * Q.dv);
      Q.q1.push_back(f(w));
      Q.q2.push_back(std::conj(f(w)));
    }
  return Q;
}

}  // namespace

TEST(QuadraticForms, HopfCylinderClosedForms) {
  for (const auto& m : {make_heisenberg(1), make_sphere(1), make_ball(1, -4.0), make_sphere(1, 2.0)}) {
    const auto F = make_fibration(m);
    for (double k : {0.5, 1.0, 2.0})
      for (int tau : {1, -1}) {
        const auto P = hopf_cylinder(F, BaseCurve::circle(k, tau), 0.0, 0.5, 0.0, 0.5, 4, 4, 16);
        SurfaceOptions light;
        light.full = false;
        const auto G = surface_geometry(P, light);
        const auto Q = q_forms(G);
        for (std::size_t i = 0; i < Q.q1.size(); ++i) {
          EXPECT_LT(std::abs(Q.q1[i] - hopf_q1(m.c, k, tau)), 1e-7) << m.name() << " k=" << k << " tau=" << tau;
          EXPECT_LT(std::abs(Q.q2[i] - hopf_q2(k, tau)), 1e-7) << m.name();
          // nonvanishing on pmc Hopf cylinders
          EXPECT_GT(std::abs(Q.q1[i]), 1e-3);
          EXPECT_GT(std::abs(Q.q2[i]), 1e-3);
        }
        EXPECT_LT(Q.q2_identity_residual, 1e-14);
        EXPECT_NEAR(Q.eta_terms, 1.0 / std::sqrt(2.0), 1e-9);
      }
  }
}

TEST(QuadraticForms, IsothermalGate) {
  const auto G = surface_geometry(legendre_graph());
  EXPECT_THROW(q_forms(G), PreconditionError);
}

TEST(QuadraticForms, DbarOfHolomorphicAndAntiHolomorphicFunctions) {
  const auto f = [](Complex w) { return std::exp(w) + w * w * w; };
  std::vector<double> err;
  for (int n : {17, 33, 65}) {
    const auto d = dbar_max(synthetic_grid(n, f));
    err.push_back(d.q1);
    // conj(f) has d-bar = conj(f'), |f'| >= e^0 - 0 near the origin corner
    EXPECT_GT(d.q2, 1.0);
  }
  EXPECT_NEAR(std::log2(err[0] / err[1]), 2.0, 0.1);
  EXPECT_NEAR(std::log2(err[1] / err[2]), 2.0, 0.1);
  // quadratics are differentiated exactly
  EXPECT_LT(dbar_max(synthetic_grid(9, [](Complex w) { return w * w + 3.0 * w; })).q1, 1e-12);
  QGrid tiny;
  tiny.nu = tiny.nv = 2;
  EXPECT_THROW(dbar_max(tiny), PreconditionError);
}

TEST(QuadraticForms, HolomorphicOnConformalPmcCylinder) {
  const auto cyl = conformal_cylinder();
  const auto H = holomorphicity_residual(
      [&](int N) { return conformal_reparametrization(cyl, 0.5, parameter_box(0.0, 0.5, 0.0, 0.5), N, N); });
  ASSERT_EQ(H.grids.size(), 3u);
  EXPECT_FALSE(H.q1_at_noise);
  EXPECT_FALSE(H.q2_at_noise);
  EXPECT_GE(H.order_q1, 1.8);
  EXPECT_GE(H.order_q2, 1.8);
  EXPECT_GE(H.convergence_order(), 1.8);
  EXPECT_LT(H.pmc_residual, 1e-7);
  EXPECT_LT(H.anti_invariant_residual, 1e-9);
  // Q really varies: it is Q0 (1 + w^2/2)^2 with Q0 = -4i
  EXPECT_GT(H.max_q1.back(), 4.5);
}

TEST(QuadraticForms, ConformalFactor) {
  const auto cyl = conformal_cylinder();
  const auto P = conformal_reparametrization(cyl, 0.5, parameter_box(0.0, 0.5, 0.0, 0.5), 3, 3);
  SurfaceOptions light;
  light.full = false;
  for (double u : {0.1, 0.4})
    for (double v : {0.05, 0.3}) {
      const auto q = q_values(surface_point(P, u, v, light));
      const Complex w(u, v), gp = 1.0 + 0.5 * w * w;
      EXPECT_LT(std::abs(q.q1 - gp * gp * hopf_q1(-3.0, 1.0, 1)), 1e-8);
      EXPECT_LT(std::abs(q.q2 - gp * gp * hopf_q2(1.0, 1)), 1e-8);
    }
}

TEST(QuadraticForms, HolomorphicityPreconditions) {
  const auto F = make_fibration(make_heisenberg(1));
  const auto bumpy = hopf_cylinder(F, BaseCurve::varying(1.0, 0.5, 1), 0.0, 1.0, 0.0, 1.0, 33, 33, 4);
  EXPECT_THROW(holomorphicity_residual([&](int) { return bumpy; }, {32}), PreconditionError);
  const auto cyl = conformal_cylinder();
  auto make = [&](int N) { return conformal_reparametrization(cyl, 0.5, parameter_box(0.0, 0.5, 0.0, 0.5), N, N); };
  EXPECT_THROW(holomorphicity_residual(make, {16, 32}), PreconditionError);
  EXPECT_THROW(holomorphicity_residual(make, {}), PreconditionError);
}

TEST(QuadraticForms, VanishingIffPseudoUmbilical) {
  Theorem2Config cfg;
  cfg.grid = 6;
  const auto T = build_product_surface(theorem2_model(-3.0), cfg);
  const auto G = surface_geometry(T.patch);
  const auto a = q_vanishing_equivalence(G);
  EXPECT_TRUE(a.q1_zero);
  EXPECT_TRUE(a.pseudo_umbilical);
  EXPECT_TRUE(a.agree);

  const auto L = surface_geometry(legendre_graph());
  EXPECT_LT(classify_surface(L).integral_residual, 1e-12);
  const auto b = q_vanishing_equivalence(L);
  EXPECT_FALSE(b.q1_zero);
  EXPECT_FALSE(b.pseudo_umbilical);
  EXPECT_TRUE(b.agree);

  // Hopf cylinders contain xi, so they are not integral
  const auto F = make_fibration(make_heisenberg(1));
  const auto C = surface_geometry(hopf_cylinder(F, BaseCurve::circle(1.0, 1), 0.0, 0.5, 0.0, 0.5, 3, 3));
  EXPECT_THROW(q_vanishing_equivalence(C), PreconditionError);
}

TEST(QuadraticForms, CsvExport) {
  const auto F = make_fibration(make_heisenberg(1));
  const auto P = hopf_cylinder(F, BaseCurve::circle(1.0, 1), 0.0, 0.5, 0.0, 0.5, 3, 4);
  SurfaceOptions light;
  light.full = false;
  const auto Q = q_forms(surface_geometry(P, light));
  const auto path = std::filesystem::temp_directory_path() / "sasaki_q_test.csv";
  write_q_csv(Q, P, path.string());
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header, "u,v,re_q1,im_q1,re_q2,im_q2,abs_dbar_q1,abs_dbar_q2");
  int rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  EXPECT_EQ(rows, 12);
  std::filesystem::remove(path);
}
