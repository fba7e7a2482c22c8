#include <gtest/gtest.h>

#include "sasaki/suites.hpp"

using namespace sasaki;

namespace {

ModelSuiteConfig quick(int points = 12) {
  ModelSuiteConfig c;
  c.points = points;
  c.phi_symmetry_points = 4;
  return c;
}

}  // namespace

TEST(ModelSuite, AllKindsPass) {
  for (const auto& m : {make_sphere(1), make_sphere(2, 0.5), make_heisenberg(2), make_ball(1, -4.0)}) {
    const auto R = verify_model(m, quick());
    for (const auto& c : R.checks) EXPECT_TRUE(c.pass) << m.name() << " " << c.name << " " << c.max_residual;
    EXPECT_EQ(R.checks.size(), 11u);
  }
}

TEST(ModelSuite, PerturbedMetricFails) {
  const auto m = make_model(ModelKind::heisenberg, 1, {.perturbation = 1e-3});
  const auto R = verify_model(m, quick());
  EXPECT_FALSE(R.all_pass());
  EXPECT_FALSE(R.at("structure_sasakian").pass);
  EXPECT_EQ(R.config["perturbation"], 1e-3);
}

TEST(ModelSuite, SeedControlsTheSample) {
  const auto m = make_sphere(1, 2.0);
  auto a = quick(), b = quick();
  b.seed = 43;
  const auto ra = to_json(verify_model(m, a), false).dump();
  EXPECT_EQ(ra, to_json(verify_model(m, a), false).dump());
  EXPECT_NE(ra, to_json(verify_model(m, b), false).dump());
}

TEST(ModelSuite, InvalidSettings) {
  auto c = quick();
  c.points = 0;
  EXPECT_THROW(verify_model(make_heisenberg(1), c), ParameterError);
  c = quick();
  c.directions = 1;
  EXPECT_THROW(verify_model(make_heisenberg(1), c), ParameterError);
}

TEST(HopfSuite, CircleOverEveryModel) {
  for (const auto& m : {make_sphere(1), make_sphere(1, 0.5), make_heisenberg(1), make_ball(1, -4.0)}) {
    for (double k : {0.5, 1.0, 2.0}) {
      HopfSuiteConfig cfg;
      cfg.kappa = k;
      cfg.grid = 5;
      const auto R = verify_hopf_cylinder(m, cfg);
      EXPECT_TRUE(R.all_pass()) << m.name() << " k=" << k;
      EXPECT_NEAR(R.measurements["H_norm_max"].get<double>(), 0.5 * k, 1e-7);
      EXPECT_GT(R.measurements["min_abs_Q1"].get<double>(), 1e-3);
      EXPECT_GT(R.measurements["min_abs_Q2"].get<double>(), 1e-3);
    }
  }
}

TEST(HopfSuite, NonPmcCylindersAreFlagged) {
  HopfSuiteConfig cfg;
  cfg.amplitude = 0.5;
  cfg.grid = 5;
  const auto R = verify_hopf_cylinder(make_heisenberg(1), cfg);
  EXPECT_TRUE(R.all_pass());
  EXPECT_EQ(R.find("pmc"), nullptr);
  EXPECT_GT(R.measurements["pmc_residual"].get<double>(), 1e-2);
  // kappa_1 = 2|H| still holds pointwise
  EXPECT_LT(R.at("kappa_equals_twice_H").max_residual, 1e-5);

  HopfSuiteConfig zero;
  zero.tau = 0;
  zero.grid = 4;
  const auto Z = verify_hopf_cylinder(make_sphere(2), zero);
  EXPECT_TRUE(Z.at("pmc_fails").pass);
  EXPECT_FALSE(Z.config["pmc_expected"].get<bool>());
}

TEST(HelixSuite, RoundTrip) {
  HelixConfig cfg;
  cfg.length = 2.5;
  CurveSample c;
  const auto R = verify_helix(make_heisenberg(2), cfg, &c);
  EXPECT_TRUE(R.all_pass());
  EXPECT_EQ(c.osculating_order, 4);
  cfg.curvatures = {1.0, 1.0, 1.0, 1.0};
  EXPECT_THROW(verify_helix(make_heisenberg(1), cfg), ParameterError);
  cfg.curvatures = {1.0, -1.0};
  EXPECT_THROW(verify_helix(make_heisenberg(2), cfg), ParameterError);
}

TEST(SurfaceSuite, LegendrianGraphIsIntegral) {
  // (u, v, F_u, F_v, F) with F = 0.3 u^2 v + 0.2 v^3 + 0.1 u^2
  SurfaceSuiteConfig cfg;
  cfg.immersion = "u; v; 0.6*u*v + 0.2*u; 0.3*u^2 + 0.6*v^2; 0.3*u^2*v + 0.2*v^3 + 0.1*u^2";
  cfg.u0 = -0.3;
  cfg.u1 = 0.3;
  cfg.v0 = -0.3;
  cfg.v1 = 0.3;
  cfg.grid = 5;
  cfg.expect = {"integral", "anti_invariant"};
  const auto R = verify_surface(make_heisenberg(2), cfg);
  EXPECT_TRUE(R.all_pass());
  EXPECT_GT(R.measurements["pmc"].get<double>(), 1e-3);
  cfg.expect = {"pmc"};
  EXPECT_FALSE(verify_surface(make_heisenberg(2), cfg).all_pass());
}

TEST(SurfaceSuite, InputErrors) {
  SurfaceSuiteConfig cfg;
  cfg.immersion = "u; v";
  EXPECT_THROW(verify_surface(make_heisenberg(1), cfg), ParameterError);
  cfg.immersion = "u; v; (u";
  EXPECT_THROW(verify_surface(make_heisenberg(1), cfg), ParseError);
  cfg.immersion = "u; v; u*v";
  cfg.expect = {"flat"};
  EXPECT_THROW(verify_surface(make_heisenberg(1), cfg), ParameterError);
  cfg.expect = {};
  cfg.u1 = cfg.u0;
  EXPECT_THROW(verify_surface(make_heisenberg(1), cfg), ParameterError);
}

TEST(Theorem5Suite, ReportShape) {
  const auto R = verify_theorem5_scan(-50.0, 0.999, 100, 100);
  EXPECT_TRUE(R.all_pass());
  EXPECT_EQ(R.measurements["points"], 10000);
  EXPECT_TRUE(R.measurements["all_negative"].get<bool>());
  EXPECT_FALSE(verify_theorem5_scan(-50.0, 0.999, 100, 100, -17.0).all_pass());
}
