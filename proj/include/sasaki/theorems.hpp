#pragma once
/// @file theorems.hpp
/// Flat pmc product surface in a 7-dimensional Sasakian space form,
/// rebuilt from its adapted-frame structure equations, its verification
/// report, and the quartic sign scan for integral surfaces with eta(E_2) != 0.

#include <chrono>
#include <optional>

#include "sasaki/differentials.hpp"
#include "sasaki/fibration.hpp"
#include "sasaki/report.hpp"

namespace sasaki {

struct Theorem2Curvatures {
  double a_sq = 0.0;
  double kappa1 = 0.0, kappa2 = 0.0, kappa3 = 0.0;
  double kappa_circle = 0.0;
  bool umbilical_branch = false;  ///< a^2 below 1e-12
};

/// a^2 = (c+3)/8 + h^2/2; kappa_1 = sqrt(a^2 + h^2),
/// kappa_2 = a sqrt(1+h^2)/kappa_1, kappa_3 = h sqrt(1+h^2)/kappa_1.
inline Theorem2Curvatures theorem2_curvatures(double c, double h) {
  if (!(h > 0.0)) throw ParameterError("theorem2: |H| must be positive");
  Theorem2Curvatures k;
  k.a_sq = (c + 3.0) / 8.0 + 0.5 * h * h;
  if (k.a_sq < -1e-14)
    throw InfeasibleBranchError("theorem2: |H|^2 >= -(c+3)/4 violated (" + detail::format_value(h * h) + " < " +
                                detail::format_value(-(c + 3.0) / 4.0) + ")");
  k.a_sq = std::max(k.a_sq, 0.0);
  k.umbilical_branch = k.a_sq < 1e-12;
  const double a = std::sqrt(k.a_sq);
  k.kappa1 = std::sqrt(k.a_sq + h * h);
  k.kappa2 = a * std::sqrt(1.0 + h * h) / k.kappa1;
  k.kappa3 = h * std::sqrt(1.0 + h * h) / k.kappa1;
  k.kappa_circle = k.kappa1;
  return k;
}

struct Theorem2Config {
  double c = -3.0;
  double h = 1.0;
  int grid = 64;
  double extent = 1.0;   ///< (u, v) in [0, extent]^2
  int substeps = 0;      ///< RK4 steps per grid cell; 0 keeps the step below max_step
  double max_step = 0.0025;
  double a_scale = 1.0;  ///< multiplies a in the u-line equations only (perturbation knob)
  double compatibility_tol = 1e-5;
  double grid_tol = 1e-5;   ///< grid-limited checks
  double point_tol = 1e-7;  ///< pointwise-exact checks
  double curvature_tol = 1e-4;
  double dbar_tol = 1e-9;
  std::vector<int> holomorphicity_grids;  ///< extra grids for the d-bar order study; empty skips it
  std::uint64_t seed = 0;
};

/// The n = 3 model of constant phi-sectional curvature c: standard or
/// deformed sphere (c > -3), Heisenberg (c = -3), ball x line (c < -3).
inline ModelSpace theorem2_model(double c) {
  if (c == 1.0) return make_sphere(3);
  if (c > -3.0) return make_sphere(3, 4.0 / (c + 3.0));
  if (c == -3.0) return make_heisenberg(3);
  return make_ball(3, c + 3.0);
}

namespace detail {

/// Structure constants: d/du E_i = sum_j Cu(i, j) E_j - Gamma(E_1, E_i),
/// d/dv E_i = sum_j Cv(i, j) E_j - Gamma(E_2, E_i), frame (E_1, ..., E_7).
inline std::pair<Mat, Mat> theorem2_structure(double a, double h, double a_scale) {
  Mat Cu = Mat::Zero(7, 7), Cv = Mat::Zero(7, 7);
  const double au = a * a_scale;
  // u-direction (nabla_{E_1})
  Cu(0, 2) = au;  Cu(0, 4) = h;
  Cu(1, 3) = -au;
  Cu(2, 0) = -au; Cu(2, 5) = h; Cu(2, 6) = 1.0;
  Cu(3, 1) = au;
  Cu(4, 0) = -h;
  Cu(5, 2) = -h;
  Cu(6, 2) = -1.0;
  // v-direction (nabla_{E_2})
  Cv(0, 3) = -a;
  Cv(1, 2) = -a; Cv(1, 4) = h;
  Cv(2, 1) = a;
  Cv(3, 0) = a;  Cv(3, 5) = h; Cv(3, 6) = 1.0;
  Cv(4, 1) = -h;
  Cv(5, 3) = -h;
  Cv(6, 3) = -1.0;
  return {Cu, Cv};
}

/// Orthonormal adapted frame at p: E_1, E_2, E_5 horizontal and mutually
/// phi-orthogonal, E_3 = phi E_1, E_4 = phi E_2, E_6 = phi E_5, E_7 = xi.
inline Mat theorem2_initial_frame(const ModelSpace& m, const Vec& p) {
  const int d = m.dim();
  const Mat g = m.metric(p), phi = m.phi(p);
  const Vec xi = m.xi(p), eta = m.eta(p);
  std::vector<Vec> picked;  // E1, phiE1, E2, phiE2, E5, phiE5
  auto reduce = [&](Vec v) {
    v -= eta.dot(v) * xi;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& w : picked) v -= w.dot(g * v) * w;
    return v;
  };
  for (int k = 0; k < d && picked.size() < 6; ++k) {
    Vec v = reduce(Vec::Unit(d, k));
    const double nv = std::sqrt(v.dot(g * v));
    if (nv < 1e-6) continue;
    v /= nv;
    picked.push_back(v);
    picked.push_back(phi * v);
  }
  if (picked.size() < 6) throw ImmersionError("theorem2: could not build the initial frame");
  Mat E(d, 7);
  E.col(0) = picked[0];
  E.col(1) = picked[2];
  E.col(2) = picked[1];
  E.col(3) = picked[3];
  E.col(4) = picked[4];
  E.col(5) = picked[5];
  E.col(6) = xi;
  return E;
}

inline JetStateFn theorem2_field(const ModelSpace& m, const Mat& C, int dir) {
  const int d = m.dim();
  const auto chart = std::make_shared<MetricChart>(m.chart);
  return [chart, C, d, dir](std::span<const Jet> S) {
    const auto f = S.subspan(0, static_cast<std::size_t>(d));
    auto E = [&](int i) { return S.subspan(static_cast<std::size_t>(d * (i + 1)), static_cast<std::size_t>(d)); };
    const JetVector gam = christoffel_along(*chart, f);
    if (std::all_of(S.begin(), S.end(), [](const Jet& x) { return x.is_constant(); })) {
      // plain values (RK4 stages)
      JetVector out(static_cast<std::size_t>(8 * d));
      const auto val = [&](int blk, int k) { return S[static_cast<std::size_t>(d * blk + k)].value(); };
      for (int k = 0; k < d; ++k) out[static_cast<std::size_t>(k)] = Jet(val(dir + 1, k));
      for (int i = 0; i < 7; ++i)
        for (int k = 0; k < d; ++k) {
          double r = 0.0;
          for (int a = 0; a < d; ++a) {
            const double xa = val(dir + 1, a);
            if (xa == 0.0) continue;
            for (int b = 0; b < d; ++b) r -= gam[gamma_index(d, k, a, b)].value() * xa * val(i + 1, b);
          }
          for (int j = 0; j < 7; ++j) r += C(i, j) * val(j + 1, k);
          out[static_cast<std::size_t>(d * (i + 1) + k)] = Jet(r);
        }
      return out;
    }
    const auto X = E(dir);
    JetVector out(E(dir).begin(), E(dir).end());
    out.reserve(static_cast<std::size_t>(8 * d));
    for (int i = 0; i < 7; ++i) {
      const auto Ei = E(i);
      JetVector r = contract_gamma(gam, X, Ei);
      for (auto& x : r) x = -x;
      for (int j = 0; j < 7; ++j) {
        const double cij = C(i, j);
        if (cij == 0.0) continue;
        const auto Ej = E(j);
        for (int k = 0; k < d; ++k) r[static_cast<std::size_t>(k)] += cij * Ej[static_cast<std::size_t>(k)];
      }
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  };
}

}  // namespace detail

struct Theorem2Surface {
  ModelSpace model;
  Theorem2Config config;
  Theorem2Curvatures curvatures;
  double a = 0.0;
  FlowSystem system;
  SurfacePatch patch;
  std::function<Vec(double, double)> state;  ///< (f, E_1..E_7) at (u, v)
  double compatibility_max = 0.0;
  std::vector<double> compatibility_map;  ///< per grid node, row-major in u

  /// max |<E_i, E_j> - delta_ij| over the grid nodes.
  double frame_drift() const {
    const int d = model.dim();
    double r = 0.0;
    for (int i = 0; i < patch.nu; ++i)
      for (int j = 0; j < patch.nv; ++j) {
        const Vec S = state(patch.u_at(i), patch.v_at(j));
        Mat E(d, 7);
        for (int k = 0; k < 7; ++k) E.col(k) = S.segment(d * (k + 1), d);
        const Mat G = E.transpose() * model.metric(S.head(d)) * E;
        r = std::max(r, max_abs(Mat(G - Mat::Identity(7, 7))));
      }
    return r;
  }
};

/// Integrates the adapted-frame system (u-lines from the v = 0 spine, then
/// v-lines). Throws IntegrabilityError when the mixed-partial residual of
/// the two flows exceeds cfg.compatibility_tol and `strict` is set.
inline Theorem2Surface build_product_surface(const ModelSpace& m, const Theorem2Config& cfg, bool strict = true) {
  if (m.dim() != 7) throw PreconditionError("theorem2: the model must have n = 3");
  if (std::abs(m.c - cfg.c) > 1e-12)
    throw PreconditionError("theorem2: model c = " + detail::format_value(m.c) + " differs from the configured c");
  if (cfg.grid < 2) throw ParameterError("theorem2: grid must be at least 2");
  if (!(cfg.extent > 0.0)) throw ParameterError("theorem2: extent must be positive");
  Theorem2Surface T;
  T.model = m;
  T.config = cfg;
  T.curvatures = theorem2_curvatures(cfg.c, cfg.h);
  T.a = std::sqrt(T.curvatures.a_sq);
  const auto [Cu, Cv] = detail::theorem2_structure(T.a, cfg.h, cfg.a_scale);
  const int d = m.dim();
  const Vec p0 = Vec::Zero(d);
  const Mat E0 = detail::theorem2_initial_frame(m, p0);
  FlowSystem sys;
  sys.point_dim = d;
  sys.start = Vec(8 * d);
  sys.start.head(d) = p0;
  for (int k = 0; k < 7; ++k) sys.start.segment(d * (k + 1), d) = E0.col(k);
  sys.A = detail::theorem2_field(m, Cu, 0);
  sys.B = detail::theorem2_field(m, Cv, 1);
  T.system = sys;
  const Box box = parameter_box(0.0, cfg.extent, 0.0, cfg.extent);
  const int substeps = cfg.substeps > 0 ? cfg.substeps
                                        : std::max(1, static_cast<int>(std::ceil(cfg.extent / (cfg.grid - 1) / cfg.max_step)));
  auto grid = detail::build_flow_grid(sys, m.chart, box, cfg.grid, cfg.grid, substeps);
  T.state = [grid](double u, double v) { return detail::flow_state_at(*grid, u, v); };
  T.patch = flow_patch(m, grid, "theorem2_product");
  T.compatibility_map.reserve(static_cast<std::size_t>(cfg.grid * cfg.grid));
  for (int i = 0; i < cfg.grid; ++i)
    for (int j = 0; j < cfg.grid; ++j) {
      const double r = flow_compatibility(sys, grid->at(i, j));
      T.compatibility_map.push_back(r);
      T.compatibility_max = std::max(T.compatibility_max, r);
    }
  if (strict && !(T.compatibility_max < cfg.compatibility_tol)) {
    std::string msg = "theorem2: flows do not commute (max mixed-partial residual " +
                      detail::format_value(T.compatibility_max) + "); residual map by u-row:";
    const int stride = std::max(1, cfg.grid / 4);
    for (int i = 0; i < cfg.grid; i += stride) {
      double row = 0.0;
      for (int j = 0; j < cfg.grid; ++j) row = std::max(row, T.compatibility_map[static_cast<std::size_t>(i * cfg.grid + j)]);
      msg += " " + detail::format_value(row);
    }
    throw IntegrabilityError(msg);
  }
  return T;
}

namespace detail {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

/// Frenet data of a coordinate line of T through the patch center.
inline CurveSample theorem2_coordinate_curve(const Theorem2Surface& T, int axis) {
  // centered on a grid node so every sample is reached from the same node
  const double mid = axis == 0 ? T.patch.u_at(T.patch.nu / 2) : T.patch.v_at(T.patch.nv / 2);
  const double ds = 5e-5;
  const int samples = 121;
  const double from = mid - 0.5 * (samples - 1) * ds;
  const double fixed = axis == 0 ? T.patch.v_at(T.patch.nv / 2) : T.patch.u_at(T.patch.nu / 2);
  const FrenetInput in = coordinate_line(T.patch, axis, fixed, from, from + (samples - 1) * ds, samples);
  FrenetOptions opt;
  opt.max_derivatives = 5;
  opt.spacing = 1.5e-4;
  return frenet_apparatus(T.model.chart, in, opt);
}

inline std::pair<double, double> max_mean(const std::vector<double>& v) {
  double mx = 0.0, s = 0.0;
  for (double x : v) {
    mx = std::max(mx, std::isnan(x) ? std::numeric_limits<double>::infinity() : x);
    s += x;
  }
  return {mx, v.empty() ? 0.0 : s / static_cast<double>(v.size())};
}

}  // namespace detail

/// Grids and curves behind a theorem2 report, for CSV export.
struct Theorem2Artifacts {
  std::shared_ptr<const SurfacePatch> patch;  ///< owns the patch geometry points to
  std::optional<SurfaceGeometry> geometry;
  std::optional<QGrid> q;
  std::optional<CurveSample> gamma1, gamma2;
};

/// End-to-end report for the product surface; failures are report entries.
inline VerificationReport verify_theorem2(const ModelSpace& m, const Theorem2Config& cfg,
                                          Theorem2Artifacts* out = nullptr) {
  VerificationReport R;
  R.name = "theorem2";
  R.seed = cfg.seed;
  R.config = {{"model", m.name()}, {"n", m.n}, {"c", cfg.c}, {"h", cfg.h}, {"grid", cfg.grid},
              {"extent", cfg.extent}, {"substeps", cfg.substeps}, {"a_scale", cfg.a_scale}};
  detail::Timer total;

  detail::Timer tb;
  const Theorem2Surface T = build_product_surface(m, cfg, false);
  R.timing["build"] = tb.seconds();
  const auto& K = T.curvatures;
  R.config["a_sq"] = K.a_sq;
  R.config["branch"] = K.umbilical_branch ? "umbilical" : "helix";
  if (cfg.grid < 32) R.caveats.push_back("grid below 32: holomorphicity order study skipped, d-bar values are coarse");
  R.caveats.push_back("patch-level evidence only; completeness is not verified");

  R.add("compatibility", T.compatibility_max, cfg.compatibility_tol);
  R.add("frame_orthonormality", T.frame_drift(), 1e-6);

  detail::Timer tg;
  const SurfaceGeometry G = surface_geometry(T.patch, SurfaceOptions{}, 0);
  R.timing["geometry"] = tg.seconds();

  auto collect = [&](auto f) {
    std::vector<double> v;
    G.for_interior([&](const SurfacePoint& P) { v.push_back(f(P)); });
    return detail::max_mean(v);
  };
  auto add = [&](const std::string& name, auto f, double tol, std::string note = {}) {
    const auto [mx, mean] = collect(f);
    R.add(name, mx, mean, tol, std::move(note));
  };

  add("integral", [](const SurfacePoint& P) { return classify_point(P).integral_residual; }, cfg.grid_tol);
  add("anti_invariant", [](const SurfacePoint& P) { return classify_point(P).anti_invariant_residual; }, cfg.grid_tol);
  add("pmc", [](const SurfacePoint& P) { return pmc_residual(P); }, cfg.grid_tol);
  add("pseudo_umbilical", [](const SurfacePoint& P) { return classify_point(P).pseudo_umbilical_residual; }, cfg.grid_tol);
  add("mean_curvature_norm", [&](const SurfacePoint& P) { return std::abs(P.mean_curvature_norm() - cfg.h); },
      cfg.grid_tol);
  add("eta_H", [](const SurfacePoint& P) { return classify_point(P).eta_H; }, cfg.grid_tol);

  const double K_expected = K.umbilical_branch ? (cfg.c + 3.0) / 4.0 + cfg.h * cfg.h : 0.0;
  R.config["K_expected"] = K_expected;
  add("K_gauss_equation", [&](const SurfacePoint& P) { return std::abs(P.K_gauss - K_expected); }, cfg.grid_tol);
  add("K_intrinsic", [&](const SurfacePoint& P) { return std::abs(P.K_intrinsic - K_expected); }, cfg.grid_tol);
  add("K_formula", [&](const SurfacePoint& P) {
    const auto k = gaussian_curvature(P).formula;
    return k ? std::abs(*k - K_expected) : std::numeric_limits<double>::infinity();
  }, cfg.grid_tol);
  add("a_value", [&](const SurfacePoint& P) { return std::abs(a_value(P) - T.a); }, cfg.grid_tol);

  add("shape_operators", [](const SurfacePoint& P) { return adapted_shape_residual(P); }, cfg.grid_tol);
  add("cubic_form_symmetry", [](const SurfacePoint& P) { return cubic_form_symmetry_residual(P); }, cfg.grid_tol);
  add("phiH_shape_operator", [](const SurfacePoint& P) { return phiH_shape_residual(P); }, cfg.grid_tol);
  if (K.umbilical_branch)
    add("totally_umbilical", [](const SurfacePoint& P) { return umbilicity_residual(P); }, cfg.grid_tol);
  add("lemma_normal", [](const SurfacePoint& P) { return P.lemma_normal; }, cfg.grid_tol);
  add("lemma_normal_mixed", [](const SurfacePoint& P) { return P.lemma_normal_mixed; }, cfg.grid_tol);
  add("lemma_phiH", [](const SurfacePoint& P) { return P.lemma_phiH; }, cfg.grid_tol);
  add("lemma_xi", [](const SurfacePoint& P) { return P.lemma_xi; }, cfg.grid_tol);
  add("lemma_a_derivative", [](const SurfacePoint& P) { return P.deriv_a; }, cfg.grid_tol);

  add("gauss_equation", [](const SurfacePoint& P) { return P.gauss; }, cfg.point_tol);
  add("codazzi_equation", [](const SurfacePoint& P) { return P.codazzi; }, cfg.point_tol);
  add("ricci_equation", [](const SurfacePoint& P) { return P.ricci; }, cfg.point_tol);

  // quadratic forms
  try {
    const QGrid Q = q_forms(G, 1e-7);
    double m1 = 0.0, m2 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < Q.q1.size(); ++k) {
      m1 = std::max(m1, std::abs(Q.q1[k]));
      m2 = std::max(m2, std::abs(Q.q2[k]));
      s1 += std::abs(Q.q1[k]);
      s2 += std::abs(Q.q2[k]);
    }
    const double n = static_cast<double>(Q.q1.size());
    R.add("Q1_vanishing", m1, s1 / n, cfg.grid_tol);
    R.add("Q2_vanishing", m2, s2 / n, cfg.grid_tol);
    R.add("Q2_identity", Q.q2_identity_residual, 1e-12);
    const auto qv = q_vanishing_equivalence(G, cfg.grid_tol);
    R.add_flag("Q1_zero_iff_pseudo_umbilical", qv.agree);
    const auto d = dbar_max(Q);
    std::string note = "Q1, Q2 vanish identically on this surface; d-bar is at roundoff";
    if (cfg.grid < 32) note += "; coarse grid, no order study";
    R.add("dbar_Q1", d.q1, cfg.dbar_tol, note);
    R.add("dbar_Q2", d.q2, cfg.dbar_tol, note);
    if (out) out->q = Q;
  } catch (const PreconditionError& e) {
    R.add("quadratic_forms", std::numeric_limits<double>::infinity(), 0.0, cfg.grid_tol, e.what());
  }
  if (!cfg.holomorphicity_grids.empty()) {
    detail::Timer th;
    Theorem2Config sub = cfg;
    const auto H = holomorphicity_residual(
        [&](int N) {
          sub.grid = N;
          return build_product_surface(m, sub, false).patch;
        },
        cfg.holomorphicity_grids, cfg.grid_tol);
    for (std::size_t k = 0; k < H.grids.size(); ++k) {
      const std::string g = std::to_string(H.grids[k]);
      R.add("dbar_Q1_grid" + g, H.dbar_q1[k], cfg.dbar_tol);
      R.add("dbar_Q2_grid" + g, H.dbar_q2[k], cfg.dbar_tol);
    }
    R.timing["holomorphicity"] = th.seconds();
  }

  // coordinate curves
  detail::Timer tc;
  try {
    const CurveSample g1 = detail::theorem2_coordinate_curve(T, 0);
    const CurveSample g2 = detail::theorem2_coordinate_curve(T, 1);
    const int order1 = K.umbilical_branch ? 2 : 4;
    R.add("gamma1_order", std::abs(g1.osculating_order - order1), 0.5);
    R.add("gamma2_order", std::abs(g2.osculating_order - 2), 0.5);
    const std::vector<double> want1 =
        K.umbilical_branch ? std::vector<double>{K.kappa1} : std::vector<double>{K.kappa1, K.kappa2, K.kappa3};
    for (std::size_t i = 0; i < want1.size(); ++i) {
      double r = std::numeric_limits<double>::infinity();
      if (static_cast<int>(i) < g1.osculating_order - 1) {
        r = 0.0;
        for (const auto& k : g1.curvatures) r = std::max(r, std::abs(k[i] - want1[i]));
      }
      R.add("gamma1_kappa" + std::to_string(i + 1), r, cfg.curvature_tol);
    }
    double r2 = std::numeric_limits<double>::infinity();
    if (g2.osculating_order >= 2) {
      r2 = 0.0;
      for (const auto& k : g2.curvatures) r2 = std::max(r2, std::abs(k[0] - K.kappa_circle));
    }
    R.add("gamma2_kappa", r2, cfg.curvature_tol);
    R.add("gamma1_legendre", legendre_residual(g1, m), cfg.grid_tol);
    R.add("gamma2_legendre", legendre_residual(g2, m), cfg.grid_tol);
    if (out) {
      out->gamma1 = g1;
      out->gamma2 = g2;
    }
  } catch (const Error& e) {
    R.add("coordinate_curves", std::numeric_limits<double>::infinity(), 0.0, cfg.curvature_tol, e.what());
  }
  R.timing["curves"] = tc.seconds();
  R.timing["total"] = total.seconds();
  if (out) {
    out->patch = std::make_shared<const SurfacePatch>(T.patch);
    out->geometry = G;
    out->geometry->patch = out->patch.get();
  }
  return R;
}

inline VerificationReport verify_theorem2(const Theorem2Config& cfg, Theorem2Artifacts* out = nullptr) {
  return verify_theorem2(theorem2_model(cfg.c), cfg, out);
}

struct Theorem5Scan {
  double max_value = -std::numeric_limits<double>::infinity();
  double argmax_c = 0.0, argmax_t = 0.0;
  bool all_negative = false;
  long points = 0;
};

inline double theorem5_polynomial(double c, double t) {
  const double t2 = t * t;
  return (1.0 - c) * t2 * t2 + (c - 5.0) * t2 - 16.0;
}

/// P(c, t) on c_steps x t_steps nodes, c in [c_min, c_max], t interior to (0, 1).
inline Theorem5Scan theorem5_polynomial_scan(double c_min, double c_max, int c_steps, int t_steps) {
  if (!(c_max < 1.0)) throw PreconditionError("theorem5 scan: c range must lie below 1");
  if (!(c_min <= c_max)) throw ParameterError("theorem5 scan: empty c range");
  if (c_steps < 1 || t_steps < 1) throw ParameterError("theorem5 scan: need at least one sample per axis");
  Theorem5Scan s;
  for (int i = 0; i < c_steps; ++i) {
    const double c = c_steps == 1 ? c_min : c_min + (c_max - c_min) * i / (c_steps - 1);
    for (int j = 1; j <= t_steps; ++j) {
      const double t = static_cast<double>(j) / (t_steps + 1);
      const double p = theorem5_polynomial(c, t);
      ++s.points;
      if (p > s.max_value) {
        s.max_value = p;
        s.argmax_c = c;
        s.argmax_t = t;
      }
    }
  }
  s.all_negative = s.max_value < 0.0;
  return s;
}

}  // namespace sasaki
