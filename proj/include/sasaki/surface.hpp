#pragma once
/// @file surface.hpp
/// Parametrized surfaces in a model: induced metric, second fundamental form,
/// mean curvature, normal connection, fundamental equations, classification.
///
/// Everything is evaluated pointwise from (u, v)-jets of the immersion, so
/// nabla-perp and R-perp are exact derivatives rather than grid differences.
/// Residuals are reported in the orthonormal tangent frame E_1 = T_u/|T_u|,
/// E_2 = Gram-Schmidt of T_v.

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>

#include "sasaki/curves.hpp"
#include "sasaki/sasakian.hpp"

namespace sasaki {

using ImmersionFn = std::function<JetVector(std::span<const Jet>)>;

struct SurfacePatch {
  ModelSpace model;
  ImmersionFn immersion;  ///< (u, v) jets -> chart point jets
  Box domain;             ///< 2-D parameter rectangle
  int nu = 16, nv = 16;   ///< grid points per axis (including the boundary)
  std::string label;
  /// Flow patches: |[A, B]| at the state over (u, v).
  std::function<double(double, double)> compatibility;

  double du() const { return nu > 1 ? (domain.hi[0] - domain.lo[0]) / (nu - 1) : 0.0; }
  double dv() const { return nv > 1 ? (domain.hi[1] - domain.lo[1]) / (nv - 1) : 0.0; }
  double u_at(int i) const { return domain.lo[0] + i * du(); }
  double v_at(int j) const { return domain.lo[1] + j * dv(); }
  Vec point(double u, double v) const {
    return values(immersion(JetVector{Jet(u), Jet(v)}));
  }
};

inline Box parameter_box(double u0, double u1, double v0, double v1) {
  Vec lo(2), hi(2);
  lo << u0, v0;
  hi << u1, v1;
  return {lo, hi};
}

/// Surface from an explicit jet-differentiable map.
inline SurfacePatch explicit_patch(const ModelSpace& m, ImmersionFn f, const Box& domain, int nu, int nv,
                                   std::string label = "explicit") {
  SurfacePatch P;
  P.model = m;
  P.immersion = std::move(f);
  P.domain = domain;
  P.nu = nu;
  P.nv = nv;
  P.label = std::move(label);
  return P;
}

/// A surface generated by two commuting flows on a state whose first
/// `point_dim` components are the chart point.
struct FlowSystem {
  int point_dim = 0;
  JetStateFn A;  ///< d/du
  JetStateFn B;  ///< d/dv
  Vec start;     ///< state at (u0, v0)
  double u0 = 0.0, v0 = 0.0;
  std::function<void(Vec&)> project;  ///< optional re-orthonormalization
};

namespace detail {

struct FlowGrid {
  FlowSystem sys;
  Box domain;
  int nu = 0, nv = 0;
  int substeps = 4;
  std::vector<Vec> states;  // (i * nv + j)
  MetricChart chart;

  const Vec& at(int i, int j) const { return states[static_cast<std::size_t>(i * nv + j)]; }
};

inline Vec integrate_line(const FlowSystem& sys, const StateFn& f, Vec y, double length, int steps) {
  return rk4_integrate(f, std::move(y), length, steps, sys.project);
}

inline std::shared_ptr<FlowGrid> build_flow_grid(const FlowSystem& sys, const MetricChart& chart, const Box& domain,
                                                 int nu, int nv, int substeps) {
  auto G = std::make_shared<FlowGrid>();
  G->sys = sys;
  G->domain = domain;
  G->nu = nu;
  G->nv = nv;
  G->substeps = substeps;
  G->chart = chart;
  G->states.resize(static_cast<std::size_t>(nu * nv));
  const StateFn fa = numeric_field(sys.A), fb = numeric_field(sys.B);
  const double du = (domain.hi[0] - domain.lo[0]) / std::max(1, nu - 1);
  const double dv = (domain.hi[1] - domain.lo[1]) / std::max(1, nv - 1);
  auto check = [&](const Vec& y) {
    const Vec p = y.head(sys.point_dim);
    if (!chart.contains(p)) throw DomainError("surface left the chart at " + format_point(p));
  };
  // spine along u at v = v0, then v-lines
  const int i0 = static_cast<int>(std::lround((sys.u0 - domain.lo[0]) / du));
  const int j0 = static_cast<int>(std::lround((sys.v0 - domain.lo[1]) / dv));
  if (i0 < 0 || i0 >= nu || j0 < 0 || j0 >= nv ||
      std::abs(domain.lo[0] + i0 * du - sys.u0) > 1e-9 * std::max(1.0, du) ||
      std::abs(domain.lo[1] + j0 * dv - sys.v0) > 1e-9 * std::max(1.0, dv))
    throw PreconditionError("flow start must be a grid node");
  std::vector<Vec> spine(static_cast<std::size_t>(nu));
  spine[static_cast<std::size_t>(i0)] = sys.start;
  for (int i = i0 + 1; i < nu; ++i) {
    spine[static_cast<std::size_t>(i)] = integrate_line(sys, fa, spine[static_cast<std::size_t>(i - 1)], du, substeps);
    check(spine[static_cast<std::size_t>(i)]);
  }
  for (int i = i0 - 1; i >= 0; --i) {
    spine[static_cast<std::size_t>(i)] = integrate_line(sys, fa, spine[static_cast<std::size_t>(i + 1)], -du, substeps);
    check(spine[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < nu; ++i) {
    G->states[static_cast<std::size_t>(i * nv + j0)] = spine[static_cast<std::size_t>(i)];
    for (int j = j0 + 1; j < nv; ++j) {
      G->states[static_cast<std::size_t>(i * nv + j)] = integrate_line(sys, fb, G->at(i, j - 1), dv, substeps);
      check(G->at(i, j));
    }
    for (int j = j0 - 1; j >= 0; --j) {
      G->states[static_cast<std::size_t>(i * nv + j)] = integrate_line(sys, fb, G->at(i, j + 1), -dv, substeps);
      check(G->at(i, j));
    }
  }
  return G;
}

/// State at an arbitrary (u, v): integrate from the nearest node.
inline Vec flow_state_at(const FlowGrid& G, double u, double v) {
  const double du = (G.domain.hi[0] - G.domain.lo[0]) / std::max(1, G.nu - 1);
  const double dv = (G.domain.hi[1] - G.domain.lo[1]) / std::max(1, G.nv - 1);
  const int i = std::clamp(static_cast<int>(std::lround((u - G.domain.lo[0]) / du)), 0, G.nu - 1);
  const int j = std::clamp(static_cast<int>(std::lround((v - G.domain.lo[1]) / dv)), 0, G.nv - 1);
  Vec y = G.at(i, j);
  const double eu = u - (G.domain.lo[0] + i * du), ev = v - (G.domain.lo[1] + j * dv);
  auto steps_for = [&](double len, double cell) {
    return std::max(1, static_cast<int>(std::ceil(std::abs(len) / cell * G.substeps)));
  };
  if (std::abs(eu) > 1e-14) y = integrate_line(G.sys, numeric_field(G.sys.A), y, eu, steps_for(eu, du));
  if (std::abs(ev) > 1e-14) y = integrate_line(G.sys, numeric_field(G.sys.B), y, ev, steps_for(ev, dv));
  return y;
}

}  // namespace detail

/// Surface swept by commuting flows, integrated on the grid with RK4
/// (`substeps` per cell). Jets at a point come from Picard iteration on the
/// local flows, so derivatives are exact for the integrated state.
inline SurfacePatch flow_patch(const ModelSpace& m, std::shared_ptr<const detail::FlowGrid> grid,
                               std::string label = "flow") {
  SurfacePatch P;
  P.model = m;
  P.domain = grid->domain;
  P.nu = grid->nu;
  P.nv = grid->nv;
  P.label = std::move(label);
  P.compatibility = [grid](double u, double v) {
    return max_abs(lie_bracket(grid->sys.A, grid->sys.B, detail::flow_state_at(*grid, u, v)));
  };
  P.immersion = [grid](std::span<const Jet> uv) {
    const double u = uv[0].value(), v = uv[1].value();
    const Vec S = detail::flow_state_at(*grid, u, v);
    int q = 0;
    for (const auto& x : uv)
      if (!x.is_constant()) q = std::max(q, x.order());
    const int d = grid->sys.point_dim;
    if (q == 0) {
      JetVector out(static_cast<std::size_t>(d));
      for (int k = 0; k < d; ++k) out[static_cast<std::size_t>(k)] = Jet(S[k]);
      return out;
    }
    const JetVector J = commuting_flow_jets(grid->sys.A, grid->sys.B, S, q);
    JetVector pt(J.begin(), J.begin() + d);
    // re-expand in the caller's variables
    JetVector inner(2);
    for (int a = 0; a < 2; ++a) inner[static_cast<std::size_t>(a)] = uv[static_cast<std::size_t>(a)] - uv[static_cast<std::size_t>(a)].value();
    std::vector<Jet> shifted(2);
    bool identity = uv[0].dim() == 2 && uv[1].dim() == 2;
    if (identity)
      for (int a = 0; a < 2 && identity; ++a)
        for (int b = 0; b < 2; ++b)
          if (uv[static_cast<std::size_t>(a)].d1(b) != (a == b ? 1.0 : 0.0) ||
              uv[static_cast<std::size_t>(a)].d2(b, b) != 0.0) {
            identity = false;
            break;
          }
    if (identity) return pt;
    return compose(std::span<const Jet>(pt), std::span<const Jet>(uv));
  };
  return P;
}

inline SurfacePatch flow_patch(const ModelSpace& m, const FlowSystem& sys, const Box& domain, int nu, int nv,
                               int substeps = 4, std::string label = "flow") {
  return flow_patch(m, detail::build_flow_grid(sys, m.chart, domain, nu, nv, substeps), std::move(label));
}

/// Compatibility (Lie bracket) residual of a flow system at a state.
inline double flow_compatibility(const FlowSystem& sys, const Vec& S) {
  return max_abs(lie_bracket(sys.A, sys.B, S));
}

struct SurfaceOptions {
  bool full = true;        ///< third-order quantities (nabla-perp, Codazzi, Ricci, K, lemmas)
  bool zero_sff = false;   ///< detector: drop sigma from the Gauss equation
};

struct SurfacePoint {
  double u = 0.0, v = 0.0;
  Vec p;
  Mat T;                     ///< d x 2 coordinate tangents
  Mat h;                     ///< induced metric
  Mat M;                     ///< E = T M (upper triangular)
  Mat E;                     ///< orthonormal tangent frame
  std::array<Vec, 3> sigma;  ///< sigma(d_u,d_u), sigma(d_u,d_v), sigma(d_v,d_v)
  Vec H;
  Mat g, phi;
  Vec xi, eta;
  Mat normal_frame;          ///< orthonormal normal basis (adapted order)
  double c = 0.0;            ///< model constant

  // full-level data
  std::array<Vec, 2> dH;     ///< nabla-perp_{E_i} H
  double alpha = 0.0;        ///< <nabla_{E_1} E_1, E_2>
  double beta = 0.0;         ///< <nabla_{E_2} E_2, E_1>
  double K_intrinsic = std::numeric_limits<double>::quiet_NaN();
  double K_gauss = std::numeric_limits<double>::quiet_NaN();
  double gauss = std::numeric_limits<double>::quiet_NaN();
  double codazzi = std::numeric_limits<double>::quiet_NaN();
  double ricci = std::numeric_limits<double>::quiet_NaN();
  double lemma_normal = std::numeric_limits<double>::quiet_NaN();  ///< item (1)
  double lemma_normal_mixed = std::numeric_limits<double>::quiet_NaN();  ///< item (2)
  double lemma_phiH = std::numeric_limits<double>::quiet_NaN();
  double lemma_xi = std::numeric_limits<double>::quiet_NaN();
  double deriv_a = std::numeric_limits<double>::quiet_NaN();
  bool has_full = false;

  int dim() const { return static_cast<int>(p.size()); }
  double inner(const Vec& a, const Vec& b) const { return a.dot(g * b); }
  double norm(const Vec& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }
  /// sigma(E_i, E_j)
  Vec sigma_frame(int i, int j) const {
    Vec s = Vec::Zero(dim());
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) s += M(a, i) * M(b, j) * sigma[static_cast<std::size_t>(a + b)];
    return s;
  }
  double mean_curvature_norm() const { return norm(H); }
  Vec tangential(const Vec& w) const {
    const Eigen::Vector2d c = h.inverse() * (T.transpose() * g * w);
    return T * c;
  }
  Vec normal_part(const Vec& w) const { return w - tangential(w); }
};

namespace detail {

struct PatchJets {
  JetVector F;
  std::array<JetVector, 2> T;
  JetMatrix G;
  JetVector gamma;  // along F
  JetMatrix h, hinv;
};

inline JetVector perp(const PatchJets& J, const JetVector& W) {
  const Jet w0 = bilinear(J.G, J.T[0], W), w1 = bilinear(J.G, J.T[1], W);
  const Jet c0 = J.hinv(0, 0) * w0 + J.hinv(0, 1) * w1;
  const Jet c1 = J.hinv(1, 0) * w0 + J.hinv(1, 1) * w1;
  JetVector out(W.size());
  for (std::size_t k = 0; k < W.size(); ++k) out[k] = W[k] - c0 * J.T[0][k] - c1 * J.T[1][k];
  return out;
}

/// nabla_X W along the patch for X = sum_a X^a d_a (jets), W a jet field.
inline JetVector ambient_derivative(const PatchJets& J, const std::array<Jet, 2>& X, const JetVector& W) {
  const JetVector du = partial(W, 0), dv = partial(W, 1);
  const int d = static_cast<int>(W.size());
  JetVector Xv(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) Xv[static_cast<std::size_t>(k)] = X[0] * J.T[0][static_cast<std::size_t>(k)] + X[1] * J.T[1][static_cast<std::size_t>(k)];
  const JetVector corr = contract_gamma(J.gamma, Xv, W);
  JetVector out(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k)
    out[static_cast<std::size_t>(k)] = X[0] * du[static_cast<std::size_t>(k)] + X[1] * dv[static_cast<std::size_t>(k)] + corr[static_cast<std::size_t>(k)];
  return out;
}

inline Mat value_gram_schmidt_candidates(const SurfacePoint& P, const std::vector<Vec>& candidates, int want) {
  const int d = P.dim();
  Mat out(d, want);
  int k = 0;
  for (const Vec& c0 : candidates) {
    if (k == want) break;
    Vec c = P.normal_part(c0);
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < k; ++j) c -= P.inner(out.col(j), c) * out.col(j);
    const double n = P.norm(c);
    if (n < 1e-8) continue;
    out.col(k++) = c / n;
  }
  if (k < want) throw ImmersionError("could not complete the normal frame");
  return out;
}

}  // namespace detail

/// Geometry at one parameter point.
inline SurfacePoint surface_point(const SurfacePatch& patch, double u, double v, const SurfaceOptions& opt = {}) {
  const ModelSpace& m = patch.model;
  const int d = m.dim();
  const int q = opt.full ? 3 : 2;
  SurfacePoint P;
  P.u = u;
  P.v = v;
  P.c = m.c;

  detail::PatchJets J;
  const JetVector uv = seed_independents({u, v}, q);
  J.F = patch.immersion(uv);
  if (static_cast<int>(J.F.size()) != d) throw DimensionError("immersion returned the wrong dimension");
  P.p = values(J.F);
  m.chart.require_inside(P.p);
  J.T[0] = partial(J.F, 0);
  J.T[1] = partial(J.F, 1);
  J.G = m.chart.metric(J.F);
  J.gamma = christoffel_along(m.chart, truncated(J.F, q - 2));
  J.h = JetMatrix(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = a; b < 2; ++b) {
      J.h(a, b) = bilinear(J.G, J.T[static_cast<std::size_t>(a)], J.T[static_cast<std::size_t>(b)]);
      J.h(b, a) = J.h(a, b);
    }
  P.g = values(J.G);
  P.h = values(J.h);
  P.T = Mat(d, 2);
  P.T.col(0) = values(J.T[0]);
  P.T.col(1) = values(J.T[1]);
  {
    Eigen::SelfAdjointEigenSolver<Mat> es(P.h);
    if (!(es.eigenvalues().minCoeff() > 1e-10))
      throw ImmersionError("rank-deficient differential at (u, v) = (" + std::to_string(u) + ", " +
                           std::to_string(v) + ")");
  }
  J.hinv = inverse(J.h);

  // second fundamental form and mean curvature (jets of order q - 2)
  std::array<JetVector, 3> B, sig;
  for (int a = 0; a < 2; ++a)
    for (int b = a; b < 2; ++b) {
      JetVector w = partial(J.T[static_cast<std::size_t>(a)], b);
      const JetVector corr = contract_gamma(J.gamma, J.T[static_cast<std::size_t>(a)], J.T[static_cast<std::size_t>(b)]);
      for (int k = 0; k < d; ++k) w[static_cast<std::size_t>(k)] += corr[static_cast<std::size_t>(k)];
      B[static_cast<std::size_t>(a + b)] = w;
      sig[static_cast<std::size_t>(a + b)] = detail::perp(J, w);
    }
  JetVector Hj(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const std::size_t kk = static_cast<std::size_t>(k);
    Hj[kk] = 0.5 * (J.hinv(0, 0) * sig[0][kk] + 2.0 * J.hinv(0, 1) * sig[1][kk] + J.hinv(1, 1) * sig[2][kk]);
  }
  for (int a = 0; a < 3; ++a) P.sigma[static_cast<std::size_t>(a)] = values(sig[static_cast<std::size_t>(a)]);
  P.H = values(Hj);

  // orthonormal tangent frame as jets: E_i = sum_a M(a, i) d_a
  const Jet n0 = sqrt(J.h(0, 0));
  const Jet m00 = 1.0 / n0;
  const Jet proj = J.h(0, 1) / J.h(0, 0);  // <T_v, T_u>/|T_u|^2
  const Jet n1 = sqrt(J.h(1, 1) - proj * J.h(0, 1));
  const Jet m01 = -proj / n1, m11 = 1.0 / n1;
  P.M = Mat::Zero(2, 2);
  P.M(0, 0) = m00.value();
  P.M(0, 1) = m01.value();
  P.M(1, 1) = m11.value();
  P.E = P.T * P.M;

  const JetMatrix phi = m.phi_fn(J.F);
  const JetVector xi = m.xi_fn(J.F);
  P.phi = values(phi);
  P.xi = values(xi);
  P.eta = values(m.eta_fn(constant_jets(P.p)));

  // adapted normal frame: phi E_1, phi E_2, H, phi H, xi, coordinate vectors
  {
    std::vector<Vec> cand{P.phi * P.E.col(0), P.phi * P.E.col(1), P.H, P.phi * P.H, P.xi};
    for (int k = 0; k < d; ++k) cand.push_back(Vec::Unit(d, k));
    P.normal_frame = detail::value_gram_schmidt_candidates(P, cand, d - 2);
  }
  if (!opt.full) return P;

  // ---- third-order quantities ----
  P.has_full = true;
  const std::array<Jet, 2> E1c{m00, Jet(0.0)}, E2c{m01, m11};
  auto frame_value = [&](const std::array<Jet, 2>& X) { return Eigen::Vector2d(X[0].value(), X[1].value()); };
  (void)frame_value;

  // nabla-perp H along E_i
  for (int i = 0; i < 2; ++i) {
    const auto& X = i == 0 ? E1c : E2c;
    const JetVector w = detail::ambient_derivative(J, X, Hj);
    P.dH[static_cast<std::size_t>(i)] = P.normal_part(values(w));
  }

  const AmbientGeometry A = evaluate_ambient(m.chart, P.p, 1);
  auto RN = [&](const Vec& X, const Vec& Y, const Vec& Z) { return A.curvature(X, Y, Z); };

  // intrinsic curvature through the frame formula
  {
    const JetVector gh = christoffel_from_metric(J.h);  // order 1
    // E_i^a as jets
    const std::array<std::array<Jet, 2>, 2> Ec{E1c, E2c};
    auto nabla_int = [&](int i, int j) {
      std::array<Jet, 2> out{Jet(0.0), Jet(0.0)};
      for (int c = 0; c < 2; ++c) {
        Jet s(0.0);
        for (int a = 0; a < 2; ++a) {
          s += Ec[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] *
               Ec[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)].partial(a);
          for (int b = 0; b < 2; ++b)
            s += gh[gamma_index(2, c, a, b)] * Ec[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] *
                 Ec[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)];
        }
        out[static_cast<std::size_t>(c)] = s;
      }
      return out;
    };
    auto hdot = [&](const std::array<Jet, 2>& X, const std::array<Jet, 2>& Y) {
      Jet s(0.0);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) s += J.h(a, b) * X[static_cast<std::size_t>(a)] * Y[static_cast<std::size_t>(b)];
      return s;
    };
    const Jet al = hdot(nabla_int(0, 0), E2c);
    const Jet be = hdot(nabla_int(1, 1), E1c);
    P.alpha = al.value();
    P.beta = be.value();
    auto along = [&](const std::array<Jet, 2>& X, const Jet& f) {
      return X[0].value() * f.d1(0) + X[1].value() * f.d1(1);
    };
    P.K_intrinsic = along(E1c, be) + along(E2c, al) - P.alpha * P.alpha - P.beta * P.beta;
  }

  const Vec e1 = P.E.col(0), e2 = P.E.col(1);
  std::array<Vec, 2> Ev{e1, e2};
  std::array<std::array<Vec, 2>, 2> S;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) S[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = P.sigma_frame(i, j);
  P.K_gauss = P.inner(RN(e1, e2, e2), e1) + P.inner(S[0][0], S[1][1]) - P.inner(S[0][1], S[0][1]);

  // Gauss equation in the orthonormal frame
  {
    double worst = 0.0;
    const double sw = opt.zero_sff ? 0.0 : 1.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) {
            const double Rint = P.K_intrinsic * ((j == k && i == l ? 1.0 : 0.0) - (i == k && j == l ? 1.0 : 0.0));
            const double Ramb = P.inner(RN(Ev[static_cast<std::size_t>(i)], Ev[static_cast<std::size_t>(j)], Ev[static_cast<std::size_t>(k)]), Ev[static_cast<std::size_t>(l)]);
            const double ss = P.inner(S[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)], S[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)]) -
                              P.inner(S[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)], S[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)]);
            worst = std::max(worst, std::abs(Rint - Ramb - sw * ss));
          }
    P.gauss = worst;
  }

  // Codazzi: (R(T_a,T_b)T_c)^perp - (nabla-perp_a sigma)_bc + (nabla-perp_b sigma)_ac
  {
    // induced Christoffel values Gamma^e_ab = h^{ef} <B_ab, T_f>
    std::array<std::array<Eigen::Vector2d, 2>, 2> gi;
    const Mat hinv = P.h.inverse();
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const Vec Bab = values(B[static_cast<std::size_t>(a + b)]);
        gi[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = hinv * (P.T.transpose() * P.g * Bab);
      }
    auto sig_ab = [&](int a, int b) { return P.sigma[static_cast<std::size_t>(a + b)]; };
    std::array<std::array<Vec, 3>, 2> dsig;  // nabla-perp_a of sigma components as fields
    for (int a = 0; a < 2; ++a)
      for (int s = 0; s < 3; ++s) {
        std::array<Jet, 2> X{Jet(a == 0 ? 1.0 : 0.0), Jet(a == 1 ? 1.0 : 0.0)};
        dsig[static_cast<std::size_t>(a)][static_cast<std::size_t>(s)] = P.normal_part(values(detail::ambient_derivative(J, X, sig[static_cast<std::size_t>(s)])));
      }
    auto nsig = [&](int a, int b, int c) {
      Vec r = dsig[static_cast<std::size_t>(a)][static_cast<std::size_t>(b + c)];
      for (int e = 0; e < 2; ++e)
        r -= gi[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][e] * sig_ab(e, c) +
             gi[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)][e] * sig_ab(b, e);
      return r;
    };
    std::array<std::array<std::array<Vec, 2>, 2>, 2> C;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          C[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][static_cast<std::size_t>(c)] =
              P.normal_part(RN(P.T.col(a), P.T.col(b), P.T.col(c))) - nsig(a, b, c) + nsig(b, a, c);
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          Vec s = Vec::Zero(d);
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              for (int c = 0; c < 2; ++c)
                s += P.M(a, i) * P.M(b, j) * P.M(c, k) * C[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
          worst = std::max(worst, P.norm(s));
        }
    P.codazzi = worst;
  }

  // Ricci equation with a smooth jet normal frame
  {
    const int nn = d - 2;
    std::vector<JetVector> cand;
    {
      JetVector E1j(static_cast<std::size_t>(d)), E2j(static_cast<std::size_t>(d));
      for (int k = 0; k < d; ++k) {
        const std::size_t kk = static_cast<std::size_t>(k);
        E1j[kk] = m00 * J.T[0][kk];
        E2j[kk] = m01 * J.T[0][kk] + m11 * J.T[1][kk];
      }
      cand.push_back(matvec(phi, E1j));
      cand.push_back(matvec(phi, E2j));
      cand.push_back(xi);
      for (int k = 0; k < d; ++k) {
        JetVector e(static_cast<std::size_t>(d), Jet(0.0));
        e[static_cast<std::size_t>(k)] = Jet(1.0);
        cand.push_back(e);
      }
    }
    std::vector<JetVector> nu;
    for (const auto& c0 : cand) {
      if (static_cast<int>(nu.size()) == nn) break;
      JetVector c = detail::perp(J, truncated(c0, 2));
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : nu) {
          const Jet pr = bilinear(J.G, b, c);
          for (std::size_t k = 0; k < c.size(); ++k) c[k] -= pr * b[k];
        }
      const Jet n2 = bilinear(J.G, c, c);
      if (!(n2.value() > 1e-12)) continue;
      const Jet inv = 1.0 / sqrt(n2);
      for (auto& x : c) x = x * inv;
      nu.push_back(c);
    }
    if (static_cast<int>(nu.size()) != nn) throw ImmersionError("normal frame incomplete for the Ricci check");
    // omega[a](al, be) = <nabla_a nu_al, nu_be>
    std::array<std::vector<std::vector<Jet>>, 2> om;
    for (int a = 0; a < 2; ++a) {
      std::array<Jet, 2> X{Jet(a == 0 ? 1.0 : 0.0), Jet(a == 1 ? 1.0 : 0.0)};
      om[static_cast<std::size_t>(a)].assign(static_cast<std::size_t>(nn), std::vector<Jet>(static_cast<std::size_t>(nn)));
      for (int al = 0; al < nn; ++al) {
        const JetVector w = detail::ambient_derivative(J, X, nu[static_cast<std::size_t>(al)]);
        for (int be = 0; be < nn; ++be)
          om[static_cast<std::size_t>(a)][static_cast<std::size_t>(al)][static_cast<std::size_t>(be)] = bilinear(J.G, w, nu[static_cast<std::size_t>(be)]);
      }
    }
    const double detM = P.M(0, 0) * P.M(1, 1) - P.M(1, 0) * P.M(0, 1);
    double worst = 0.0;
    for (int al = 0; al < nn; ++al) {
      const Vec Ua = values(nu[static_cast<std::size_t>(al)]);
      Mat aU(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) aU(i, j) = P.inner(S[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], Ua);
      for (int ga = 0; ga < nn; ++ga) {
        if (ga == al) continue;
        const Vec Vg = values(nu[static_cast<std::size_t>(ga)]);
        Mat aV(2, 2);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) aV(i, j) = P.inner(S[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], Vg);
        const auto& o0 = om[0];
        const auto& o1 = om[1];
        double Rp = o1[static_cast<std::size_t>(al)][static_cast<std::size_t>(ga)].d1(0) -
                    o0[static_cast<std::size_t>(al)][static_cast<std::size_t>(ga)].d1(1);
        for (int be = 0; be < nn; ++be)
          Rp += o1[static_cast<std::size_t>(al)][static_cast<std::size_t>(be)].value() * o0[static_cast<std::size_t>(be)][static_cast<std::size_t>(ga)].value() -
                o0[static_cast<std::size_t>(al)][static_cast<std::size_t>(be)].value() * o1[static_cast<std::size_t>(be)][static_cast<std::size_t>(ga)].value();
        Rp *= detM;
        const Mat comm = aV * aU - aU * aV;
        const double RNv = P.inner(RN(e1, e2, Ua), Vg);
        worst = std::max(worst, std::abs(Rp - comm(0, 1) - RNv));
      }
    }
    P.ricci = worst;
  }

  // Lemma identities for integral pseudo-umbilical pmc surfaces
  {
    JetVector E1j(static_cast<std::size_t>(d)), E2j(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      const std::size_t kk = static_cast<std::size_t>(k);
      E1j[kk] = m00 * J.T[0][kk];
      E2j[kk] = m01 * J.T[0][kk] + m11 * J.T[1][kk];
    }
    const std::array<std::array<Jet, 2>, 2> Ec{E1c, E2c};
    const std::array<JetVector, 2> phiE{matvec(phi, E1j), matvec(phi, E2j)};
    const JetVector phiH = matvec(phi, Hj);
    auto nperp = [&](int i, const JetVector& W) {
      return P.normal_part(values(detail::ambient_derivative(J, Ec[static_cast<std::size_t>(i)], W)));
    };
    const Vec pH = P.phi * P.H;
    const double H2 = P.inner(P.H, P.H);
    const std::array<double, 2> nii{P.alpha, P.beta};  // <nabla_{E_i}E_i, E_j>
    const std::array<double, 2> nij{-P.alpha, -P.beta};  // <nabla_{E_i}E_j, E_i>
    double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
    for (int i = 0; i < 2; ++i) {
      const int j = 1 - i;
      const Vec pEi = P.phi * Ev[static_cast<std::size_t>(i)], pEj = P.phi * Ev[static_cast<std::size_t>(j)];
      r1 = std::max(r1, P.norm(nperp(i, phiE[static_cast<std::size_t>(i)]) - nii[static_cast<std::size_t>(i)] * pEj - pH - P.xi));
      r2 = std::max(r2, P.norm(nperp(i, phiE[static_cast<std::size_t>(j)]) - nij[static_cast<std::size_t>(i)] * pEi));
      r3 = std::max(r3, P.norm(nperp(i, phiH) + H2 * pEi));
      r4 = std::max(r4, P.norm(nperp(i, xi) + pEi));
    }
    P.lemma_normal = r1;
    P.lemma_normal_mixed = r2;
    P.lemma_phiH = r3;
    P.lemma_xi = r4;

    // derivatives of a = |(C_111, C_112)|, C_ijk = <sigma(E_i,E_j), phi E_k>
    JetVector s11(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      const std::size_t kk = static_cast<std::size_t>(k);
      s11[kk] = m00 * m00 * sig[0][kk];
    }
    const Jet C111 = bilinear(J.G, s11, truncated(phiE[0], 1));
    const Jet C112 = bilinear(J.G, s11, truncated(phiE[1], 1));
    const Jet a2 = C111 * C111 + C112 * C112;
    if (a2.value() > 1e-20) {
      const Jet a = sqrt(a2);
      auto along = [&](const std::array<Jet, 2>& X, const Jet& f) {
        return X[0].value() * f.d1(0) + X[1].value() * f.d1(1);
      };
      P.deriv_a = std::max(std::abs(along(E1c, a) - 3.0 * a.value() * P.beta),
                           std::abs(along(E2c, a) - 3.0 * a.value() * P.alpha));
    } else {
      P.deriv_a = 0.0;
    }
  }
  return P;
}

struct SurfaceGeometry {
  const SurfacePatch* patch = nullptr;
  int nu = 0, nv = 0;
  int margin = 0;  ///< boundary rows excluded from statistics
  std::vector<SurfacePoint> points;

  const SurfacePoint& at(int i, int j) const { return points[static_cast<std::size_t>(i * nv + j)]; }
  template <class F>
  void for_interior(F&& f) const {
    for (int i = margin; i < nu - margin; ++i)
      for (int j = margin; j < nv - margin; ++j) f(at(i, j));
  }
  template <class F>
  double max_over(F&& f) const {
    double r = 0.0;
    for_interior([&](const SurfacePoint& P) { r = std::max(r, f(P)); });
    return r;
  }
  template <class F>
  double mean_over(F&& f) const {
    double s = 0.0;
    int n = 0;
    for_interior([&](const SurfacePoint& P) {
      s += f(P);
      ++n;
    });
    return n ? s / n : 0.0;
  }
};

inline SurfaceGeometry surface_geometry(const SurfacePatch& patch, const SurfaceOptions& opt = {}, int margin = 0) {
  SurfaceGeometry G;
  G.patch = &patch;
  G.nu = patch.nu;
  G.nv = patch.nv;
  G.margin = margin;
  G.points.reserve(static_cast<std::size_t>(patch.nu * patch.nv));
  for (int i = 0; i < patch.nu; ++i)
    for (int j = 0; j < patch.nv; ++j) G.points.push_back(surface_point(patch, patch.u_at(i), patch.v_at(j), opt));
  return G;
}

/// A_V in the coordinate basis: A = h^{-1} S with S_ab = <sigma_ab, V>.
inline Mat shape_operator(const SurfacePoint& P, const Vec& V) {
  const Vec t = P.T.transpose() * P.g * V;
  if (t.cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, P.norm(V)) * std::max(1.0, P.T.norm()))
    throw PreconditionError("shape_operator: V is not normal");
  Mat S(2, 2);
  S(0, 0) = P.inner(P.sigma[0], V);
  S(0, 1) = S(1, 0) = P.inner(P.sigma[1], V);
  S(1, 1) = P.inner(P.sigma[2], V);
  return P.h.inverse() * S;
}

/// Symmetric matrix <sigma(E_i,E_j), V> in the orthonormal frame.
inline Mat shape_operator_frame(const SurfacePoint& P, const Vec& V) {
  Mat S(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) S(i, j) = P.inner(P.sigma_frame(i, j), V);
  return S;
}

inline double pmc_residual(const SurfacePoint& P) {
  if (!P.has_full) throw PreconditionError("pmc_residual needs full surface geometry");
  return std::max(P.norm(P.dH[0]), P.norm(P.dH[1]));
}
inline double pmc_residual(const SurfaceGeometry& G) {
  return G.max_over([](const SurfacePoint& P) { return pmc_residual(P); });
}

struct FundamentalResiduals {
  double gauss = 0.0, codazzi = 0.0, ricci = 0.0;
};

inline FundamentalResiduals fundamental_equation_residuals(const SurfacePoint& P) {
  if (!P.has_full) throw PreconditionError("fundamental equations need full surface geometry");
  return {P.gauss, P.codazzi, P.ricci};
}
inline FundamentalResiduals fundamental_equation_residuals(const SurfaceGeometry& G) {
  FundamentalResiduals r;
  G.for_interior([&](const SurfacePoint& P) {
    r.gauss = std::max(r.gauss, P.gauss);
    r.codazzi = std::max(r.codazzi, P.codazzi);
    r.ricci = std::max(r.ricci, P.ricci);
  });
  return r;
}

struct Classification {
  double integral_residual = 0.0;
  double anti_invariant_residual = 0.0;
  double pseudo_umbilical_residual = 0.0;
  double eta_H = 0.0;
  double phiH_tangency = 0.0;
};

inline Classification classify_point(const SurfacePoint& P) {
  Classification c;
  for (int i = 0; i < 2; ++i) {
    c.integral_residual = std::max(c.integral_residual, std::abs(P.eta.dot(P.E.col(i))));
    for (int j = 0; j < 2; ++j)
      c.anti_invariant_residual = std::max(c.anti_invariant_residual, std::abs(P.inner(P.phi * P.E.col(i), P.E.col(j))));
  }
  const Mat AH = shape_operator_frame(P, P.H);
  const double H2 = P.inner(P.H, P.H);
  Eigen::SelfAdjointEigenSolver<Mat> es(AH - H2 * Mat::Identity(2, 2));
  c.pseudo_umbilical_residual = es.eigenvalues().cwiseAbs().maxCoeff();
  c.eta_H = std::abs(P.eta.dot(P.H));
  c.phiH_tangency = P.norm(P.tangential(P.phi * P.H));
  return c;
}

inline Classification classify_surface(const SurfaceGeometry& G) {
  Classification c;
  G.for_interior([&](const SurfacePoint& P) {
    const auto p = classify_point(P);
    c.integral_residual = std::max(c.integral_residual, p.integral_residual);
    c.anti_invariant_residual = std::max(c.anti_invariant_residual, p.anti_invariant_residual);
    c.pseudo_umbilical_residual = std::max(c.pseudo_umbilical_residual, p.pseudo_umbilical_residual);
    c.eta_H = std::max(c.eta_H, p.eta_H);
    c.phiH_tangency = std::max(c.phiH_tangency, p.phiH_tangency);
  });
  return c;
}

/// max ||[A_H, A_V]|| over a basis of the normals orthogonal to phi(T) and
/// phi H; nullopt when that space is trivial.
inline std::optional<double> commuting_shape_check(const SurfacePoint& P) {
  const int d = P.dim();
  std::vector<Vec> excl{P.phi * P.E.col(0), P.phi * P.E.col(1), P.phi * P.H};
  // orthonormal basis of span(excl) within the normal space
  Mat X(d, 0);
  for (const Vec& e0 : excl) {
    Vec e = P.normal_part(e0);
    for (int j = 0; j < X.cols(); ++j) e -= P.inner(X.col(j), e) * X.col(j);
    const double n = P.norm(e);
    if (n < 1e-8) continue;
    X.conservativeResize(d, X.cols() + 1);
    X.col(X.cols() - 1) = e / n;
  }
  const Mat AH = shape_operator_frame(P, P.H);
  double worst = -1.0;
  for (int k = 0; k < P.normal_frame.cols(); ++k) {
    Vec V = P.normal_frame.col(k);
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < X.cols(); ++j) V -= P.inner(X.col(j), V) * X.col(j);
    const double n = P.norm(V);
    if (n < 1e-8) continue;
    V /= n;
    // extend X so the next candidate is independent
    X.conservativeResize(d, X.cols() + 1);
    X.col(X.cols() - 1) = V;
    const Mat AV = shape_operator_frame(P, V);
    worst = std::max(worst, max_abs(Mat(AH * AV - AV * AH)));
  }
  if (worst < 0.0) return std::nullopt;
  return worst;
}

/// Cubic-form amplitude a for integral surfaces: sqrt(C111^2 + C112^2).
inline double a_value(const SurfacePoint& P) {
  const Vec s11 = P.sigma_frame(0, 0);
  const double c111 = P.inner(s11, P.phi * P.E.col(0));
  const double c112 = P.inner(s11, P.phi * P.E.col(1));
  return std::sqrt(c111 * c111 + c112 * c112);
}

struct GaussianCurvature {
  double via_gauss_eq = 0.0;
  double intrinsic = 0.0;
  std::optional<double> formula;  ///< (c+3)/4 - 2 a^2 + |H|^2 on integral patches in dimension 7
};

inline GaussianCurvature gaussian_curvature(const SurfacePoint& P, double integral_tol = 1e-6) {
  if (!P.has_full) throw PreconditionError("gaussian_curvature needs full surface geometry");
  GaussianCurvature K;
  K.via_gauss_eq = P.K_gauss;
  K.intrinsic = P.K_intrinsic;
  if (P.dim() == 7 && classify_point(P).integral_residual < integral_tol) {
    const double a = a_value(P);
    K.formula = (P.c + 3.0) / 4.0 - 2.0 * a * a + P.inner(P.H, P.H);
  }
  return K;
}

/// <sigma(E_i,E_j), phi E_k> total-symmetry defect.
inline double cubic_form_symmetry_residual(const SurfacePoint& P) {
  double C[2][2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) C[i][j][k] = P.inner(P.sigma_frame(i, j), P.phi * P.E.col(k));
  double r = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) r = std::max(r, std::abs(C[i][j][k] - C[i][k][j]));
  return r;
}

/// max |<sigma(E_i,E_j), phi H>|, i.e. A_{phi H} = 0.
inline double phiH_shape_residual(const SurfacePoint& P) {
  return max_abs(shape_operator_frame(P, P.phi * P.H));
}

/// Shape operators of the adapted normal frame E_3..E_7 against
/// A_3 = diag(a,-a), A_4 = [[0,-a],[-a,0]], A_5 = |H| I, A_6 = 0, A_7 = 0.
inline double adapted_shape_residual(const SurfacePoint& P) {
  const double a = a_value(P);
  const double hn = P.mean_curvature_norm();
  const Vec E3 = P.phi * P.E.col(0), E4 = P.phi * P.E.col(1);
  const Vec E5 = hn > 0.0 ? Vec(P.H / hn) : Vec(Vec::Zero(P.dim()));
  const Vec E6 = P.phi * E5;
  Mat A3(2, 2), A4(2, 2);
  A3 << a, 0, 0, -a;
  A4 << 0, -a, -a, 0;
  // a is defined up to the frame rotation; compare with the better of +-a
  const Mat S3 = shape_operator_frame(P, E3), S4 = shape_operator_frame(P, E4);
  double r = std::min(std::max(max_abs(Mat(S3 - A3)), max_abs(Mat(S4 - A4))),
                      std::max(max_abs(Mat(S3 + A3)), max_abs(Mat(S4 + A4))));
  r = std::max(r, max_abs(Mat(shape_operator_frame(P, E5) - hn * Mat::Identity(2, 2))));
  r = std::max(r, max_abs(shape_operator_frame(P, E6)));
  r = std::max(r, max_abs(shape_operator_frame(P, P.xi)));
  return r;
}

/// sigma(X, Y) - <X, Y> H in the orthonormal frame (total umbilicity).
inline double umbilicity_residual(const SurfacePoint& P) {
  double r = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r = std::max(r, P.norm(P.sigma_frame(i, j) - (i == j ? 1.0 : 0.0) * P.H));
  return r;
}

/// Per-point surface invariants: sigma symmetry is structural; H trace and
/// sigma normality are checked numerically.
inline double sigma_normality_residual(const SurfacePoint& P) {
  double r = 0.0;
  for (int s = 0; s < 3; ++s)
    r = std::max(r, max_abs(Vec(P.T.transpose() * P.g * P.sigma[static_cast<std::size_t>(s)])));
  return r;
}
inline double mean_curvature_trace_residual(const SurfacePoint& P) {
  const Vec t = 0.5 * (P.sigma_frame(0, 0) + P.sigma_frame(1, 1));
  return P.norm(t - P.H);
}

/// CSV with columns u, v, K, |H|, a, pmc, gauss, codazzi, ricci.
inline void write_surface_csv(const SurfaceGeometry& G, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os.precision(17);
  os << "u,v,K,H_norm,a,pmc,gauss,codazzi,ricci\n";
  for (const auto& P : G.points) {
    os << P.u << ',' << P.v << ',' << P.K_intrinsic << ',' << P.mean_curvature_norm() << ',' << a_value(P) << ','
       << (P.has_full ? pmc_residual(P) : std::numeric_limits<double>::quiet_NaN()) << ',' << P.gauss << ','
       << P.codazzi << ',' << P.ricci << '\n';
  }
}

/// Coordinate line as a sampled Frenet input: positions at spacing ds along
/// u (axis 0) or v (axis 1) through the fixed other coordinate, with D_1..D_3
/// from jets. Assumes unit speed along the line.
inline FrenetInput coordinate_line(const SurfacePatch& patch, int axis, double fixed, double from, double to,
                                   int samples) {
  FrenetInput in;
  in.ds = (to - from) / (samples - 1);
  in.s0 = from;
  in.known.assign(3, {});
  for (int k = 0; k < samples; ++k) {
    const double s = from + k * in.ds;
    JetVector uv(2);
    const Jet t = Jet::variable(s, 1, 0, 3);
    const Jet f = Jet::zero(1, 3) + fixed;
    uv[static_cast<std::size_t>(axis)] = t;
    uv[static_cast<std::size_t>(1 - axis)] = f;
    // jets of the patch at (u, v), restricted to the line
    const double u = axis == 0 ? s : fixed, v = axis == 0 ? fixed : s;
    const JetVector full = patch.immersion(seed_independents({u, v}, 3));
    JetVector line = compose(std::span<const Jet>(full), std::span<const Jet>(uv));
    in.positions.push_back(values(line));
    const auto D = covariant_derivatives_along(patch.model.chart, line);
    for (int j = 0; j < 3; ++j) in.known[static_cast<std::size_t>(j)].push_back(D[static_cast<std::size_t>(j)]);
  }
  return in;
}

}  // namespace sasaki
