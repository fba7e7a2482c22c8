#pragma once
/// @file differentials.hpp
/// The quadratic forms Q_1, Q_2 on isothermal patches and a discrete
/// d-bar test of holomorphicity of Q(Z, Z), Z = (d_u - i d_v)/sqrt 2.

#include <complex>

#include "sasaki/surface.hpp"

namespace sasaki {

using Complex = std::complex<double>;

struct QGrid {
  int nu = 0, nv = 0;
  double du = 0.0, dv = 0.0;
  std::vector<Complex> q1, q2;
  std::vector<double> lambda_sq;
  double isothermal_residual = 0.0;  ///< max of |h_uu - h_vv|, |h_uv| relative to lambda^2
  double q2_identity_residual = 0.0; ///< |Q_2 - (eta(Z) - <phi Z, H>)^2|
  double eta_terms = 0.0;            ///< max |eta(Z)|

  const Complex& Q1(int i, int j) const { return q1[static_cast<std::size_t>(i * nv + j)]; }
  const Complex& Q2(int i, int j) const { return q2[static_cast<std::size_t>(i * nv + j)]; }
  double max_abs_q1() const {
    double r = 0.0;
    for (const auto& z : q1) r = std::max(r, std::abs(z));
    return r;
  }
  double min_abs(const std::vector<Complex>& q) const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& z : q) r = std::min(r, std::abs(z));
    return r;
  }
};

struct QValues {
  Complex q1, q2, eta, phiH;
};

/// Q_1(Z,Z) = 8<sigma(Z,Z), H> - (c-1) eta(Z)^2 and
/// Q_2(Z,Z) = <phi Z, H>^2 + eta(Z)^2 - 2 eta(Z) <phi Z, H>, complex-bilinear.
inline QValues q_values(const SurfacePoint& P) {
  const Complex I(0.0, 1.0);
  const double r2 = std::sqrt(2.0);
  const double su = P.inner(P.sigma[0], P.H), sm = P.inner(P.sigma[1], P.H), sv = P.inner(P.sigma[2], P.H);
  const Complex sZZ_H = 0.5 * (su - sv) - I * sm;
  const Complex etaZ = (P.eta.dot(P.T.col(0)) - I * P.eta.dot(P.T.col(1))) / r2;
  const Complex phiZH = (P.inner(P.phi * P.T.col(0), P.H) - I * P.inner(P.phi * P.T.col(1), P.H)) / r2;
  QValues q;
  q.q1 = 8.0 * sZZ_H - (P.c - 1.0) * etaZ * etaZ;
  q.q2 = phiZH * phiZH + etaZ * etaZ - 2.0 * etaZ * phiZH;
  q.eta = etaZ;
  q.phiH = phiZH;
  return q;
}

inline QGrid q_forms(const SurfaceGeometry& G, double iso_tol = 1e-7) {
  QGrid Q;
  Q.nu = G.nu;
  Q.nv = G.nv;
  Q.du = G.patch->du();
  Q.dv = G.patch->dv();
  for (const auto& P : G.points) {
    const double lam = 0.5 * (P.h(0, 0) + P.h(1, 1));
    const double iso = std::max(std::abs(P.h(0, 0) - P.h(1, 1)), std::abs(P.h(0, 1))) / lam;
    Q.isothermal_residual = std::max(Q.isothermal_residual, iso);
    Q.lambda_sq.push_back(lam);
    const auto v = q_values(P);
    Q.q1.push_back(v.q1);
    Q.q2.push_back(v.q2);
    Q.eta_terms = std::max(Q.eta_terms, std::abs(v.eta));
    const Complex d = v.eta - v.phiH;
    Q.q2_identity_residual = std::max(Q.q2_identity_residual, std::abs(v.q2 - d * d));
  }
  if (Q.isothermal_residual > iso_tol)
    throw PreconditionError("q_forms: patch is not isothermal (relative defect " +
                            detail::format_value(Q.isothermal_residual) + ")");
  return Q;
}

struct DbarMax {
  double q1 = 0.0, q2 = 0.0;
};

/// max over interior nodes (one-cell margin) of |1/2 (d_u + i d_v) Q| with
/// centered differences.
namespace detail {
/// |d-bar q| at an interior node by centered differences.
inline double dbar_at(const QGrid& Q, const std::vector<Complex>& q, int i, int j) {
  auto at = [&](int a, int b) { return q[static_cast<std::size_t>(a * Q.nv + b)]; };
  const Complex du = (at(i + 1, j) - at(i - 1, j)) / (2.0 * Q.du);
  const Complex dv = (at(i, j + 1) - at(i, j - 1)) / (2.0 * Q.dv);
  return std::abs(0.5 * (du + Complex(0.0, 1.0) * dv));
}
}  // namespace detail

inline DbarMax dbar_max(const QGrid& Q) {
  if (Q.nu < 3 || Q.nv < 3) throw PreconditionError("dbar needs at least 3 nodes per axis");
  DbarMax r;
  for (int i = 1; i < Q.nu - 1; ++i)
    for (int j = 1; j < Q.nv - 1; ++j) {
      r.q1 = std::max(r.q1, detail::dbar_at(Q, Q.q1, i, j));
      r.q2 = std::max(r.q2, detail::dbar_at(Q, Q.q2, i, j));
    }
  return r;
}

struct HolomorphicityResult {
  std::vector<int> grids;
  std::vector<double> spacing;
  std::vector<double> dbar_q1, dbar_q2;
  std::vector<double> max_q1, max_q2;
  double order_q1 = std::numeric_limits<double>::quiet_NaN();
  double order_q2 = std::numeric_limits<double>::quiet_NaN();
  double anti_invariant_residual = 0.0;
  double pmc_residual = 0.0;
  /// true when the finest-grid d-bar of a form is below noise_floor * max|Q|
  /// (identically vanishing forms), so no order is measurable for it
  bool q1_at_noise = false, q2_at_noise = false;

  double convergence_order() const {
    double r = std::numeric_limits<double>::infinity();
    if (!q1_at_noise) r = std::min(r, order_q1);
    if (!q2_at_noise) r = std::min(r, order_q2);
    return r;
  }
};

/// Runs q_forms + dbar on the patches make_patch(N) for each N in grids.
/// The hypotheses (anti-invariant, pmc) are gated on a coarse full evaluation.
inline HolomorphicityResult holomorphicity_residual(const std::function<SurfacePatch(int)>& make_patch,
                                                    const std::vector<int>& grids = {32, 64, 128},
                                                    double gate_tol = 1e-5, double noise_floor = 1e-9) {
  if (grids.empty()) throw PreconditionError("holomorphicity_residual: no grids");
  HolomorphicityResult R;
  {
    SurfacePatch gate = make_patch(grids.front());
    gate.nu = gate.nv = 5;
    const auto G = surface_geometry(gate);
    R.anti_invariant_residual = classify_surface(G).anti_invariant_residual;
    R.pmc_residual = pmc_residual(G);
    if (R.anti_invariant_residual > gate_tol)
      throw PreconditionError("holomorphicity_residual: surface is not anti-invariant (residual " +
                              detail::format_value(R.anti_invariant_residual) + ")");
    if (R.pmc_residual > gate_tol)
      throw PreconditionError("holomorphicity_residual: surface is not pmc (residual " +
                              detail::format_value(R.pmc_residual) + ")");
  }
  SurfaceOptions light;
  light.full = false;
  for (int N : grids) {
    if (N < 32) throw PreconditionError("holomorphicity_residual: grids must have at least 32 nodes per axis");
    const SurfacePatch P = make_patch(N);
    const auto G = surface_geometry(P, light);
    const auto Q = q_forms(G);
    const auto d = dbar_max(Q);
    R.grids.push_back(N);
    R.spacing.push_back(std::max(P.du(), P.dv()));
    R.dbar_q1.push_back(d.q1);
    R.dbar_q2.push_back(d.q2);
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < Q.q1.size(); ++k) {
      m1 = std::max(m1, std::abs(Q.q1[k]));
      m2 = std::max(m2, std::abs(Q.q2[k]));
    }
    R.max_q1.push_back(m1);
    R.max_q2.push_back(m2);
  }
  R.q1_at_noise = R.dbar_q1.back() <= noise_floor * std::max(1.0, R.max_q1.back());
  R.q2_at_noise = R.dbar_q2.back() <= noise_floor * std::max(1.0, R.max_q2.back());
  auto order = [&](const std::vector<double>& e) {
    double o = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < e.size(); ++k)
      o = std::min(o, std::log(e[k] / e[k + 1]) / std::log(R.spacing[k] / R.spacing[k + 1]));
    return o;
  };
  if (R.grids.size() > 1) {
    R.order_q1 = order(R.dbar_q1);
    R.order_q2 = order(R.dbar_q2);
  }
  return R;
}

struct QVanishing {
  bool q1_zero = false;
  bool pseudo_umbilical = false;
  bool agree = false;
  double max_q1 = 0.0;
  double pseudo_umbilical_residual = 0.0;
};

inline QVanishing q_vanishing_equivalence(const SurfaceGeometry& G, double tol = 1e-5) {
  const auto c = classify_surface(G);
  if (c.integral_residual > tol)
    throw PreconditionError("q_vanishing_equivalence: surface is not integral (residual " +
                            detail::format_value(c.integral_residual) + ")");
  QVanishing r;
  G.for_interior([&](const SurfacePoint& P) { r.max_q1 = std::max(r.max_q1, std::abs(q_values(P).q1)); });
  r.pseudo_umbilical_residual = c.pseudo_umbilical_residual;
  r.q1_zero = r.max_q1 < tol;
  r.pseudo_umbilical = c.pseudo_umbilical_residual < tol;
  r.agree = r.q1_zero == r.pseudo_umbilical;
  return r;
}

/// Pulls a patch back by the holomorphic map w -> w + eps w^3 / 3
/// (w = u + i v), an isothermal reparametrization in which Q(Z,Z) gets the
/// factor (1 + eps w^2)^2. The target patch must cover the image of `domain`.
inline SurfacePatch conformal_reparametrization(const SurfacePatch& target, double eps, const Box& domain, int nu,
                                                int nv) {
  SurfacePatch P = target;
  P.domain = domain;
  P.nu = nu;
  P.nv = nv;
  P.label = target.label + "_conformal";
  const ImmersionFn inner = target.immersion;
  P.immersion = [inner, eps](std::span<const Jet> uv) {
    const Jet& u = uv[0];
    const Jet& v = uv[1];
    const Jet u2 = u * u, v2 = v * v;
    JetVector st{u + (eps / 3.0) * u * (u2 - 3.0 * v2), v + (eps / 3.0) * v * (3.0 * u2 - v2)};
    return inner(st);
  };
  P.compatibility = nullptr;
  return P;
}

/// CSV with columns u, v, Re Q1, Im Q1, Re Q2, Im Q2.
/// d-bar columns are left empty on boundary nodes.
inline void write_q_csv(const QGrid& Q, const SurfacePatch& patch, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os.precision(17);
  os << "u,v,re_q1,im_q1,re_q2,im_q2,abs_dbar_q1,abs_dbar_q2\n";
  for (int i = 0; i < Q.nu; ++i)
    for (int j = 0; j < Q.nv; ++j) {
      os << patch.u_at(i) << ',' << patch.v_at(j) << ',' << Q.Q1(i, j).real() << ',' << Q.Q1(i, j).imag() << ','
         << Q.Q2(i, j).real() << ',' << Q.Q2(i, j).imag() << ',';
      if (i > 0 && j > 0 && i + 1 < Q.nu && j + 1 < Q.nv)
        os << detail::dbar_at(Q, Q.q1, i, j) << ',' << detail::dbar_at(Q, Q.q2, i, j);
      else
        os << ',';
      os << '\n';
    }
}

}  // namespace sasaki
