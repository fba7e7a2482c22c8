#pragma once
/// @file sasakian.hpp
/// Contact metric axioms, normality, the Sasakian identities, the space-form
/// curvature formula, Okumura's torsion/curvature and the phi-symmetry identity.
///
/// d eta uses the halved convention
///   d eta(U,V) = 1/2 (U eta(V) - V eta(U) - eta([U,V])),
/// under which d eta(U,V) = <U, phi V> and normality reads N + 2 d eta xi = 0.

#include <array>
#include <string>
#include <vector>

#include "sasaki/models.hpp"

namespace sasaki {

/// Numeric structure tensors (and optionally their first partials) at a point.
struct StructurePoint {
  AmbientGeometry A;
  Mat phi;                ///< phi(k, j) = phi^k_j
  Vec xi;
  Vec eta;
  std::vector<Mat> dphi;  ///< dphi[i](k, j) = d_i phi^k_j
  Mat deta;               ///< deta(i, j) = d_i eta_j
  Mat dxi;                ///< dxi(i, k) = d_i xi^k

  int dim() const { return A.dim; }
  double inner(const Vec& a, const Vec& b) const { return A.inner(a, b); }
  double eta_of(const Vec& v) const { return eta.dot(v); }
  Vec phi_of(const Vec& v) const { return phi * v; }
};

/// level as in evaluate_ambient; first partials of the structure tensors are
/// always included.
inline StructurePoint eval_structure(const ModelSpace& m, const Vec& p, int level = 1) {
  StructurePoint S;
  S.A = evaluate_ambient(m.chart, p, level);
  const int d = m.dim();
  const JetVector x = seed_at(p, 1);
  const JetMatrix phi = m.phi_fn(x);
  const JetVector xi = m.xi_fn(x);
  const JetVector eta = m.eta_fn(x);
  S.phi = values(phi);
  S.xi = values(xi);
  S.eta = values(eta);
  S.dphi.assign(static_cast<std::size_t>(d), Mat::Zero(d, d));
  S.deta = Mat::Zero(d, d);
  S.dxi = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < d; ++a) {
      S.deta(i, a) = eta[a].d1(i);
      S.dxi(i, a) = xi[a].d1(i);
      for (int b = 0; b < d; ++b) S.dphi[i](a, b) = phi(a, b).d1(i);
    }
  return S;
}

struct StructureResiduals {
  double phi_squared = 0.0;      ///< phi^2 + I - xi (x) eta
  double metric_compat = 0.0;    ///< <phi U, phi V> - <U,V> + eta(U) eta(V)
  double contact = 0.0;          ///< d eta(U,V) - <U, phi V>
  double normality = 0.0;        ///< N_phi + 2 d eta xi
  double sasakian = 0.0;         ///< (nabla_U phi) V - <U,V> xi + eta(V) U
  double killing = 0.0;          ///< nabla_U xi + phi U
  double eta_xi = 0.0;           ///< eta(xi) - 1, phi xi, eta o phi

  static std::vector<std::string> names() {
    return {"phi_squared", "metric_compat", "contact", "normality", "sasakian", "killing", "eta_xi"};
  }
  std::vector<double> as_vector() const {
    return {phi_squared, metric_compat, contact, normality, sasakian, killing, eta_xi};
  }
  double max() const {
    double r = 0.0;
    for (double v : as_vector()) r = std::max(r, v);
    return r;
  }
};

inline StructureResiduals structure_residuals(const StructurePoint& S) {
  const int d = S.dim();
  const Mat& g = S.A.g;
  const Mat& P = S.phi;
  const Mat I = Mat::Identity(d, d);
  StructureResiduals r;
  r.phi_squared = max_abs(P * P + I - S.xi * S.eta.transpose());
  r.metric_compat = max_abs(P.transpose() * g * P - g + S.eta * S.eta.transpose());
  Mat deta = 0.5 * (S.deta - S.deta.transpose());
  r.contact = max_abs(deta - g * P);

  double nrm = 0.0, sas = 0.0, kil = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double N = 0.0;
        for (int l = 0; l < d; ++l) {
          N += P(l, i) * S.dphi[l](k, j) - P(l, j) * S.dphi[l](k, i) +
               P(k, l) * (S.dphi[j](l, i) - S.dphi[i](l, j));
        }
        nrm = std::max(nrm, std::abs(N + 2.0 * deta(i, j) * S.xi[k]));

        double nab = S.dphi[i](k, j);
        for (int l = 0; l < d; ++l) nab += S.A.gamma(k, i, l) * P(l, j) - S.A.gamma(l, i, j) * P(k, l);
        sas = std::max(sas, std::abs(nab - g(i, j) * S.xi[k] + (i == k ? S.eta[j] : 0.0)));
      }
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      double v = S.dxi(i, k) + P(k, i);
      for (int l = 0; l < d; ++l) v += S.A.gamma(k, i, l) * S.xi[l];
      kil = std::max(kil, std::abs(v));
    }
  r.normality = nrm;
  r.sasakian = sas;
  r.killing = kil;
  r.eta_xi = std::max({std::abs(S.eta.dot(S.xi) - 1.0), max_abs(Vec(P * S.xi)),
                       max_abs(Vec(P.transpose() * S.eta))});
  return r;
}

inline StructureResiduals structure_residuals(const ModelSpace& m, const Vec& p) {
  return structure_residuals(eval_structure(m, p, 0));
}

/// Okumura torsion T_U V = <U, phi V> xi - eta(U) phi V + eta(V) phi U.
/// flip_last reverses the sign of the final term (detector runs only).
inline Vec okumura_torsion(const StructurePoint& S, const Vec& U, const Vec& V, bool flip_last = false) {
  const double s = flip_last ? -1.0 : 1.0;
  return S.inner(U, S.phi_of(V)) * S.xi - S.eta_of(U) * S.phi_of(V) + s * S.eta_of(V) * S.phi_of(U);
}

/// Curvature of Okumura's connection.
inline Vec okumura_curvature(const StructurePoint& S, const Vec& U, const Vec& V, const Vec& W) {
  const Vec pU = S.phi_of(U), pV = S.phi_of(V), pW = S.phi_of(W);
  return S.A.curvature(U, V, W) + S.eta_of(W) * (S.eta_of(U) * V - S.eta_of(V) * U) + S.inner(pV, W) * pU -
         S.inner(pU, W) * pV + 2.0 * S.inner(pU, V) * pW +
         (S.inner(U, W) * S.eta_of(V) - S.inner(V, W) * S.eta_of(U)) * S.xi;
}

struct OkumuraData {
  std::function<Vec(const Vec&, const Vec&, const Vec&)> torsion_fn;
  std::function<Vec(const Vec&, const Vec&, const Vec&, const Vec&)> rbar_fn;
};

inline OkumuraData okumura_data(const ModelSpace& m) {
  OkumuraData o;
  o.torsion_fn = [m](const Vec& p, const Vec& U, const Vec& V) {
    return okumura_torsion(eval_structure(m, p, 0), U, V);
  };
  o.rbar_fn = [m](const Vec& p, const Vec& U, const Vec& V, const Vec& W) {
    return okumura_curvature(eval_structure(m, p, 1), U, V, W);
  };
  return o;
}

/// Right side of the space-form curvature formula with constant c.
inline Vec space_form_curvature(const StructurePoint& S, double c, const Vec& U, const Vec& V, const Vec& W) {
  const Vec pU = S.phi_of(U), pV = S.phi_of(V), pW = S.phi_of(W);
  const double eU = S.eta_of(U), eV = S.eta_of(V), eW = S.eta_of(W);
  const double WV = S.inner(W, V), WU = S.inner(W, U);
  Vec out = (c + 3.0) / 4.0 * (WV * U - WU * V);
  out += (c - 1.0) / 4.0 *
         (eW * eU * V - eW * eV * U + WU * eV * S.xi - WV * eU * S.xi + S.inner(W, pV) * pU -
          S.inner(W, pU) * pV + 2.0 * S.inner(U, pV) * pW);
  return out;
}

inline double curvature_formula_residual(const StructurePoint& S, double c, const Vec& U, const Vec& V, const Vec& W) {
  return max_abs(Vec(S.A.curvature(U, V, W) - space_form_curvature(S, c, U, V, W)));
}

inline double curvature_formula_residual(const ModelSpace& m, const Vec& p, const Vec& U, const Vec& V, const Vec& W) {
  return curvature_formula_residual(eval_structure(m, p, 1), m.c, U, V, W);
}

/// Max over all coordinate-frame triples.
inline double curvature_formula_frame_residual(const StructurePoint& S, double c) {
  const int d = S.dim();
  const Mat I = Mat::Identity(d, d);
  double r = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        r = std::max(r, curvature_formula_residual(S, c, I.col(i), I.col(j), I.col(k)));
  return r;
}

/// (nabla_U R)(X,Y)Z + T_U R(X,Y)Z - R(T_U X,Y)Z - R(X,T_U Y)Z - R(X,Y)T_U Z.
inline double phi_symmetry_residual(const StructurePoint& S, const Vec& U, const Vec& X, const Vec& Y, const Vec& Z) {
  if (S.A.level < 2) throw PreconditionError("phi-symmetry needs nabla R (level 2)");
  const auto T = [&](const Vec& a, const Vec& b) { return okumura_torsion(S, a, b); };
  const auto& A = S.A;
  const Vec lhs = A.nabla_curvature(U, X, Y, Z) + T(U, A.curvature(X, Y, Z)) - A.curvature(T(U, X), Y, Z) -
                  A.curvature(X, T(U, Y), Z) - A.curvature(X, Y, T(U, Z));
  return max_abs(lhs);
}

inline double phi_symmetry_residual(const ModelSpace& m, const Vec& p, const Vec& U, const Vec& X, const Vec& Y,
                                    const Vec& Z) {
  return phi_symmetry_residual(eval_structure(m, p, 2), U, X, Y, Z);
}

/// Max over all coordinate-frame quadruples.
inline double phi_symmetry_frame_residual(const StructurePoint& S) {
  const int d = S.dim();
  const Mat I = Mat::Identity(d, d);
  double r = 0.0;
  for (int u = 0; u < d; ++u)
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        for (int k = 0; k < d; ++k)
          r = std::max(r, phi_symmetry_residual(S, I.col(u), I.col(i), I.col(j), I.col(k)));
  return r;
}

/// Sectional curvature of span(U, phi U) for a unit U orthogonal to xi.
inline double phi_sectional(const StructurePoint& S, const Vec& U) {
  const double nU = std::sqrt(S.inner(U, U));
  if (std::abs(nU - 1.0) > 1e-8) throw PreconditionError("phi_sectional: U must be unit");
  if (std::abs(S.inner(U, S.xi)) > 1e-10) throw PreconditionError("phi_sectional: U not orthogonal to xi");
  return sectional_curvature(S.A, U, S.phi_of(U));
}

inline double phi_sectional(const ModelSpace& m, const Vec& p, const Vec& U) {
  return phi_sectional(eval_structure(m, p, 1), U);
}

/// Random unit vector orthogonal to xi.
inline Vec random_horizontal_unit(const StructurePoint& S, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  for (;;) {
    Vec v(S.dim());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = nd(rng);
    const double xx = S.inner(S.xi, S.xi);
    if (xx > 0.0) v -= S.inner(v, S.xi) / xx * S.xi;
    const double n = std::sqrt(S.inner(v, v));
    if (n > 1e-6) {
      v /= n;
      v -= S.inner(v, S.xi) / std::max(xx, 1e-300) * S.xi;
      return v / std::sqrt(S.inner(v, v));
    }
  }
}

/// |T_v v|, which vanishes because Okumura's connection shares geodesics
/// with the Levi-Civita connection.
inline double okumura_geodesic_check(const StructurePoint& S, const Vec& v, bool flip_last = false) {
  const Vec t = okumura_torsion(S, v, v, flip_last);
  return std::sqrt(std::max(0.0, S.inner(t, t)));
}

inline double okumura_geodesic_check(const ModelSpace& m, const Vec& p, const Vec& v) {
  if (v.norm() == 0.0) throw PreconditionError("okumura_geodesic_check: zero vector");
  return okumura_geodesic_check(eval_structure(m, p, 0), v);
}

/// d omega (halved) - Omega with Omega(X, Y) = G(X, J Y), max over coordinate pairs.
inline double kahler_exactness_residual(const KahlerChart& K, const Vec& w) {
  if (!K.omega) throw UnsupportedError("chart has no primitive 1-form");
  const int d = K.chart.dim;
  const JetVector om = K.omega(seed_at(w, 1));
  const Mat G = K.chart.metric_at(w);
  const Mat Omega = G * K.J;
  double r = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r = std::max(r, std::abs(0.5 * (om[j].d1(i) - om[i].d1(j)) - Omega(i, j)));
  return r;
}

}  // namespace sasaki
