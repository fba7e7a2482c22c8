#pragma once
/// @file riemann.hpp
/// Chart-level Riemannian machinery: Christoffel symbols, curvature, nabla R,
/// covariant derivatives and sectional curvature, all computed from jets of
/// the metric.
///
/// Conventions: Gamma^k_ij stored at [k][i][j]; R^l_ijk at [l][i][j][k] with
/// R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z, so that
/// R(e_i,e_j)e_k = R^l_ijk e_l.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sasaki/linalg.hpp"

namespace sasaki {

using VectorFieldFn = std::function<JetVector(std::span<const Jet>)>;
using MatrixFieldFn = std::function<JetMatrix(std::span<const Jet>)>;

struct Box {
  Vec lo;
  Vec hi;

  bool contains(const Vec& p) const {
    if (p.size() != lo.size()) return false;
    for (Eigen::Index i = 0; i < p.size(); ++i)
      if (!(p[i] >= lo[i] && p[i] <= hi[i])) return false;
    return true;
  }
  static Box cube(int dim, double half) {
    return {Vec::Constant(dim, -half), Vec::Constant(dim, half)};
  }
};

inline std::string format_point(const Vec& p) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += detail::format_value(p[i]);
  }
  return s + ")";
}

struct MetricChart {
  int dim = 0;
  MatrixFieldFn metric;
  Box domain;
  /// Extra open-set constraint beyond the box (may be empty).
  std::function<bool(const Vec&)> inside;

  bool contains(const Vec& p) const {
    return p.size() == dim && domain.contains(p) && (!inside || inside(p));
  }
  void require_inside(const Vec& p) const {
    if (!contains(p)) throw DomainError("point outside chart domain: " + format_point(p));
  }
  JetMatrix metric_jets(const Vec& p, int order) const {
    require_inside(p);
    return metric(seed_at(p, order));
  }
  Mat metric_at(const Vec& p) const {
    require_inside(p);
    return values(metric(constant_jets(p)));
  }
};

inline std::size_t gamma_index(int d, int k, int i, int j) {
  return static_cast<std::size_t>((k * d + i) * d + j);
}

/// Christoffel jets (order q-1) from metric jets of order q >= 1.
inline JetVector christoffel_from_metric(const JetMatrix& g) {
  const int d = g.rows();
  int q = kMaxJetOrder;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (!g(i, j).is_constant()) q = std::min(q, g(i, j).order());
  JetVector gamma(static_cast<std::size_t>(d * d * d), Jet(0.0));
  bool all_constant = true;
  for (int i = 0; i < d && all_constant; ++i)
    for (int j = 0; j < d; ++j)
      if (!g(i, j).is_constant()) { all_constant = false; break; }
  if (all_constant) return gamma;
  if (q < 1) throw UnsupportedOrderError("christoffel needs metric jets of order >= 1");

  JetMatrix ginv = inverse(g);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) ginv(i, j) = ginv(i, j).truncated(q - 1);
  // dg[(a*d+b)*d+c] = d_a g_bc
  JetVector dg(static_cast<std::size_t>(d * d * d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = b; c < d; ++c) {
        Jet v = g(b, c).partial(a);
        dg[(a * d + b) * d + c] = v;
        dg[(a * d + c) * d + b] = v;
      }
  JetVector first(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      for (int l = 0; l < d; ++l)
        first[l] = 0.5 * (dg[(i * d + j) * d + l] + dg[(j * d + i) * d + l] - dg[(l * d + i) * d + j]);
      for (int k = 0; k < d; ++k) {
        Jet s(0.0);
        for (int l = 0; l < d; ++l) s += ginv(k, l) * first[l];
        gamma[gamma_index(d, k, i, j)] = s;
        gamma[gamma_index(d, k, j, i)] = s;
      }
    }
  return gamma;
}

/// Christoffel symbols of the chart evaluated along the jet point x: the
/// ambient symbols are expanded at x.value() and composed with x.
inline JetVector christoffel_along(const MetricChart& chart, std::span<const Jet> x) {
  int q = 0;
  for (const auto& c : x)
    if (!c.is_constant()) q = std::max(q, c.order());
  const Vec p = values(x);
  if (q == 0) {
    // values only: plain doubles from the first-order metric jet
    const JetMatrix gj = chart.metric_jets(p, 1);
    const int d = chart.dim;
    Mat g(d, d);
    std::vector<double> dg(static_cast<std::size_t>(d * d * d));  // d_a g_bc
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        g(b, c) = gj(b, c).value();
        for (int a = 0; a < d; ++a) dg[static_cast<std::size_t>((a * d + b) * d + c)] = gj(b, c).d1(a);
      }
    const Mat ginv = g.inverse();
    JetVector amb(static_cast<std::size_t>(d * d * d), Jet(0.0));
    Vec first(d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        for (int l = 0; l < d; ++l)
          first[l] = 0.5 * (dg[static_cast<std::size_t>((i * d + j) * d + l)] + dg[static_cast<std::size_t>((j * d + i) * d + l)] -
                            dg[static_cast<std::size_t>((l * d + i) * d + j)]);
        const Vec gk = ginv * first;
        for (int k = 0; k < d; ++k) {
          amb[gamma_index(d, k, i, j)] = Jet(gk[k]);
          amb[gamma_index(d, k, j, i)] = Jet(gk[k]);
        }
      }
    return amb;
  }
  JetVector amb = christoffel_from_metric(chart.metric_jets(p, q + 1));
  return compose(amb, x);
}

/// Gamma(X, Y)^k = Gamma^k_ij X^i Y^j for jet-valued vectors.
inline JetVector contract_gamma(const JetVector& gamma, std::span<const Jet> X, std::span<const Jet> Y) {
  const int d = static_cast<int>(X.size());
  JetVector out(static_cast<std::size_t>(d), Jet(0.0));
  for (int k = 0; k < d; ++k) {
    Jet s(0.0);
    for (int i = 0; i < d; ++i) {
      if (X[i].is_constant() && X[i].value() == 0.0) continue;
      Jet row(0.0);
      for (int j = 0; j < d; ++j) row += gamma[gamma_index(d, k, i, j)] * Y[j];
      s += X[i] * row;
    }
    out[k] = s;
  }
  return out;
}

struct AmbientGeometry {
  int dim = 0;
  int level = 0;
  Vec point;
  Mat g;
  Mat ginv;
  Tensor<3> gamma;          ///< [k][i][j]
  Tensor<4> dgamma;         ///< [m][k][i][j], level >= 1
  Tensor<4> riemann;        ///< [l][i][j][k], level >= 1
  Tensor<5> nabla_riemann;  ///< [m][l][i][j][k], level >= 2

  Vec gamma_apply(const Vec& X, const Vec& Y) const {
    Vec out = Vec::Zero(dim);
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) out[k] += gamma(k, i, j) * X[i] * Y[j];
    return out;
  }
  /// R(X,Y)Z
  Vec curvature(const Vec& X, const Vec& Y, const Vec& Z) const {
    Vec out = Vec::Zero(dim);
    for (int l = 0; l < dim; ++l)
      for (int i = 0; i < dim; ++i) {
        if (X[i] == 0.0) continue;
        for (int j = 0; j < dim; ++j) {
          const double xy = X[i] * Y[j];
          if (xy == 0.0) continue;
          for (int k = 0; k < dim; ++k) out[l] += riemann(l, i, j, k) * xy * Z[k];
        }
      }
    return out;
  }
  /// (nabla_U R)(X,Y)Z
  Vec nabla_curvature(const Vec& U, const Vec& X, const Vec& Y, const Vec& Z) const {
    Vec out = Vec::Zero(dim);
    for (int m = 0; m < dim; ++m) {
      if (U[m] == 0.0) continue;
      for (int l = 0; l < dim; ++l)
        for (int i = 0; i < dim; ++i) {
          if (X[i] == 0.0) continue;
          for (int j = 0; j < dim; ++j) {
            const double w = U[m] * X[i] * Y[j];
            if (w == 0.0) continue;
            for (int k = 0; k < dim; ++k) out[l] += nabla_riemann(m, l, i, j, k) * w * Z[k];
          }
        }
    }
    return out;
  }
  double inner(const Vec& X, const Vec& Y) const { return X.dot(g * Y); }
};

/// Evaluates metric-derived tensors at p. level 0: Gamma; 1: + R; 2: + nabla R.
inline AmbientGeometry evaluate_ambient(const MetricChart& chart, const Vec& p, int level = 1) {
  const int d = chart.dim;
  AmbientGeometry A;
  A.dim = d;
  A.level = level;
  A.point = p;
  JetMatrix gj = chart.metric_jets(p, level + 1);
  A.g = values(gj);
  Eigen::LDLT<Mat> ldlt(A.g);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      std::abs(A.g.determinant()) < 1e-12 * std::pow(std::max(1.0, max_abs(A.g)), d))
    throw LinearSolveError("metric singular or not positive definite at " + format_point(p));
  A.ginv = A.g.inverse();
  JetVector gam = christoffel_from_metric(gj);
  A.gamma = Tensor<3>(d);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) A.gamma(k, i, j) = gam[gamma_index(d, k, i, j)].value();
  if (level < 1) return A;

  A.dgamma = Tensor<4>(d);
  for (int m = 0; m < d; ++m)
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A.dgamma(m, k, i, j) = gam[gamma_index(d, k, i, j)].d1(m);

  A.riemann = Tensor<4>(d);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double s = A.dgamma(i, l, j, k) - A.dgamma(j, l, i, k);
          for (int m = 0; m < d; ++m) s += A.gamma(l, i, m) * A.gamma(m, j, k) - A.gamma(l, j, m) * A.gamma(m, i, k);
          A.riemann(l, i, j, k) = s;
          A.riemann(l, j, i, k) = -s;
        }
  if (level < 2) return A;

  // d_m R^l_ijk
  Tensor<5> dR(d);
  for (int m = 0; m < d; ++m)
    for (int l = 0; l < d; ++l)
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
          for (int k = 0; k < d; ++k) {
            const auto& gl = gam[gamma_index(d, l, j, k)];
            const auto& gl2 = gam[gamma_index(d, l, i, k)];
            double s = gl.d2(m, i) - gl2.d2(m, j);
            for (int q = 0; q < d; ++q)
              s += A.dgamma(m, l, i, q) * A.gamma(q, j, k) + A.gamma(l, i, q) * A.dgamma(m, q, j, k) -
                   A.dgamma(m, l, j, q) * A.gamma(q, i, k) - A.gamma(l, j, q) * A.dgamma(m, q, i, k);
            dR(m, l, i, j, k) = s;
            dR(m, l, j, i, k) = -s;
          }
  A.nabla_riemann = Tensor<5>(d);
  for (int m = 0; m < d; ++m)
    for (int l = 0; l < d; ++l)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          for (int k = 0; k < d; ++k) {
            double s = dR(m, l, i, j, k);
            for (int q = 0; q < d; ++q)
              s += A.gamma(l, m, q) * A.riemann(q, i, j, k) - A.gamma(q, m, i) * A.riemann(l, q, j, k) -
                   A.gamma(q, m, j) * A.riemann(l, i, q, k) - A.gamma(q, m, k) * A.riemann(l, i, j, q);
            A.nabla_riemann(m, l, i, j, k) = s;
          }
  return A;
}

inline Tensor<3> christoffel(const MetricChart& chart, const Vec& p) {
  return evaluate_ambient(chart, p, 0).gamma;
}

inline Tensor<4> riemann(const MetricChart& chart, const Vec& p) {
  return evaluate_ambient(chart, p, 1).riemann;
}

/// Components (nabla_U R)^l_ijk.
inline Tensor<4> nabla_riemann(const MetricChart& chart, const Vec& p, const Vec& U) {
  const AmbientGeometry A = evaluate_ambient(chart, p, 2);
  const int d = A.dim;
  Tensor<4> out(d);
  for (int m = 0; m < d; ++m) {
    if (U[m] == 0.0) continue;
    for (int l = 0; l < d; ++l)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          for (int k = 0; k < d; ++k) out(l, i, j, k) += U[m] * A.nabla_riemann(m, l, i, j, k);
  }
  return out;
}

/// Lowered R_lijk = g_lm R^m_ijk.
inline Tensor<4> lowered_riemann(const AmbientGeometry& A) {
  const int d = A.dim;
  Tensor<4> out(d);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double s = 0.0;
          for (int m = 0; m < d; ++m) s += A.g(l, m) * A.riemann(m, i, j, k);
          out(l, i, j, k) = s;
        }
  return out;
}

/// (nabla_X Y)^k at p for a jet-differentiable vector field Y.
inline Vec covariant_derivative(const MetricChart& chart, const Vec& p, const Vec& X, const VectorFieldFn& Y) {
  const int d = chart.dim;
  chart.require_inside(p);
  const JetVector y = Y(seed_at(p, 1));
  const Tensor<3> gam = christoffel(chart, p);
  Vec out = Vec::Zero(d);
  for (int k = 0; k < d; ++k) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      s += X[i] * y[k].d1(i);
      for (int j = 0; j < d; ++j) s += gam(k, i, j) * X[i] * y[j].value();
    }
    out[k] = s;
  }
  return out;
}

inline double sectional_curvature(const AmbientGeometry& A, const Vec& X, const Vec& Y) {
  const double den = A.inner(X, X) * A.inner(Y, Y) - A.inner(X, Y) * A.inner(X, Y);
  const double scale = A.inner(X, X) * A.inner(Y, Y);
  if (!(den > 1e-12 * std::max(1.0, scale))) throw DegeneratePlaneError("degenerate plane in sectional curvature");
  return A.inner(A.curvature(X, Y, Y), X) / den;
}

inline double sectional_curvature(const MetricChart& chart, const Vec& p, const Vec& X, const Vec& Y) {
  return sectional_curvature(evaluate_ambient(chart, p, 1), X, Y);
}

}  // namespace sasaki
