#pragma once
/// @file flows.hpp
/// Fixed-step RK4, finite-difference weights, and Taylor jets of the joint
/// solution of two commuting autonomous flows.

#include <functional>
#include <vector>

#include "sasaki/linalg.hpp"

namespace sasaki {

using StateFn = std::function<Vec(const Vec&)>;
using JetStateFn = std::function<JetVector(std::span<const Jet>)>;

inline Vec rk4_step(const StateFn& f, const Vec& y, double h) {
  const Vec k1 = f(y);
  const Vec k2 = f(y + 0.5 * h * k1);
  const Vec k3 = f(y + 0.5 * h * k2);
  const Vec k4 = f(y + h * k3);
  return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Integrates over `length` in `steps` equal steps; `after_step` may project
/// the state (frame re-orthonormalization) and is also called on the start.
inline Vec rk4_integrate(const StateFn& f, Vec y, double length, int steps,
                         const std::function<void(Vec&)>& after_step = {}) {
  if (steps <= 0) return y;
  const double h = length / steps;
  for (int i = 0; i < steps; ++i) {
    y = rk4_step(f, y, h);
    if (after_step) after_step(y);
  }
  return y;
}

/// Wraps a jet vector field as a numeric one (dim-0 jets).
inline StateFn numeric_field(const JetStateFn& F) {
  return [F](const Vec& y) { return values(F(constant_jets(y))); };
}

/// Fornberg weights for derivatives 0..m at x0 on the given nodes.
/// Returns w[k][j] for derivative k at node j.
inline std::vector<std::vector<double>> fd_weights(double x0, const std::vector<double>& nodes, int m) {
  const int n = static_cast<int>(nodes.size()) - 1;
  std::vector<std::vector<double>> c(static_cast<std::size_t>(m + 1), std::vector<double>(nodes.size(), 0.0));
  double c1 = 1.0, c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

/// First-derivative weights of the centered stencil with `halfwidth` points
/// on each side and unit spacing.
inline std::vector<double> central_first_derivative(int halfwidth) {
  std::vector<double> nodes;
  for (int k = -halfwidth; k <= halfwidth; ++k) nodes.push_back(k);
  return fd_weights(0.0, nodes, 1)[1];
}

/// Taylor jets in (s, t) at the expansion point of the state S with
/// dS/ds = A(S), dS/dt = B(S), S(0,0) = S0, for commuting A and B.
/// Uses Picard iteration on jets: first along t, then along s.
inline JetVector commuting_flow_jets(const JetStateFn& A, const JetStateFn& B, const Vec& S0,
                                     int order = kMaxJetOrder) {
  const std::size_t n = static_cast<std::size_t>(S0.size());
  JetVector init(n);
  for (std::size_t i = 0; i < n; ++i) init[i] = Jet::zero(2, kMaxJetOrder) + S0[static_cast<Eigen::Index>(i)];
  // t-line through the expansion point
  JetVector T(n);
  for (std::size_t i = 0; i < n; ++i) T[i] = init[i].truncated(0);
  for (int it = 0; it < order; ++it) {
    const JetVector rate = B(truncated(T, it));
    for (std::size_t i = 0; i < n; ++i) T[i] = antiderivative(rate[i].truncated(it), 1, init[i]).truncated(it + 1);
  }
  JetVector S = T;
  for (int it = 0; it < order; ++it) {
    const JetVector rate = A(truncated(S, it));
    for (std::size_t i = 0; i < n; ++i) S[i] = antiderivative(rate[i].truncated(it), 0, T[i]).truncated(it + 1);
  }
  return S;
}

/// Lie bracket [A, B](S) = DB(S)[A(S)] - DA(S)[B(S)] via one-variable jets.
inline Vec lie_bracket(const JetStateFn& A, const JetStateFn& B, const Vec& S) {
  const Vec a = values(A(constant_jets(S)));
  const Vec b = values(B(constant_jets(S)));
  auto directional = [&](const JetStateFn& F, const Vec& dir) {
    JetVector x(static_cast<std::size_t>(S.size()));
    const Jet e = Jet::variable(0.0, 1, 0, 1);
    for (Eigen::Index i = 0; i < S.size(); ++i) x[static_cast<std::size_t>(i)] = S[i] + dir[i] * e;
    const JetVector y = F(x);
    Vec d(static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < y.size(); ++i) d[static_cast<Eigen::Index>(i)] = y[i].d1(0);
    return d;
  };
  return directional(B, a) - directional(A, b);
}

}  // namespace sasaki
