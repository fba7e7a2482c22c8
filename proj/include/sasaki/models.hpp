#pragma once
/// @file models.hpp
/// Coordinate models of the Sasakian space forms and their Kähler bases.
///
/// standard/deformed sphere: stereographic chart of S^{2n+1} in C^{n+1}
///   (pole at the last ambient coordinate), xi_0 = -J z.
/// heisenberg: (x^1..x^n, y^1..y^n, z), xi = 2 d/dz.
/// ball_times_line: (x, y, t) on B^{2n} x R with the Bergman-type metric of
///   holomorphic curvature k and eta = omega + dt.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sasaki/riemann.hpp"

namespace sasaki {

enum class ModelKind { standard_sphere, deformed_sphere, heisenberg, ball_times_line, euclidean };

inline std::string kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::standard_sphere: return "standard_sphere";
    case ModelKind::deformed_sphere: return "deformed_sphere";
    case ModelKind::heisenberg: return "heisenberg";
    case ModelKind::ball_times_line: return "ball_times_line";
    case ModelKind::euclidean: return "euclidean";
  }
  return "unknown";
}

inline ModelKind parse_model_kind(const std::string& s) {
  for (auto k : {ModelKind::standard_sphere, ModelKind::deformed_sphere, ModelKind::heisenberg,
                 ModelKind::ball_times_line, ModelKind::euclidean})
    if (kind_name(k) == s) return k;
  throw ParameterError("unknown model kind '" + s + "'");
}

struct ModelParams {
  double a = 1.0;   ///< deformed_sphere
  double k = -4.0;  ///< ball_times_line
  /// Adds perturbation * exp(-|x|^2) * I to the metric (detector runs only).
  double perturbation = 0.0;
};

/// A Kähler chart with constant complex structure J in its coordinates.
struct KahlerChart {
  MetricChart chart;
  Mat J;
  /// Primitive of the fundamental form, when the model supplies one.
  VectorFieldFn omega;
  double holomorphic_curvature = 0.0;
};

struct ModelSpace {
  ModelKind kind = ModelKind::euclidean;
  int n = 1;
  double c = 0.0;
  double deform_a = 1.0;
  double k = 0.0;
  double perturbation = 0.0;
  MetricChart chart;
  MatrixFieldFn phi_fn;
  VectorFieldFn xi_fn;
  VectorFieldFn eta_fn;
  Box sample_box;

  int dim() const { return chart.dim; }
  std::string name() const { return kind_name(kind); }

  Mat metric(const Vec& p) const { return chart.metric_at(p); }
  Mat phi(const Vec& p) const {
    chart.require_inside(p);
    return values(phi_fn(constant_jets(p)));
  }
  Vec xi(const Vec& p) const {
    chart.require_inside(p);
    return values(xi_fn(constant_jets(p)));
  }
  Vec eta(const Vec& p) const {
    chart.require_inside(p);
    return values(eta_fn(constant_jets(p)));
  }
};

namespace detail {

inline Jet norm_sq(std::span<const Jet> x) {
  Jet s(0.0);
  for (const auto& xi : x) s += xi * xi;
  return s;
}

/// Multiplies by i on C^m with real coordinates ordered (re_0, im_0, re_1, im_1, ...).
inline JetVector mult_i_pairs(std::span<const Jet> v) {
  JetVector out(v.size());
  for (std::size_t k = 0; k + 1 < v.size(); k += 2) {
    out[k] = -v[k + 1];
    out[k + 1] = v[k];
  }
  return out;
}

struct SphereFrame {
  JetVector F;                 // ambient point, size d+1
  std::vector<JetVector> dF;   // dF[i] ambient vector d_i F
  Jet lambda_sq;               // |d_i F|^2
  JetVector eta0;              // eta_0 components
};

inline SphereFrame sphere_frame(std::span<const Jet> x) {
  const int d = static_cast<int>(x.size());
  SphereFrame S;
  const Jet r2 = norm_sq(x);
  const Jet inv_s = 1.0 / (1.0 + r2);
  const Jet inv_s2 = inv_s * inv_s;
  S.F.resize(static_cast<std::size_t>(d + 1));
  for (int a = 0; a < d; ++a) S.F[a] = 2.0 * x[a] * inv_s;
  S.F[d] = (r2 - 1.0) * inv_s;
  S.dF.assign(static_cast<std::size_t>(d), JetVector(static_cast<std::size_t>(d + 1)));
  for (int i = 0; i < d; ++i) {
    for (int a = 0; a < d; ++a) {
      Jet v = -4.0 * x[a] * x[i] * inv_s2;
      if (a == i) v += 2.0 * inv_s;
      S.dF[i][a] = v;
    }
    S.dF[i][d] = 4.0 * x[i] * inv_s2;
  }
  S.lambda_sq = 4.0 * inv_s2;
  JetVector xi0(static_cast<std::size_t>(d + 1));
  for (int k = 0; k + 1 <= d; k += 2) {
    xi0[k] = S.F[k + 1];
    xi0[k + 1] = -S.F[k];
  }
  S.eta0.resize(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) S.eta0[i] = dot(S.dF[i], xi0);
  return S;
}

inline JetMatrix bump(std::span<const Jet> x, double eps) {
  const int d = static_cast<int>(x.size());
  JetMatrix m(d, d);
  const Jet b = eps * exp(-norm_sq(x));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = i == j ? b : Jet(0.0);
  return m;
}

inline void add_to(JetMatrix& a, const JetMatrix& b) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) a(i, j) += b(i, j);
}

/// Real metric of a Hermitian matrix h = re + i im on C^n, coordinates (x, y).
inline JetMatrix hermitian_to_real(const JetMatrix& re, const JetMatrix& im) {
  const int n = re.rows();
  JetMatrix G(2 * n, 2 * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      G(j, k) = re(j, k);
      G(n + j, n + k) = re(j, k);
      G(j, n + k) = im(j, k);
      G(n + j, k) = -im(j, k);
    }
  return G;
}

/// Scaled Fubini-Study (sign = +1) or Bergman (sign = -1) metric on the
/// affine chart w = x + i y of C^n: scale ((1 + sign r^2) delta - sign conj(w_j) w_k)/(1 + sign r^2)^2.
inline JetMatrix projective_metric(std::span<const Jet> xy, double scale, double sign) {
  const int n = static_cast<int>(xy.size()) / 2;
  const Jet r2 = norm_sq(xy);
  const Jet D = 1.0 + sign * r2;
  const Jet f = scale / (D * D);
  JetMatrix re(n, n), im(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const Jet& xj = xy[j];
      const Jet& yj = xy[n + j];
      const Jet& xk = xy[k];
      const Jet& yk = xy[n + k];
      Jet r = -sign * (xj * xk + yj * yk);
      if (j == k) r += D;
      re(j, k) = f * r;
      im(j, k) = f * (-sign) * (xj * yk - yj * xk);
    }
  return hermitian_to_real(re, im);
}

inline Mat complex_structure(int n, bool multiply_by_i) {
  Mat J = Mat::Zero(2 * n, 2 * n);
  const double s = multiply_by_i ? 1.0 : -1.0;
  for (int j = 0; j < n; ++j) {
    J(n + j, j) = s;   // J d/dx_j = s d/dy_j
    J(j, n + j) = -s;  // J d/dy_j = -s d/dx_j
  }
  return J;
}

}  // namespace detail

/// CP^n affine chart with Fubini-Study metric of holomorphic curvature 4/scale.
inline KahlerChart fubini_study_chart(int n, double scale) {
  KahlerChart K;
  K.chart.dim = 2 * n;
  K.chart.metric = [scale](std::span<const Jet> w) { return detail::projective_metric(w, scale, 1.0); };
  K.chart.domain = Box::cube(2 * n, 50.0);
  K.J = detail::complex_structure(n, true);
  K.holomorphic_curvature = 4.0 / scale;
  return K;
}

/// Unit ball of C^n with the Bergman-type metric of holomorphic curvature -4/scale
/// and the primitive omega = scale/(1-r^2) sum (x dy - y dx).
inline KahlerChart complex_hyperbolic_chart(int n, double scale) {
  KahlerChart K;
  K.chart.dim = 2 * n;
  K.chart.metric = [scale](std::span<const Jet> w) { return detail::projective_metric(w, scale, -1.0); };
  K.chart.domain = Box::cube(2 * n, 1.0);
  K.chart.inside = [](const Vec& p) { return p.squaredNorm() < 1.0; };
  K.J = detail::complex_structure(n, false);
  K.omega = [scale, n](std::span<const Jet> w) {
    const Jet f = scale / (1.0 - detail::norm_sq(w));
    JetVector om(static_cast<std::size_t>(2 * n));
    for (int j = 0; j < n; ++j) {
      om[j] = -f * w[n + j];
      om[n + j] = f * w[j];
    }
    return om;
  };
  K.holomorphic_curvature = -4.0 / scale;
  return K;
}

/// Flat C^n with metric scale * delta (the Heisenberg base uses 1/4).
inline KahlerChart flat_kahler_chart(int n, double scale) {
  KahlerChart K;
  K.chart.dim = 2 * n;
  K.chart.metric = [scale, n](std::span<const Jet>) {
    JetMatrix g(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
      for (int j = 0; j < 2 * n; ++j) g(i, j) = Jet(i == j ? scale : 0.0);
    return g;
  };
  K.chart.domain = Box::cube(2 * n, 1e3);
  K.J = detail::complex_structure(n, false);
  K.omega = [n](std::span<const Jet> w) {
    JetVector om(static_cast<std::size_t>(2 * n));
    for (int j = 0; j < n; ++j) {
      om[j] = -0.5 * w[n + j];
      om[n + j] = Jet(0.0);
    }
    return om;
  };
  K.holomorphic_curvature = 0.0;
  return K;
}

namespace detail {

inline ModelSpace make_sphere(int n, double a) {
  ModelSpace m;
  m.n = n;
  m.deform_a = a;
  m.c = 4.0 / a - 3.0;
  const int d = 2 * n + 1;
  m.chart.dim = d;
  m.chart.domain = Box::cube(d, 50.0);
  m.chart.metric = [a, d](std::span<const Jet> x) {
    const SphereFrame S = sphere_frame(x);
    JetMatrix g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        Jet v = a * (a - 1.0) * S.eta0[i] * S.eta0[j];
        if (i == j) v += a * S.lambda_sq;
        g(i, j) = v;
        g(j, i) = v;
      }
    return g;
  };
  m.phi_fn = [d](std::span<const Jet> x) {
    const SphereFrame S = sphere_frame(x);
    const Jet inv = 1.0 / S.lambda_sq;
    JetMatrix phi(d, d);
    for (int i = 0; i < d; ++i) {
      const JetVector Jd = mult_i_pairs(S.dF[i]);
      for (int j = 0; j < d; ++j) phi(j, i) = dot(S.dF[j], Jd) * inv;
    }
    return phi;
  };
  m.xi_fn = [a, d](std::span<const Jet> x) {
    const SphereFrame S = sphere_frame(x);
    const Jet inv = 1.0 / (a * S.lambda_sq);
    JetVector xi(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) xi[i] = S.eta0[i] * inv;
    return xi;
  };
  m.eta_fn = [a](std::span<const Jet> x) { return scale(Jet(a), sphere_frame(x).eta0); };
  m.sample_box = Box::cube(d, 1.0);
  return m;
}

inline ModelSpace make_heisenberg(int n) {
  ModelSpace m;
  m.n = n;
  m.c = -3.0;
  const int d = 2 * n + 1;
  m.chart.dim = d;
  m.chart.domain = Box::cube(d, 1e3);
  auto eta = [n, d](std::span<const Jet> x) {
    JetVector e(static_cast<std::size_t>(d), Jet(0.0));
    for (int j = 0; j < n; ++j) e[j] = -0.5 * x[n + j];
    e[2 * n] = Jet(0.5);
    return e;
  };
  m.eta_fn = eta;
  m.chart.metric = [eta, d, n](std::span<const Jet> x) {
    const JetVector e = eta(x);
    JetMatrix g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        Jet v = e[i] * e[j];
        if (i == j && i < 2 * n) v += 0.25;
        g(i, j) = v;
        g(j, i) = v;
      }
    return g;
  };
  m.xi_fn = [d](std::span<const Jet>) {
    JetVector xi(static_cast<std::size_t>(d), Jet(0.0));
    xi[d - 1] = Jet(2.0);
    return xi;
  };
  m.phi_fn = [n, d](std::span<const Jet> x) {
    JetMatrix phi(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) phi(i, j) = Jet(0.0);
    for (int j = 0; j < n; ++j) {
      phi(n + j, j) = Jet(-1.0);  // phi d/dx_j = -d/dy_j
      phi(j, n + j) = Jet(1.0);   // phi d/dy_j = d/dx_j + y_j d/dz
      phi(2 * n, n + j) = x[n + j];
    }
    return phi;
  };
  m.sample_box = Box::cube(d, 1.0);
  return m;
}

inline ModelSpace make_ball(int n, double k) {
  ModelSpace m;
  m.n = n;
  m.k = k;
  m.c = k - 3.0;
  const int d = 2 * n + 1;
  const KahlerChart base = complex_hyperbolic_chart(n, -4.0 / k);
  m.chart.dim = d;
  Vec lo = Vec::Constant(d, -1.0), hi = Vec::Constant(d, 1.0);
  lo[d - 1] = -1e3;
  hi[d - 1] = 1e3;
  m.chart.domain = {lo, hi};
  m.chart.inside = [n](const Vec& p) { return p.head(2 * n).squaredNorm() < 1.0; };
  auto eta = [base, d](std::span<const Jet> x) {
    const JetVector om = base.omega(x.first(static_cast<std::size_t>(d - 1)));
    JetVector e(om.begin(), om.end());
    e.push_back(Jet(1.0));
    return e;
  };
  m.eta_fn = eta;
  m.chart.metric = [base, eta, d](std::span<const Jet> x) {
    const JetMatrix G = base.chart.metric(x.first(static_cast<std::size_t>(d - 1)));
    const JetVector e = eta(x);
    JetMatrix g(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        Jet v = e[i] * e[j];
        if (i < d - 1 && j < d - 1) v += G(i, j);
        g(i, j) = v;
        g(j, i) = v;
      }
    return g;
  };
  m.xi_fn = [d](std::span<const Jet>) {
    JetVector xi(static_cast<std::size_t>(d), Jet(0.0));
    xi[d - 1] = Jet(1.0);
    return xi;
  };
  // phi(U_B, U_t) = (J U_B, -omega(J U_B))
  m.phi_fn = [base, d](std::span<const Jet> x) {
    const JetVector om = base.omega(x.first(static_cast<std::size_t>(d - 1)));
    JetMatrix phi(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) phi(i, j) = Jet(0.0);
    for (int col = 0; col < d - 1; ++col) {
      Jet w(0.0);
      for (int row = 0; row < d - 1; ++row) {
        phi(row, col) = Jet(base.J(row, col));
        if (base.J(row, col) != 0.0) w += base.J(row, col) * om[row];
      }
      phi(d - 1, col) = -w;
    }
    return phi;
  };
  Vec slo = Vec::Constant(d, -0.3), shi = Vec::Constant(d, 0.3);
  slo[d - 1] = -1.0;
  shi[d - 1] = 1.0;
  m.sample_box = {slo, shi};
  return m;
}

inline ModelSpace make_euclidean(int dim) {
  ModelSpace m;
  m.kind = ModelKind::euclidean;
  m.n = (dim - 1) / 2;
  m.c = 0.0;
  m.chart.dim = dim;
  m.chart.domain = Box::cube(dim, 1e3);
  m.chart.metric = [dim](std::span<const Jet>) { return identity_jets(dim); };
  m.phi_fn = [dim](std::span<const Jet>) {
    JetMatrix z(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) z(i, j) = Jet(0.0);
    return z;
  };
  m.xi_fn = [dim](std::span<const Jet>) { return JetVector(static_cast<std::size_t>(dim), Jet(0.0)); };
  m.eta_fn = m.xi_fn;
  m.sample_box = Box::cube(dim, 1.0);
  return m;
}

}  // namespace detail

/// Builds a model. For euclidean (a flat test fixture with zero structure
/// tensors) n is the chart dimension itself.
inline ModelSpace make_model(ModelKind kind, int n, const ModelParams& params = {}) {
  if (n < 1) throw ParameterError("n must be >= 1");
  if (2 * n + 1 > kMaxJetDim) throw ParameterError("n too large for the jet layer");
  ModelSpace m;
  switch (kind) {
    case ModelKind::standard_sphere:
      m = detail::make_sphere(n, 1.0);
      break;
    case ModelKind::deformed_sphere:
      if (!(params.a > 0.0)) throw ParameterError("deformed_sphere requires a > 0");
      m = detail::make_sphere(n, params.a);
      break;
    case ModelKind::heisenberg:
      m = detail::make_heisenberg(n);
      break;
    case ModelKind::ball_times_line:
      if (!(params.k < 0.0)) throw ParameterError("ball_times_line requires k < 0");
      m = detail::make_ball(n, params.k);
      break;
    case ModelKind::euclidean:
      return detail::make_euclidean(n);
  }
  m.kind = kind;
  if (params.perturbation != 0.0) {
    m.perturbation = params.perturbation;
    auto base = m.chart.metric;
    const double eps = params.perturbation;
    m.chart.metric = [base, eps](std::span<const Jet> x) {
      JetMatrix g = base(x);
      detail::add_to(g, detail::bump(x, eps));
      return g;
    };
  }
  return m;
}

inline ModelSpace make_sphere(int n, double a = 1.0) {
  return make_model(a == 1.0 ? ModelKind::standard_sphere : ModelKind::deformed_sphere, n, ModelParams{.a = a});
}
inline ModelSpace make_heisenberg(int n) { return make_model(ModelKind::heisenberg, n); }
inline ModelSpace make_ball(int n, double k) { return make_model(ModelKind::ball_times_line, n, ModelParams{.k = k}); }

inline std::vector<Vec> sample_points(const Box& box, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) {
    Vec p(box.lo.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * u(rng);
    pts.push_back(p);
  }
  return pts;
}

inline std::vector<Vec> sample_points(const ModelSpace& m, int count, std::uint64_t seed) {
  return sample_points(m.sample_box, count, seed);
}

}  // namespace sasaki
