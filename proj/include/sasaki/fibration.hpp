#pragma once
/// @file fibration.hpp
/// The projection pi: N -> N/xi for the model families, horizontal lifts,
/// O'Neill's formula, complex torsions and Hopf cylinders pi^{-1}(gamma).

#include "sasaki/surface.hpp"

namespace sasaki {

struct FibrationData {
  ModelSpace model;
  KahlerChart base;
  VectorFieldFn project_fn;  ///< chart point jets -> base point jets

  int base_dim() const { return base.chart.dim; }
  Vec project(const Vec& p) const {
    model.chart.require_inside(p);
    Vec b = values(project_fn(constant_jets(p)));
    if (!base.chart.contains(b)) throw DomainError("projection leaves the base chart at " + format_point(p));
    return b;
  }
  /// d pi at p (base_dim x dim)
  Mat differential(const Vec& p) const {
    model.chart.require_inside(p);
    const JetVector y = project_fn(seed_at(p, 1));
    Mat D(base_dim(), model.dim());
    for (int r = 0; r < base_dim(); ++r)
      for (int i = 0; i < model.dim(); ++i) D(r, i) = y[static_cast<std::size_t>(r)].d1(i);
    return D;
  }
  const Mat& J() const { return base.J; }
};

inline FibrationData make_fibration(const ModelSpace& m) {
  FibrationData F;
  F.model = m;
  const int n = m.n;
  switch (m.kind) {
    case ModelKind::standard_sphere:
    case ModelKind::deformed_sphere: {
      F.base = fubini_study_chart(n, m.deform_a);
      // w_j = z_j / z_n with z the ambient point of the stereographic chart
      F.project_fn = [n](std::span<const Jet> x) {
        const detail::SphereFrame S = detail::sphere_frame(x);
        const Jet& an = S.F[static_cast<std::size_t>(2 * n)];
        const Jet& bn = S.F[static_cast<std::size_t>(2 * n + 1)];
        const Jet inv = 1.0 / (an * an + bn * bn);
        JetVector w(static_cast<std::size_t>(2 * n));
        for (int j = 0; j < n; ++j) {
          const Jet& a = S.F[static_cast<std::size_t>(2 * j)];
          const Jet& b = S.F[static_cast<std::size_t>(2 * j + 1)];
          w[static_cast<std::size_t>(j)] = (a * an + b * bn) * inv;
          w[static_cast<std::size_t>(n + j)] = (b * an - a * bn) * inv;
        }
        return w;
      };
      break;
    }
    case ModelKind::heisenberg:
      F.base = flat_kahler_chart(n, 0.25);
      F.project_fn = [n](std::span<const Jet> x) { return JetVector(x.begin(), x.begin() + 2 * n); };
      break;
    case ModelKind::ball_times_line:
      F.base = complex_hyperbolic_chart(n, -4.0 / m.k);
      F.project_fn = [n](std::span<const Jet> x) { return JetVector(x.begin(), x.begin() + 2 * n); };
      break;
    case ModelKind::euclidean:
      throw UnsupportedError("no fibration for the euclidean fixture");
  }
  return F;
}

/// Jacobian of f along the jet point x; entries have the order of x.
inline JetMatrix jacobian_along(const VectorFieldFn& f, int out_dim, std::span<const Jet> x) {
  int q = 0;
  for (const auto& c : x)
    if (!c.is_constant()) q = std::max(q, c.order());
  const int d = static_cast<int>(x.size());
  const JetVector y = f(seed_at(values(x), q + 1));
  JetMatrix D(out_dim, d);
  for (int r = 0; r < out_dim; ++r)
    for (int i = 0; i < d; ++i) {
      const Jet e = y[static_cast<std::size_t>(r)].partial(i);
      D(r, i) = q == 0 ? Jet(e.value()) : compose(e, x);
    }
  return D;
}

/// Horizontal lift of the base vector X at the total point p (jets).
inline JetVector horizontal_lift_along(const FibrationData& F, std::span<const Jet> x, std::span<const Jet> X) {
  const int d = F.model.dim(), b = F.base_dim();
  const JetMatrix D = jacobian_along(F.project_fn, b, x);
  const JetVector eta = F.model.eta_fn(x);
  JetMatrix A(d, d);
  JetVector rhs(static_cast<std::size_t>(d));
  for (int r = 0; r < b; ++r) {
    for (int i = 0; i < d; ++i) A(r, i) = D(r, i);
    rhs[static_cast<std::size_t>(r)] = X[static_cast<std::size_t>(r)];
  }
  for (int i = 0; i < d; ++i) A(d - 1, i) = eta[static_cast<std::size_t>(i)];
  rhs[static_cast<std::size_t>(d - 1)] = Jet(0.0);
  return solve(A, rhs);
}

/// Horizontal lift X^H at p of the base vector X attached at base_point.
inline Vec horizontal_lift(const FibrationData& F, const Vec& base_point, const Vec& X, const Vec& p) {
  const Vec b = F.project(p);
  if ((b - base_point).norm() > 1e-9 * std::max(1.0, base_point.norm()))
    throw PreconditionError("horizontal_lift: point does not lie over the base point");
  if (X.size() != F.base_dim()) throw DimensionError("horizontal_lift: base vector has the wrong dimension");
  return values(horizontal_lift_along(F, constant_jets(p), constant_jets(X)));
}

struct SubmersionResiduals {
  double isometry = 0.0;       ///< |<dpi U, dpi V>_base - <U, V>| on horizontal U, V
  double verticality = 0.0;    ///< |dpi xi|
  double complex = 0.0;        ///< |dpi phi U - J dpi U|
  double J_squared = 0.0;      ///< |J^2 + I|
  double J_orthogonal = 0.0;   ///< |J^T g J - g| on the base
};

inline SubmersionResiduals submersion_residuals(const FibrationData& F, const Vec& p) {
  SubmersionResiduals r;
  const int d = F.model.dim(), b = F.base_dim();
  const Mat D = F.differential(p);
  const Mat g = F.model.metric(p);
  const Vec bp = F.project(p);
  const Mat gb = F.base.chart.metric_at(bp);
  const Vec xi = F.model.xi(p);
  const Mat phi = F.model.phi(p);
  r.verticality = (D * xi).cwiseAbs().maxCoeff();
  Mat H(d, b);
  for (int k = 0; k < b; ++k) H.col(k) = horizontal_lift(F, bp, Vec::Unit(b, k), p);
  const Mat up = H.transpose() * g * H;
  r.isometry = max_abs(Mat(up - gb));
  r.complex = max_abs(Mat(D * phi * H - F.J() * D * H));
  r.J_squared = max_abs(Mat(F.J() * F.J() + Mat::Identity(b, b)));
  r.J_orthogonal = max_abs(Mat(F.J().transpose() * gb * F.J() - gb));
  return r;
}

struct ONeillResult {
  double residual = 0.0;           ///< total-metric norm of the O'Neill defect
  double vertical = 0.0;           ///< eta(nabla_{X^H} Y^H)
  double expected_vertical = 0.0;  ///< -<X^H, phi Y^H>
};

/// nabla^N_{X^H} Y^H - (nabla_X Y)^H + <X^H, phi Y^H> xi at p.
inline ONeillResult oneill_residual(const FibrationData& F, const VectorFieldFn& X, const VectorFieldFn& Y,
                                    const Vec& p) {
  const Vec bp = F.project(p);
  const Vec Xb = values(X(constant_jets(bp)));
  const Vec XH = horizontal_lift(F, bp, Xb, p);
  // Y^H as a field on the total space
  const VectorFieldFn YH = [&F, &Y](std::span<const Jet> x) {
    const JetVector b = F.project_fn(x);
    return horizontal_lift_along(F, x, Y(b));
  };
  const Vec lhs = covariant_derivative(F.model.chart, p, XH, YH);
  const Vec base_cov = covariant_derivative(F.base.chart, bp, Xb, Y);
  const Vec rhs_h = horizontal_lift(F, bp, base_cov, p);
  const Mat g = F.model.metric(p);
  const Vec YHp = values(YH(constant_jets(p)));
  const double pair = XH.dot(g * (F.model.phi(p) * YHp));
  const Vec defect = lhs - rhs_h + pair * F.model.xi(p);
  ONeillResult r;
  r.residual = std::sqrt(std::max(0.0, defect.dot(g * defect)));
  r.vertical = F.model.eta(p).dot(lhs);
  r.expected_vertical = -pair;
  return r;
}

inline VectorFieldFn constant_field(const Vec& v) {
  return [v](std::span<const Jet>) { return constant_jets(v); };
}

struct TorsionTable {
  Mat tau;               ///< mean of <E_i, J E_j> over samples
  double spread = 0.0;   ///< max over entries of max - min
  CurveSample base;      ///< Frenet apparatus of the projected curve
};

/// Complex torsions of the projection of a total-space curve sampled at
/// spacing ds (the projection of a Legendre curve is unit speed).
inline TorsionTable complex_torsions(const std::vector<Vec>& positions, double ds, const FibrationData& F,
                                     const FrenetOptions& opt = {}) {
  std::vector<Vec> down;
  down.reserve(positions.size());
  for (const auto& p : positions) down.push_back(F.project(p));
  TorsionTable T;
  T.base = frenet_apparatus(F.base.chart, down, ds, opt);
  const int r = T.base.osculating_order;
  Mat lo = Mat::Constant(r, r, 1e300), hi = Mat::Constant(r, r, -1e300), sum = Mat::Zero(r, r);
  for (std::size_t i = 0; i < T.base.size(); ++i) {
    const Mat g = F.base.chart.metric_at(T.base.positions[i]);
    const Mat& E = T.base.frames[i];
    const Mat t = E.transpose() * g * F.J() * E;
    lo = lo.cwiseMin(t);
    hi = hi.cwiseMax(t);
    sum += t;
  }
  T.tau = sum / static_cast<double>(T.base.size());
  T.spread = max_abs(Mat(hi - lo));
  return T;
}

inline TorsionTable complex_torsions(const CurveSample& curve, const FibrationData& F, const FrenetOptions& opt = {}) {
  if (curve.size() < 2) throw PreconditionError("complex_torsions: curve too short");
  return complex_torsions(curve.positions, curve.s[1] - curve.s[0], F, opt);
}

/// Base curve for a Hopf cylinder: curvature kappa(s) (jet-valued so the
/// surface stays jet-differentiable) and the complex torsion
/// tau_12 = <E_1, J E_2> of the initial frame: E_2 = -tau J E_1 for
/// tau = +-1, E_2 orthogonal to E_1 and J E_1 for tau = 0 (needs complex
/// dimension >= 2).
struct BaseCurve {
  std::function<Jet(const Jet&)> kappa;
  int tau = 1;
  bool constant = true;

  static BaseCurve circle(double k, int tau) {
    BaseCurve c;
    c.kappa = [k](const Jet&) { return Jet(k); };
    c.tau = tau;
    return c;
  }
  static BaseCurve varying(double k0, double amplitude, int tau) {
    BaseCurve c;
    c.kappa = [k0, amplitude](const Jet& s) { return k0 + amplitude * sin(s); };
    c.tau = tau;
    c.constant = amplitude == 0.0;
    return c;
  }
};

/// Commuting flows for pi^{-1}(gamma): state (p, b, E1, E2, s); d/du moves
/// along the horizontal lift of the base Frenet curve, d/dv along xi.
inline FlowSystem hopf_cylinder_system(const FibrationData& F, const BaseCurve& curve, const Vec& p0, double s0) {
  const int d = F.model.dim(), b = F.base_dim();
  if (curve.tau != 0 && curve.tau != 1 && curve.tau != -1) throw ParameterError("tau must be -1, 0 or 1");
  if (curve.tau == 0 && F.model.n < 2) throw PreconditionError("tau = 0 needs n >= 2");
  const Vec b0 = F.project(p0);
  const Mat gb = F.base.chart.metric_at(b0);
  Vec e1 = Vec::Unit(b, 0);
  e1 /= std::sqrt(e1.dot(gb * e1));
  Vec e2;
  if (curve.tau != 0) {
    e2 = -curve.tau * (F.J() * e1);
  } else {
    Mat C(b, 3);
    C.col(0) = e1;
    C.col(1) = F.J() * e1;
    C.col(2) = Vec::Unit(b, 1);
    e2 = gram_schmidt(C, gb).col(2);
  }
  FlowSystem sys;
  sys.point_dim = d;
  sys.start = Vec(d + 3 * b + 1);
  sys.start << p0, b0, e1, e2, s0;
  sys.u0 = s0;
  const auto Fp = std::make_shared<FibrationData>(F);
  const auto kappa = curve.kappa;
  sys.A = [Fp, kappa, d, b](std::span<const Jet> S) {
    const auto p = S.subspan(0, static_cast<std::size_t>(d));
    const auto bb = S.subspan(static_cast<std::size_t>(d), static_cast<std::size_t>(b));
    const auto E1 = S.subspan(static_cast<std::size_t>(d + b), static_cast<std::size_t>(b));
    const auto E2 = S.subspan(static_cast<std::size_t>(d + 2 * b), static_cast<std::size_t>(b));
    const Jet k = kappa(S[static_cast<std::size_t>(d + 3 * b)]);
    const JetVector gam = christoffel_along(Fp->base.chart, bb);
    const JetVector g11 = contract_gamma(gam, E1, E1), g12 = contract_gamma(gam, E1, E2);
    JetVector out = horizontal_lift_along(*Fp, p, E1);
    out.insert(out.end(), E1.begin(), E1.end());
    for (int i = 0; i < b; ++i) out.push_back(k * E2[static_cast<std::size_t>(i)] - g11[static_cast<std::size_t>(i)]);
    for (int i = 0; i < b; ++i) out.push_back(-k * E1[static_cast<std::size_t>(i)] - g12[static_cast<std::size_t>(i)]);
    out.push_back(Jet(1.0));
    return out;
  };
  sys.B = [Fp, d, b](std::span<const Jet> S) {
    JetVector out = Fp->model.xi_fn(S.subspan(0, static_cast<std::size_t>(d)));
    for (int i = 0; i < 3 * b + 1; ++i) out.push_back(Jet(0.0));
    return out;
  };
  return sys;
}

/// Hopf cylinder over the base curve through p0 (default: chart origin),
/// parametrized by base arclength s in [s_lo, s_hi] and fiber time t.
inline SurfacePatch hopf_cylinder(const FibrationData& F, const BaseCurve& curve, double s_lo, double s_hi,
                                  double t_lo, double t_hi, int nu, int nv, int substeps = 4,
                                  std::optional<Vec> p0 = std::nullopt) {
  const Vec start = p0 ? *p0 : Vec(Vec::Zero(F.model.dim()));
  FlowSystem sys = hopf_cylinder_system(F, curve, start, s_lo);
  sys.v0 = t_lo;
  return flow_patch(F.model, sys, parameter_box(s_lo, s_hi, t_lo, t_hi), nu, nv, substeps, "hopf_cylinder");
}

}  // namespace sasaki
