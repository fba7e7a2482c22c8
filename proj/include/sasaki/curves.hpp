#pragma once
/// @file curves.hpp
/// Frenet curves: synthesis from prescribed curvatures (RK4 on the coupled
/// position/frame system) and extraction of the Frenet apparatus from samples.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>

#include "sasaki/flows.hpp"
#include "sasaki/models.hpp"

namespace sasaki {

struct CurveSample {
  std::vector<double> s;
  std::vector<Vec> positions;
  std::vector<Mat> frames;                      ///< columns E_1..E_r
  std::vector<std::vector<double>> curvatures;  ///< kappa_1..kappa_{r-1}
  int osculating_order = 0;
  bool reparametrized = false;
  bool order_truncated = false;
  double speed_deviation = 0.0;

  std::size_t size() const { return positions.size(); }
  /// Max-min spread of kappa_i over the samples.
  double curvature_spread(int i) const {
    double lo = 1e300, hi = -1e300;
    for (const auto& k : curvatures) {
      lo = std::min(lo, k[static_cast<std::size_t>(i)]);
      hi = std::max(hi, k[static_cast<std::size_t>(i)]);
    }
    return curvatures.empty() ? 0.0 : hi - lo;
  }
  double mean_curvature(int i) const {
    double s = 0.0;
    for (const auto& k : curvatures) s += k[static_cast<std::size_t>(i)];
    return curvatures.empty() ? 0.0 : s / static_cast<double>(curvatures.size());
  }
};

/// Max |E^T g E - I| over the samples.
inline double frame_orthonormality_residual(const MetricChart& chart, const CurveSample& c) {
  double r = 0.0;
  for (std::size_t i = 0; i < c.frames.size(); ++i) {
    const Mat& E = c.frames[i];
    const Mat G = E.transpose() * chart.metric_at(c.positions[i]) * E;
    r = std::max(r, max_abs(Mat(G - Mat::Identity(G.rows(), G.cols()))));
  }
  return r;
}

using CurvatureFn = std::function<double(double)>;

namespace detail {

inline void orthonormalize_frame(const MetricChart& chart, Vec& y, int d, int r) {
  const Vec x = y.head(d);
  Mat E(d, r);
  for (int i = 0; i < r; ++i) E.col(i) = y.segment(d * (i + 1), d);
  E = gram_schmidt(E, chart.metric_at(x));
  for (int i = 0; i < r; ++i) y.segment(d * (i + 1), d) = E.col(i);
}

}  // namespace detail

/// Integrates the Frenet system with curvature functions kappa_i(s).
/// start_frame has r = curvatures.size() + 1 columns, orthonormal in the metric.
inline CurveSample synthesize_curve(const MetricChart& chart, const Vec& start, const Mat& start_frame,
                                    const std::vector<CurvatureFn>& curvatures, double length, int steps) {
  const int d = chart.dim;
  const int r = static_cast<int>(curvatures.size()) + 1;
  if (start.size() != d || start_frame.rows() != d || start_frame.cols() != r)
    throw DimensionError("synthesize_curve: start frame must be " + std::to_string(d) + "x" + std::to_string(r));
  if (!(length > 0.0)) throw PreconditionError("synthesize_curve: length must be positive");
  if (steps < static_cast<int>(std::ceil(1000.0 * length)))
    throw PreconditionError("synthesize_curve: need at least 1000 steps per unit length");
  chart.require_inside(start);
  const Mat G0 = start_frame.transpose() * chart.metric_at(start) * start_frame;
  if (max_abs(Mat(G0 - Mat::Identity(r, r))) > 1e-8)
    throw PreconditionError("synthesize_curve: start frame is not orthonormal");

  auto rhs = [&](double s, const Vec& y) {
    const Vec x = y.head(d);
    if (!chart.contains(x)) throw DomainError("curve left the chart at " + format_point(x));
    const auto A = evaluate_ambient(chart, x, 0);
    const Vec E1 = y.segment(d, d);
    Vec out(y.size());
    out.head(d) = E1;
    for (int i = 0; i < r; ++i) {
      const Vec Ei = y.segment(d * (i + 1), d);
      Vec v = -A.gamma_apply(E1, Ei);
      if (i > 0) v -= curvatures[static_cast<std::size_t>(i - 1)](s) * y.segment(d * i, d);
      if (i + 1 < r) v += curvatures[static_cast<std::size_t>(i)](s) * y.segment(d * (i + 2), d);
      out.segment(d * (i + 1), d) = v;
    }
    return out;
  };

  Vec y(d * (r + 1));
  y.head(d) = start;
  for (int i = 0; i < r; ++i) y.segment(d * (i + 1), d) = start_frame.col(i);
  const double h = length / steps;
  CurveSample c;
  c.osculating_order = r;
  auto record = [&](double s) {
    c.s.push_back(s);
    c.positions.push_back(y.head(d));
    Mat E(d, r);
    for (int i = 0; i < r; ++i) E.col(i) = y.segment(d * (i + 1), d);
    c.frames.push_back(E);
    std::vector<double> k;
    for (const auto& f : curvatures) k.push_back(f(s));
    c.curvatures.push_back(k);
  };
  record(0.0);
  for (int step = 0; step < steps; ++step) {
    const double s = step * h;
    const Vec k1 = rhs(s, y);
    const Vec k2 = rhs(s + 0.5 * h, y + 0.5 * h * k1);
    const Vec k3 = rhs(s + 0.5 * h, y + 0.5 * h * k2);
    const Vec k4 = rhs(s + h, y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!chart.contains(y.head(d))) throw DomainError("curve left the chart at " + format_point(y.head(d)));
    detail::orthonormalize_frame(chart, y, d, r);
    record(s + h);
  }
  return c;
}

inline CurveSample synthesize_curve(const MetricChart& chart, const Vec& start, const Mat& start_frame,
                                    const std::vector<double>& curvatures, double length, int steps) {
  std::vector<CurvatureFn> fns;
  for (double k : curvatures) {
    if (!(k > 0.0)) throw PreconditionError("synthesize_curve: curvatures must be positive");
    fns.push_back([k](double) { return k; });
  }
  return synthesize_curve(chart, start, start_frame, fns, length, steps);
}

inline CurveSample synthesize_curve(const ModelSpace& m, const Vec& start, const Mat& start_frame,
                                    const std::vector<double>& curvatures, double length, int steps) {
  return synthesize_curve(m.chart, start, start_frame, curvatures, length, steps);
}

struct FrenetOptions {
  int max_derivatives = 5;     ///< covariant derivatives D_1..D_m, giving kappa_1..kappa_{m-1}
  double rank_tol = 1e-6;      ///< relative to kappa_1
  double geodesic_tol = 1e-7;  ///< absolute kappa_1 threshold for order 1
  int halfwidth = 6;
  double spacing = 0.0;        ///< FD spacing; 0 picks it from the number of passes
  double speed_tol = 1e-4;
};

/// Samples of a curve at uniform parameter spacing ds. `known[k][i]` may carry
/// D_{k+1} at sample i (e.g. from jets); the remaining derivatives come from
/// centered differences of the previous one plus the Christoffel term.
struct FrenetInput {
  double ds = 0.0;
  double s0 = 0.0;
  std::vector<Vec> positions;
  std::vector<std::vector<Vec>> known;
};

namespace detail {

struct Derivs {
  std::vector<std::vector<Vec>> D;  // D[k][i]
  std::size_t lo = 0, hi = 0;       // valid index range [lo, hi)
};

inline std::vector<Vec> fd_pass(const std::vector<Vec>& f, std::size_t lo, std::size_t hi, int halfwidth,
                                int stride, double ds, std::size_t& new_lo, std::size_t& new_hi) {
  const auto w = central_first_derivative(halfwidth);
  const std::size_t m = static_cast<std::size_t>(halfwidth * stride);
  std::vector<Vec> out(f.size());
  if (hi < lo + 2 * m + 1) throw PreconditionError("curve too short for the requested derivatives");
  new_lo = lo + m;
  new_hi = hi - m;
  const double h = stride * ds;
  for (std::size_t i = new_lo; i < new_hi; ++i) {
    Vec acc = Vec::Zero(f[i].size());
    for (int k = -halfwidth; k <= halfwidth; ++k)
      acc += w[static_cast<std::size_t>(k + halfwidth)] * f[static_cast<std::size_t>(static_cast<long>(i) + k * stride)];
    out[i] = acc / h;
  }
  return out;
}

}  // namespace detail

/// Frenet frame, curvatures and osculating order of a sampled curve.
inline CurveSample frenet_apparatus(const MetricChart& chart, FrenetInput in, const FrenetOptions& opt = {}) {
  const std::size_t N = in.positions.size();
  if (N == 0 || !(in.ds > 0.0)) throw PreconditionError("frenet_apparatus: empty input or bad spacing");
  const int M = opt.max_derivatives;
  const int q = std::min(static_cast<int>(in.known.size()), M);
  const int passes = M - q;
  const double spacing = opt.spacing > 0.0 ? opt.spacing : (passes > 0 ? 1.5 * std::pow(1e-8, 1.0 / passes) : in.ds);
  const int stride = std::max(1, static_cast<int>(std::lround(spacing / in.ds)));

  CurveSample out;
  std::vector<std::vector<Vec>> D(static_cast<std::size_t>(M));
  std::size_t lo = 0, hi = N;
  for (int k = 0; k < q; ++k) D[static_cast<std::size_t>(k)] = in.known[static_cast<std::size_t>(k)];
  if (q == 0) {
    std::size_t nl, nh;
    D[0] = detail::fd_pass(in.positions, lo, hi, opt.halfwidth, stride, in.ds, nl, nh);
    lo = nl;
    hi = nh;
    double dev = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const Mat g = chart.metric_at(in.positions[i]);
      dev = std::max(dev, std::abs(std::sqrt(D[0][i].dot(g * D[0][i])) - 1.0));
    }
    out.speed_deviation = dev;
    if (dev > opt.speed_tol) {
      // Re-parametrize by arclength with cubic Hermite interpolation and start over.
      std::vector<double> arc(N, 0.0);
      std::vector<double> speed(N, 0.0);
      for (std::size_t i = lo; i < hi; ++i) speed[i] = std::sqrt(D[0][i].dot(chart.metric_at(in.positions[i]) * D[0][i]));
      for (std::size_t i = lo + 1; i < hi; ++i) arc[i] = arc[i - 1] + 0.5 * (speed[i] + speed[i - 1]) * in.ds;
      FrenetInput re;
      re.ds = in.ds;
      re.s0 = 0.0;
      std::size_t j = lo;
      for (double s = 0.0; s <= arc[hi - 1]; s += in.ds) {
        while (j + 2 < hi && arc[j + 1] < s) ++j;
        const double h = arc[j + 1] - arc[j];
        const double t = (s - arc[j]) / h;
        const double h00 = 2 * t * t * t - 3 * t * t + 1, h10 = t * t * t - 2 * t * t + t;
        const double h01 = -2 * t * t * t + 3 * t * t, h11 = t * t * t - t * t;
        const Vec m0 = D[0][j] / speed[j] * h, m1 = D[0][j + 1] / speed[j + 1] * h;
        re.positions.push_back(h00 * in.positions[j] + h10 * m0 + h01 * in.positions[j + 1] + h11 * m1);
      }
      auto c = frenet_apparatus(chart, re, opt);
      c.reparametrized = true;
      c.speed_deviation = dev;
      return c;
    }
  }
  for (int k = std::max(q, 1); k < M; ++k) {
    std::size_t nl, nh;
    auto d = detail::fd_pass(D[static_cast<std::size_t>(k - 1)], lo, hi, opt.halfwidth, stride, in.ds, nl, nh);
    for (std::size_t i = nl; i < nh; ++i) {
      const auto A = evaluate_ambient(chart, in.positions[i], 0);
      d[i] += A.gamma_apply(D[0][i], D[static_cast<std::size_t>(k - 1)][i]);
    }
    D[static_cast<std::size_t>(k)] = std::move(d);
    lo = nl;
    hi = nh;
  }

  // Gram-Schmidt per sample; c_kk = kappa_1 ... kappa_{k-1}.
  std::map<int, int> votes;
  struct PerSample {
    Mat E;
    std::vector<double> kappa;
    int order;
  };
  std::vector<PerSample> per;
  for (std::size_t i = lo; i < hi; ++i) {
    const Mat g = chart.metric_at(in.positions[i]);
    const int d = chart.dim;
    Mat E(d, M);
    std::vector<double> diag;
    int rank = 0;
    for (int k = 0; k < M; ++k) {
      Vec v = D[static_cast<std::size_t>(k)][i];
      for (int pass = 0; pass < 2; ++pass)
        for (int j = 0; j < rank; ++j) v -= E.col(j).dot(g * v) * E.col(j);
      const double nv = std::sqrt(std::max(0.0, v.dot(g * v)));
      diag.push_back(nv);
      E.col(rank++) = nv > 0.0 ? Vec(v / nv) : Vec(Vec::Zero(d));
    }
    std::vector<double> kappa;
    for (int k = 1; k < M; ++k) kappa.push_back(diag[static_cast<std::size_t>(k - 1)] > 0.0 ? diag[static_cast<std::size_t>(k)] / diag[static_cast<std::size_t>(k - 1)] : 0.0);
    int order = M;
    if (kappa[0] < opt.geodesic_tol) {
      order = 1;
    } else {
      for (int k = 1; k < M - 1 + 1 && k < static_cast<int>(kappa.size()); ++k)
        if (kappa[static_cast<std::size_t>(k)] < opt.rank_tol * kappa[0]) {
          order = k + 1;
          break;
        }
    }
    votes[order]++;
    per.push_back({E, kappa, order});
  }
  if (per.empty()) throw PreconditionError("frenet_apparatus: no interior samples");
  int order = 0, best = -1;
  for (const auto& [o, n] : votes)
    if (n > best) {
      best = n;
      order = o;
    }
  out.osculating_order = order;
  out.order_truncated = votes.size() > 1;
  for (std::size_t idx = 0; idx < per.size(); ++idx) {
    const std::size_t i = lo + idx;
    out.s.push_back(in.s0 + static_cast<double>(i) * in.ds);
    out.positions.push_back(in.positions[i]);
    out.frames.push_back(per[idx].E.leftCols(order));
    out.curvatures.emplace_back(per[idx].kappa.begin(), per[idx].kappa.begin() + (order - 1));
  }
  return out;
}

/// Positions-only convenience overload.
inline CurveSample frenet_apparatus(const MetricChart& chart, const std::vector<Vec>& positions, double ds,
                                    const FrenetOptions& opt = {}) {
  FrenetInput in;
  in.ds = ds;
  in.positions = positions;
  return frenet_apparatus(chart, in, opt);
}

/// Covariant derivatives D_1 = x', D_2 = nabla_{x'} x', D_3 along a
/// one-variable jet curve x(s) of order 3; D_k has order 3-k.
inline std::vector<Vec> covariant_derivatives_along(const MetricChart& chart, std::span<const Jet> x) {
  const int d = chart.dim;
  const JetVector gamma = christoffel_along(chart, truncated(x, 2));
  std::vector<Vec> out;
  JetVector D = partial(x, 0);
  const JetVector D1 = D;
  for (int k = 0; k < 3; ++k) {
    out.push_back(values(D));
    if (k == 2) break;
    JetVector next = partial(D, 0);
    const JetVector corr = contract_gamma(gamma, truncated(D1, next[0].order()), truncated(D, next[0].order()));
    for (int i = 0; i < d; ++i) next[static_cast<std::size_t>(i)] += corr[static_cast<std::size_t>(i)];
    D = next;
  }
  return out;
}

/// max |eta(gamma')| over samples (uses E_1 of the frame).
inline double legendre_residual(const CurveSample& c, const ModelSpace& m) {
  double r = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    r = std::max(r, std::abs(m.eta(c.positions[i]).dot(c.frames[i].col(0))));
  return r;
}

/// Integral curve of xi through p (unit speed since |xi| = 1).
inline std::vector<Vec> fiber_curve(const ModelSpace& m, const Vec& p, double length, int steps) {
  const StateFn f = [&m](const Vec& x) { return m.xi(x); };
  std::vector<Vec> pts{p};
  Vec y = p;
  for (int i = 0; i < steps; ++i) {
    y = rk4_step(f, y, length / steps);
    pts.push_back(y);
  }
  return pts;
}

/// Columns s, x1..xd, kappa1..kappa{r-1}, eta (= eta(gamma')).
inline void write_curve_csv(const CurveSample& c, const ModelSpace& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os.precision(17);
  const int d = m.dim();
  const std::size_t nk = c.curvatures.empty() ? 0 : c.curvatures.front().size();
  os << 's';
  for (int i = 1; i <= d; ++i) os << ",x" << i;
  for (std::size_t i = 1; i <= nk; ++i) os << ",kappa" << i;
  os << ",eta\n";
  for (std::size_t k = 0; k < c.size(); ++k) {
    os << c.s[k];
    for (int i = 0; i < d; ++i) os << ',' << c.positions[k][i];
    for (std::size_t i = 0; i < nk; ++i) os << ',' << c.curvatures[k][i];
    os << ',' << m.eta(c.positions[k]).dot(c.frames[k].col(0)) << '\n';
  }
}

}  // namespace sasaki
