#pragma once
/// @file jet.hpp
/// Truncated multivariate Taylor jets (order <= 3) storing raw partials.
///
/// Coefficients are packed: value, then first partials, then the distinct
/// second partials (i <= j), then the distinct third partials (i <= j <= k).
/// A jet of dimension 0 is an exact constant and broadcasts in arithmetic.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "sasaki/errors.hpp"

namespace sasaki {

inline constexpr int kMaxJetOrder = 3;
inline constexpr int kMaxJetDim = 16;

namespace detail {

struct JetLayout {
  struct Triple {
    std::uint8_t i, j, k;
    std::uint16_t jk, ik, ij;
  };
  int dim = 0;
  int n2 = 0;
  int n3 = 0;
  std::vector<std::array<std::uint8_t, 2>> pairs;
  std::vector<Triple> triples;
  std::vector<std::uint16_t> pair_of;
  std::vector<std::uint16_t> triple_of;

  int size(int order) const {
    switch (order) {
      case 0: return 1;
      case 1: return 1 + dim;
      case 2: return 1 + dim + n2;
      default: return 1 + dim + n2 + n3;
    }
  }
  int off2() const { return 1 + dim; }
  int off3() const { return 1 + dim + n2; }
  int pair(int i, int j) const { return pair_of[i * dim + j]; }
  int triple(int i, int j, int k) const { return triple_of[(i * dim + j) * dim + k]; }
};

inline JetLayout build_layout(int d) {
  JetLayout L;
  L.dim = d;
  L.pair_of.assign(static_cast<std::size_t>(d * d), 0);
  L.triple_of.assign(static_cast<std::size_t>(d * d * d), 0);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      auto p = static_cast<std::uint16_t>(L.pairs.size());
      L.pairs.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j)});
      L.pair_of[i * d + j] = p;
      L.pair_of[j * d + i] = p;
    }
  L.n2 = static_cast<int>(L.pairs.size());
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      for (int k = j; k < d; ++k) {
        auto t = static_cast<std::uint16_t>(L.triples.size());
        L.triples.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j),
                             static_cast<std::uint8_t>(k), L.pair_of[j * d + k],
                             L.pair_of[i * d + k], L.pair_of[i * d + j]});
        const std::array<int, 3> idx{i, j, k};
        std::array<int, 3> perm{0, 1, 2};
        do {
          L.triple_of[(idx[perm[0]] * d + idx[perm[1]]) * d + idx[perm[2]]] = t;
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
  L.n3 = static_cast<int>(L.triples.size());
  return L;
}

inline const JetLayout& layout(int d) {
  static const std::vector<JetLayout> table = [] {
    std::vector<JetLayout> t;
    for (int d = 0; d <= kMaxJetDim; ++d) t.push_back(build_layout(d));
    return t;
  }();
  return table[static_cast<std::size_t>(d)];
}

inline std::string format_value(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace detail

class Jet {
 public:
  using Storage = boost::container::small_vector<double, 20>;

  Jet() : L_(&detail::layout(0)), order_(kMaxJetOrder), c_(1, 0.0) {}
  Jet(double v) : L_(&detail::layout(0)), order_(kMaxJetOrder), c_(1, v) {}  // NOLINT

  static Jet zero(int dim, int order) {
    if (dim < 0 || dim > kMaxJetDim) throw DimensionError("jet dimension out of range");
    if (order < 0 || order > kMaxJetOrder) throw UnsupportedOrderError("jet order out of range");
    Jet j;
    j.L_ = &detail::layout(dim);
    j.order_ = dim == 0 ? kMaxJetOrder : order;
    j.c_.assign(static_cast<std::size_t>(j.L_->size(j.order_)), 0.0);
    return j;
  }

  static Jet variable(double value, int dim, int index, int order = kMaxJetOrder) {
    if (index < 0 || index >= dim) throw DimensionError("variable index out of range");
    Jet j = zero(dim, order);
    j.c_[0] = value;
    if (order >= 1) j.c_[1 + index] = 1.0;
    return j;
  }

  double value() const { return c_[0]; }
  int dim() const { return L_->dim; }
  int order() const { return order_; }
  bool is_constant() const { return L_->dim == 0; }
  int size() const { return static_cast<int>(c_.size()); }
  const detail::JetLayout& layout() const { return *L_; }

  double d1(int i) const {
    if (is_constant() || order_ < 1) return 0.0;
    return c_[1 + i];
  }
  double d2(int i, int j) const {
    if (is_constant() || order_ < 2) return 0.0;
    return c_[L_->off2() + L_->pair(i, j)];
  }
  double d3(int i, int j, int k) const {
    if (is_constant() || order_ < 3) return 0.0;
    return c_[L_->off3() + L_->triple(i, j, k)];
  }

  double& coeff(int idx) { return c_[static_cast<std::size_t>(idx)]; }
  double coeff(int idx) const { return c_[static_cast<std::size_t>(idx)]; }
  double& value_ref() { return c_[0]; }

  /// Jet of the partial derivative along variable i; order drops by one.
  Jet partial(int i) const {
    if (is_constant()) return Jet(0.0);
    if (i < 0 || i >= dim()) throw DimensionError("partial index out of range");
    if (order_ < 1) throw UnsupportedOrderError("partial of an order-0 jet");
    const int d = dim();
    Jet r = zero(d, order_ - 1);
    r.c_[0] = c_[1 + i];
    if (order_ >= 2)
      for (int j = 0; j < d; ++j) r.c_[1 + j] = c_[L_->off2() + L_->pair(i, j)];
    if (order_ >= 3) {
      const auto& L = *L_;
      for (int p = 0; p < L.n2; ++p)
        r.c_[L.off2() + p] = c_[L.off3() + L.triple(i, L.pairs[p][0], L.pairs[p][1])];
    }
    return r;
  }

  Jet truncated(int order) const {
    if (is_constant() || order >= order_) return *this;
    Jet r = *this;
    r.order_ = order;
    r.c_.resize(static_cast<std::size_t>(L_->size(order)));
    return r;
  }

  Jet operator-() const {
    Jet r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }

  Jet& operator+=(const Jet& b) { return *this = *this + b; }
  Jet& operator-=(const Jet& b) { return *this = *this - b; }
  Jet& operator*=(const Jet& b) { return *this = *this * b; }
  Jet& operator/=(const Jet& b) { return *this = *this / b; }

  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& x : c_) x *= s;
    return *this;
  }

  friend Jet operator+(const Jet& a, const Jet& b) { return combine(a, b, 1.0); }
  friend Jet operator-(const Jet& a, const Jet& b) { return combine(a, b, -1.0); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    if (a.is_constant()) return scaled(b, a.c_[0]);
    if (b.is_constant()) return scaled(a, b.c_[0]);
    const int d = check_dims(a, b);
    const int o = std::min(a.order_, b.order_);
    Jet r = zero(d, o);
    const double a0 = a.c_[0], b0 = b.c_[0];
    r.c_[0] = a0 * b0;
    if (o >= 1) {
      const double* a1 = &a.c_[1];
      const double* b1 = &b.c_[1];
      for (int i = 0; i < d; ++i) r.c_[1 + i] = a0 * b1[i] + b0 * a1[i];
      if (o >= 2) {
        const auto& L = *r.L_;
        const double* a2 = &a.c_[L.off2()];
        const double* b2 = &b.c_[L.off2()];
        double* r2 = &r.c_[L.off2()];
        for (int p = 0; p < L.n2; ++p) {
          const int i = L.pairs[p][0], j = L.pairs[p][1];
          r2[p] = a0 * b2[p] + b0 * a2[p] + a1[i] * b1[j] + a1[j] * b1[i];
        }
        if (o >= 3) {
          const double* a3 = &a.c_[L.off3()];
          const double* b3 = &b.c_[L.off3()];
          double* r3 = &r.c_[L.off3()];
          for (int t = 0; t < L.n3; ++t) {
            const auto& T = L.triples[t];
            r3[t] = a0 * b3[t] + b0 * a3[t] + a1[T.i] * b2[T.jk] + a1[T.j] * b2[T.ik] +
                    a1[T.k] * b2[T.ij] + b1[T.i] * a2[T.jk] + b1[T.j] * a2[T.ik] +
                    b1[T.k] * a2[T.ij];
          }
        }
      }
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b);

  friend Jet operator+(const Jet& a, double s) {
    Jet r = a;
    r.c_[0] += s;
    return r;
  }
  friend Jet operator+(double s, const Jet& a) { return a + s; }
  friend Jet operator-(const Jet& a, double s) { return a + (-s); }
  friend Jet operator-(double s, const Jet& a) {
    Jet r = -a;
    r.c_[0] += s;
    return r;
  }
  friend Jet operator*(const Jet& a, double s) { return scaled(a, s); }
  friend Jet operator*(double s, const Jet& a) { return scaled(a, s); }

  /// f(a) given f and its first three derivatives at a.value().
  friend Jet apply_univariate(const Jet& a, double p0, double p1, double p2, double p3) {
    Jet r = zero(a.dim(), a.order_);
    r.c_[0] = p0;
    if (a.is_constant()) return r;
    const int d = a.dim();
    const int o = a.order_;
    if (o >= 1) {
      const double* a1 = &a.c_[1];
      for (int i = 0; i < d; ++i) r.c_[1 + i] = p1 * a1[i];
      if (o >= 2) {
        const auto& L = *a.L_;
        const double* a2 = &a.c_[L.off2()];
        double* r2 = &r.c_[L.off2()];
        for (int p = 0; p < L.n2; ++p) {
          const int i = L.pairs[p][0], j = L.pairs[p][1];
          r2[p] = p2 * a1[i] * a1[j] + p1 * a2[p];
        }
        if (o >= 3) {
          const double* a3 = &a.c_[L.off3()];
          double* r3 = &r.c_[L.off3()];
          for (int t = 0; t < L.n3; ++t) {
            const auto& T = L.triples[t];
            r3[t] = p3 * a1[T.i] * a1[T.j] * a1[T.k] +
                    p2 * (a2[T.ij] * a1[T.k] + a2[T.ik] * a1[T.j] + a2[T.jk] * a1[T.i]) +
                    p1 * a3[t];
          }
        }
      }
    }
    return r;
  }

  friend Jet compose(const Jet& outer, std::span<const Jet> inner);
  friend Jet antiderivative(const Jet& integrand, int var, const Jet& initial);

 private:
  static int check_dims(const Jet& a, const Jet& b) {
    if (a.dim() != b.dim())
      throw DimensionError("jet dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                           std::to_string(b.dim()));
    return a.dim();
  }

  static Jet scaled(const Jet& a, double s) {
    Jet r = a;
    for (auto& x : r.c_) x *= s;
    return r;
  }

  static Jet combine(const Jet& a, const Jet& b, double sb) {
    if (b.is_constant()) {
      Jet r = a;
      r.c_[0] += sb * b.c_[0];
      return r;
    }
    if (a.is_constant()) {
      Jet r = scaled(b, sb);
      r.c_[0] += a.c_[0];
      return r;
    }
    const int d = check_dims(a, b);
    const int o = std::min(a.order_, b.order_);
    Jet r = zero(d, o);
    const std::size_t n = r.c_.size();
    for (std::size_t k = 0; k < n; ++k) r.c_[k] = a.c_[k] + sb * b.c_[k];
    return r;
  }

  const detail::JetLayout* L_;
  int order_;
  Storage c_;
};

inline Jet inverse(const Jet& a) {
  const double x = a.value();
  if (x == 0.0) throw EvaluationError("division by zero");
  const double r = 1.0 / x;
  return apply_univariate(a, r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
}

inline Jet operator/(const Jet& a, const Jet& b) {
  if (b.is_constant()) {
    if (b.value() == 0.0) throw EvaluationError("division by zero");
    return a * (1.0 / b.value());
  }
  return a * inverse(b);
}
inline Jet operator/(const Jet& a, double s) {
  if (s == 0.0) throw EvaluationError("division by zero");
  return a * (1.0 / s);
}
inline Jet operator/(double s, const Jet& a) { return s * inverse(a); }

inline Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return apply_univariate(a, s, c, -s, -c);
}
inline Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return apply_univariate(a, c, -s, -c, s);
}
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  return apply_univariate(a, e, e, e, e);
}
inline Jet log(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw EvaluationError("log of non-positive value " + detail::format_value(x));
  const double r = 1.0 / x;
  return apply_univariate(a, std::log(x), r, -r * r, 2.0 * r * r * r);
}
inline Jet sqrt(const Jet& a) {
  const double x = a.value();
  if (x < 0.0) throw EvaluationError("sqrt of negative value " + detail::format_value(x));
  const double s = std::sqrt(x);
  if (a.is_constant() || a.order() == 0) return apply_univariate(a, s, 0, 0, 0);
  if (s == 0.0) throw EvaluationError("sqrt at zero is not differentiable");
  return apply_univariate(a, s, 0.5 / s, -0.25 / (s * s * s), 0.375 / (s * s * s * s * s));
}
inline Jet square(const Jet& a) { return a * a; }

inline Jet pow(const Jet& a, int e) {
  if (e < 0) return inverse(pow(a, -e));
  Jet r(1.0);
  Jet base = a;
  while (e > 0) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return r;
}

inline Jet pow(const Jet& a, double e) {
  if (e == std::floor(e) && std::abs(e) <= 64.0) return pow(a, static_cast<int>(e));
  const double x = a.value();
  if (!(x > 0.0))
    throw EvaluationError("non-integer power of non-positive value " + detail::format_value(x));
  const double p0 = std::pow(x, e);
  return apply_univariate(a, p0, e * p0 / x, e * (e - 1) * p0 / (x * x),
                          e * (e - 1) * (e - 2) * p0 / (x * x * x));
}

inline Jet pow(const Jet& a, const Jet& e) {
  if (e.is_constant()) return pow(a, e.value());
  return exp(e * log(a));
}

/// Multivariate chain rule: outer is a jet in d variables, inner holds d jets
/// in m variables evaluated at the point where outer was seeded.
inline Jet compose(const Jet& outer, std::span<const Jet> inner) {
  if (outer.is_constant()) return outer;
  const int d = outer.dim();
  if (static_cast<int>(inner.size()) != d)
    throw DimensionError("compose: expected " + std::to_string(d) + " inner jets");
  int m = 0;
  int o = outer.order();
  for (const auto& x : inner) {
    if (!x.is_constant()) {
      if (m != 0 && x.dim() != m) throw DimensionError("compose: inner dimension mismatch");
      m = x.dim();
      o = std::min(o, x.order());
    }
  }
  if (m == 0) return Jet(outer.value());
  Jet r = Jet::zero(m, o);
  r.c_[0] = outer.value();
  if (o == 0) return r;
  const auto& Lo = outer.layout();
  const auto& Lm = r.layout();

  // B[i*m+a] = d inner_i / d a
  std::vector<double> B(static_cast<std::size_t>(d * m), 0.0);
  for (int i = 0; i < d; ++i)
    for (int a = 0; a < m; ++a) B[i * m + a] = inner[i].d1(a);

  for (int a = 0; a < m; ++a) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += outer.c_[1 + i] * B[i * m + a];
    r.c_[1 + a] = s;
  }
  if (o >= 2) {
    // G2B[(i*m)+b] = sum_j g_ij B_jb
    std::vector<double> G2B(static_cast<std::size_t>(d * m), 0.0);
    for (int i = 0; i < d; ++i)
      for (int b = 0; b < m; ++b) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += outer.c_[Lo.off2() + Lo.pair(i, j)] * B[j * m + b];
        G2B[i * m + b] = s;
      }
    for (int p = 0; p < Lm.n2; ++p) {
      const int a = Lm.pairs[p][0], b = Lm.pairs[p][1];
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += B[i * m + a] * G2B[i * m + b] + outer.c_[1 + i] * inner[i].d2(a, b);
      r.c_[Lm.off2() + p] = s;
    }
    if (o >= 3) {
      // G3B[(i*d+j)*m+c] = sum_k g_ijk B_kc
      std::vector<double> G3B(static_cast<std::size_t>(d * d * m), 0.0);
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
          for (int c = 0; c < m; ++c) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += outer.c_[Lo.off3() + Lo.triple(i, j, k)] * B[k * m + c];
            G3B[(i * d + j) * m + c] = s;
            G3B[(j * d + i) * m + c] = s;
          }
      for (int t = 0; t < Lm.n3; ++t) {
        const auto& T = Lm.triples[t];
        const int a = T.i, b = T.j, c = T.k;
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
          double w = 0.0;
          for (int j = 0; j < d; ++j) w += G3B[(i * d + j) * m + c] * B[j * m + b];
          s += w * B[i * m + a];
          s += G2B[i * m + c] * inner[i].d2(a, b) + G2B[i * m + b] * inner[i].d2(a, c) +
               G2B[i * m + a] * inner[i].d2(b, c);
          s += outer.c_[1 + i] * inner[i].d3(a, b, c);
        }
        r.c_[Lm.off3() + t] = s;
      }
    }
  }
  return r;
}

/// Jet F with dF/d(var) = integrand and F restricted to var = 0 equal to
/// initial (which must not depend on var).
inline Jet antiderivative(const Jet& integrand, int var, const Jet& initial) {
  int d = std::max(integrand.dim(), initial.dim());
  if ((!integrand.is_constant() && integrand.dim() != d) ||
      (!initial.is_constant() && initial.dim() != d))
    throw DimensionError("antiderivative: dimension mismatch");
  if (d == 0 || var < 0 || var >= d) throw DimensionError("antiderivative: variable out of range");
  const int o = std::min({integrand.order() + 1, kMaxJetOrder, initial.order()});
  Jet r = Jet::zero(d, o);
  const auto& L = r.layout();
  r.c_[0] = initial.value();
  if (o >= 1)
    for (int a = 0; a < d; ++a) r.c_[1 + a] = (a == var) ? integrand.value() : initial.d1(a);
  if (o >= 2)
    for (int p = 0; p < L.n2; ++p) {
      const int a = L.pairs[p][0], b = L.pairs[p][1];
      double v;
      if (a == var) v = integrand.d1(b);
      else if (b == var) v = integrand.d1(a);
      else v = initial.d2(a, b);
      r.c_[L.off2() + p] = v;
    }
  if (o >= 3)
    for (int t = 0; t < L.n3; ++t) {
      const auto& T = L.triples[t];
      double v;
      if (T.i == var) v = integrand.d2(T.j, T.k);
      else if (T.j == var) v = integrand.d2(T.i, T.k);
      else if (T.k == var) v = integrand.d2(T.i, T.j);
      else v = initial.d3(T.i, T.j, T.k);
      r.c_[L.off3() + t] = v;
    }
  return r;
}

inline std::vector<Jet> seed_independents(std::span<const double> point, int order = kMaxJetOrder) {
  if (point.empty()) throw DimensionError("seed_independents: empty point");
  const int d = static_cast<int>(point.size());
  if (d > kMaxJetDim) throw DimensionError("seed_independents: too many variables");
  std::vector<Jet> out;
  out.reserve(point.size());
  for (int i = 0; i < d; ++i) out.push_back(Jet::variable(point[i], d, i, order));
  return out;
}

inline std::vector<Jet> seed_independents(std::initializer_list<double> point, int order = kMaxJetOrder) {
  return seed_independents(std::span<const double>(point.begin(), point.size()), order);
}

/// Raw partial derivative selected by a list of variable indices.
inline double extract_partial(const Jet& j, std::span<const int> multi_index) {
  const int n = static_cast<int>(multi_index.size());
  if (n > kMaxJetOrder)
    throw UnsupportedOrderError("partials above order 3 are not supported");
  for (int i : multi_index)
    if (i < 0 || (!j.is_constant() && i >= j.dim()))
      throw DimensionError("extract_partial: index out of range");
  if (n > j.order()) throw UnsupportedOrderError("jet truncated below requested order");
  switch (n) {
    case 0: return j.value();
    case 1: return j.d1(multi_index[0]);
    case 2: return j.d2(multi_index[0], multi_index[1]);
    default: return j.d3(multi_index[0], multi_index[1], multi_index[2]);
  }
}

inline double extract_partial(const Jet& j, std::initializer_list<int> multi_index) {
  return extract_partial(j, std::span<const int>(multi_index.begin(), multi_index.size()));
}

/// Applies a jet-generic function after checking that the arguments share
/// one independent-variable dimension.
template <class F>
Jet jet_apply(F&& f, std::span<const Jet> args) {
  int d = 0;
  for (const auto& a : args) {
    if (a.is_constant()) continue;
    if (d != 0 && a.dim() != d) throw DimensionError("jet_apply: arguments disagree on dimension");
    d = a.dim();
  }
  return f(args);
}

}  // namespace sasaki
