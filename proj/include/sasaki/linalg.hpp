#pragma once
/// @file linalg.hpp
/// Jet-valued vectors/matrices, a dense fixed-rank numeric tensor, and the
/// small linear-algebra kernels shared by the geometry modules.

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sasaki/errors.hpp"
#include "sasaki/jet.hpp"

namespace sasaki {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using JetVector = std::vector<Jet>;

class JetMatrix {
 public:
  JetMatrix() = default;
  JetMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols)) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Jet& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * cols_ + j)]; }
  const Jet& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * cols_ + j)]; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Jet> a_;
};

/// Dense tensor with all extents equal to dim.
template <std::size_t Rank>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(int dim) : dim_(dim), a_(static_cast<std::size_t>(ipow(dim, Rank)), 0.0) {}

  int dim() const { return dim_; }
  template <class... I>
  double& operator()(I... idx) {
    static_assert(sizeof...(I) == Rank);
    return a_[offset({static_cast<int>(idx)...})];
  }
  template <class... I>
  double operator()(I... idx) const {
    static_assert(sizeof...(I) == Rank);
    return a_[offset({static_cast<int>(idx)...})];
  }
  std::vector<double>& data() { return a_; }
  const std::vector<double>& data() const { return a_; }

  double max_abs() const {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  static std::size_t ipow(int b, std::size_t e) {
    std::size_t r = 1;
    for (std::size_t k = 0; k < e; ++k) r *= static_cast<std::size_t>(b);
    return r;
  }
  std::size_t offset(std::array<int, Rank> idx) const {
    std::size_t o = 0;
    for (int i : idx) o = o * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
    return o;
  }
  int dim_ = 0;
  std::vector<double> a_;
};

inline Vec values(std::span<const Jet> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i].value();
  return out;
}

inline Mat values(const JetMatrix& m) {
  Mat out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).value();
  return out;
}

inline JetVector constant_jets(const Vec& v) {
  JetVector out;
  out.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out.emplace_back(v[i]);
  return out;
}

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

inline JetVector seed_at(const Vec& p, int order) {
  return seed_independents(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())), order);
}

inline JetVector truncated(std::span<const Jet> v, int order) {
  JetVector out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.truncated(order));
  return out;
}

inline JetVector partial(std::span<const Jet> v, int var) {
  JetVector out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(x.partial(var));
  return out;
}

inline JetMatrix partial(const JetMatrix& m, int var) {
  JetMatrix out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).partial(var);
  return out;
}

inline JetVector compose(std::span<const Jet> outer, std::span<const Jet> inner) {
  JetVector out;
  out.reserve(outer.size());
  for (const auto& f : outer) out.push_back(compose(f, inner));
  return out;
}

inline JetMatrix compose(const JetMatrix& outer, std::span<const Jet> inner) {
  JetMatrix out(outer.rows(), outer.cols());
  for (int i = 0; i < outer.rows(); ++i)
    for (int j = 0; j < outer.cols(); ++j) out(i, j) = compose(outer(i, j), inner);
  return out;
}

inline JetVector matvec(const JetMatrix& m, std::span<const Jet> v) {
  JetVector out(static_cast<std::size_t>(m.rows()));
  for (int i = 0; i < m.rows(); ++i) {
    Jet s(0.0);
    for (int j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

/// u^T m v
inline Jet bilinear(const JetMatrix& m, std::span<const Jet> u, std::span<const Jet> v) {
  Jet s(0.0);
  for (int i = 0; i < m.rows(); ++i) {
    Jet row(0.0);
    for (int j = 0; j < m.cols(); ++j) row += m(i, j) * v[j];
    s += u[i] * row;
  }
  return s;
}

inline Jet dot(std::span<const Jet> a, std::span<const Jet> b) {
  Jet s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline JetVector axpy(const Jet& alpha, std::span<const Jet> x, std::span<const Jet> y) {
  JetVector out(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
  return out;
}

inline JetVector scale(const Jet& alpha, std::span<const Jet> x) {
  JetVector out;
  out.reserve(x.size());
  for (const auto& xi : x) out.push_back(alpha * xi);
  return out;
}

inline JetVector add(std::span<const Jet> a, std::span<const Jet> b) {
  JetVector out(a.begin(), a.end());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

inline JetVector sub(std::span<const Jet> a, std::span<const Jet> b) {
  JetVector out(a.begin(), a.end());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
  return out;
}

/// Solves m x = rhs (columns of rhs) by Gaussian elimination with partial
/// pivoting on values; jets carry the derivatives through.
inline JetMatrix solve(JetMatrix m, JetMatrix rhs) {
  const int n = m.rows();
  if (m.cols() != n || rhs.rows() != n) throw DimensionError("solve: shape mismatch");
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(m(i, j).value()));
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m(r, col).value()) > std::abs(m(piv, col).value())) piv = r;
    if (std::abs(m(piv, col).value()) <= 1e-14 * std::max(scale, 1e-300))
      throw LinearSolveError("singular matrix in jet solve");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(m(col, j), m(piv, j));
      for (int j = 0; j < rhs.cols(); ++j) std::swap(rhs(col, j), rhs(piv, j));
    }
    const Jet inv = inverse(m(col, col));
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      if (m(r, col).is_constant() && m(r, col).value() == 0.0) continue;
      const Jet f = m(r, col) * inv;
      for (int j = col; j < n; ++j) m(r, j) -= f * m(col, j);
      for (int j = 0; j < rhs.cols(); ++j) rhs(r, j) -= f * rhs(col, j);
    }
    for (int j = col; j < n; ++j) m(col, j) = m(col, j) * inv;
    for (int j = 0; j < rhs.cols(); ++j) rhs(col, j) = rhs(col, j) * inv;
  }
  return rhs;
}

inline JetMatrix identity_jets(int n) {
  JetMatrix I(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) I(i, j) = Jet(i == j ? 1.0 : 0.0);
  return I;
}

inline JetMatrix inverse(const JetMatrix& m) { return solve(m, identity_jets(m.rows())); }

inline JetVector solve(const JetMatrix& m, std::span<const Jet> rhs) {
  JetMatrix b(static_cast<int>(rhs.size()), 1);
  for (std::size_t i = 0; i < rhs.size(); ++i) b(static_cast<int>(i), 0) = rhs[i];
  JetMatrix x = solve(m, b);
  JetVector out(rhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) out[i] = x(static_cast<int>(i), 0);
  return out;
}

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Modified Gram-Schmidt of the columns of vs in the inner product g.
/// Columns with residual norm below tol are dropped when skip_degenerate,
/// otherwise a LinearSolveError is thrown.
inline Mat gram_schmidt(const Mat& vs, const Mat& g, double tol = 1e-8, bool skip_degenerate = false) {
  std::vector<Vec> out;
  for (Eigen::Index c = 0; c < vs.cols(); ++c) {
    Vec v = vs.col(c);
    const double n0 = std::sqrt(std::max(0.0, v.dot(g * v)));
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : out) v -= e.dot(g * v) * e;
    const double n = std::sqrt(std::max(0.0, v.dot(g * v)));
    if (n < tol * std::max(1.0, n0)) {
      if (skip_degenerate) continue;
      throw LinearSolveError("gram_schmidt: degenerate vector");
    }
    out.push_back(v / n);
  }
  Mat r(vs.rows(), static_cast<Eigen::Index>(out.size()));
  for (std::size_t k = 0; k < out.size(); ++k) r.col(static_cast<Eigen::Index>(k)) = out[k];
  return r;
}

}  // namespace sasaki
