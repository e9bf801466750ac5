#pragma once

// Small dense helpers that work for any scalar (double, Jet, Taylor). Eigen's
// decompositions assume a field with a usable abs()/sqrt() ordering, which
// jets only half provide, so inversion and determinants are spelled out here.

#include "beltrami/jet.hpp"
#include "beltrami/taylor.hpp"
#include "beltrami/types.hpp"

#include <cmath>
#include <utility>

namespace beltrami {

template <typename Scalar>
MatX<Scalar> inverse(const MatX<Scalar>& m) {
  using std::abs;
  const int n = static_cast<int>(m.rows());
  MatX<Scalar> a = m;
  MatX<Scalar> inv = MatX<Scalar>::Identity(n, n);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(value_of(a(r, col))) > std::abs(value_of(a(pivot, col)))) {
        pivot = r;
      }
    }
    if (value_of(a(pivot, col)) == 0.0) {
      throw MetricError("singular matrix in inverse()");
    }
    if (pivot != col) {
      a.row(col).swap(a.row(pivot));
      inv.row(col).swap(inv.row(pivot));
    }
    const Scalar p = a(col, col);
    for (int c = 0; c < n; ++c) {
      a(col, c) = a(col, c) / p;
      inv(col, c) = inv(col, c) / p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const Scalar f = a(r, col);
      if (value_of(f) == 0.0 && std::is_same_v<Scalar, double>) continue;
      for (int c = 0; c < n; ++c) {
        a(r, c) = a(r, c) - f * a(col, c);
        inv(r, c) = inv(r, c) - f * inv(col, c);
      }
    }
  }
  return inv;
}

template <typename Scalar>
Scalar determinant(const MatX<Scalar>& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (n == 3) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  }
  // Gaussian elimination with partial pivoting.
  MatX<Scalar> a = m;
  Scalar det(1.0);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(value_of(a(r, col))) > std::abs(value_of(a(pivot, col)))) {
        pivot = r;
      }
    }
    if (value_of(a(pivot, col)) == 0.0) return Scalar(0.0);
    if (pivot != col) {
      a.row(col).swap(a.row(pivot));
      det = -det;
    }
    det = det * a(col, col);
    for (int r = col + 1; r < n; ++r) {
      const Scalar f = a(r, col) / a(col, col);
      for (int c = col; c < n; ++c) a(r, c) = a(r, c) - f * a(col, c);
    }
  }
  return det;
}

template <typename Scalar>
Scalar trace(const MatX<Scalar>& m) {
  Scalar t(0.0);
  for (int i = 0; i < m.rows(); ++i) t = t + m(i, i);
  return t;
}

template <typename Scalar>
Scalar squared_norm(const VecX<Scalar>& x) {
  Scalar s(0.0);
  for (int i = 0; i < x.size(); ++i) s = s + x(i) * x(i);
  return s;
}

template <typename Scalar>
Scalar dot(const VecX<Scalar>& a, const VecX<Scalar>& b) {
  Scalar s(0.0);
  for (int i = 0; i < a.size(); ++i) s = s + a(i) * b(i);
  return s;
}

// Matrix product without relying on Eigen's product kernels, which are not
// guaranteed to behave for every custom scalar.
template <typename Scalar>
MatX<Scalar> multiply(const MatX<Scalar>& a, const MatX<Scalar>& b) {
  MatX<Scalar> r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < b.cols(); ++j) {
      Scalar s(0.0);
      for (int k = 0; k < a.cols(); ++k) s = s + a(i, k) * b(k, j);
      r(i, j) = s;
    }
  }
  return r;
}

template <typename Scalar>
VecX<Scalar> multiply(const MatX<Scalar>& a, const VecX<Scalar>& x) {
  VecX<Scalar> r(a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    Scalar s(0.0);
    for (int k = 0; k < a.cols(); ++k) s = s + a(i, k) * x(k);
    r(i) = s;
  }
  return r;
}

// Lift a value matrix to the given scalar type.
template <typename Scalar>
MatX<Scalar> lift(const Mat& m) {
  MatX<Scalar> r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = Scalar(m(i, j));
  return r;
}

template <typename Scalar>
VecX<Scalar> lift(const Vec& v) {
  VecX<Scalar> r(v.size());
  for (int i = 0; i < v.size(); ++i) r(i) = Scalar(v(i));
  return r;
}

template <typename Scalar>
Mat values(const MatX<Scalar>& m) {
  Mat r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = value_of(m(i, j));
  return r;
}

template <typename Scalar>
Vec values(const VecX<Scalar>& v) {
  Vec r(v.size());
  for (int i = 0; i < v.size(); ++i) r(i) = value_of(v(i));
  return r;
}

// Independent-variable jets at x.
inline VecX<Jet> seed_jets(const Vec& x) {
  const int n = static_cast<int>(x.size());
  VecX<Jet> r(n);
  for (int i = 0; i < n; ++i) r(i) = Jet::variable(x(i), i, n);
  return r;
}

// Promote a constant jet to an explicit zero gradient of the given size.
inline Jet densify(const Jet& j, int dim) {
  if (!j.is_constant()) return j;
  return Jet(j.v, Jet::Grad::Zero(dim), Jet::Hess::Zero(dim, dim));
}

// Symmetric-positive-definite check via Cholesky.
bool is_positive_definite(const Mat& m);

}  // namespace beltrami
