#pragma once

// Truncated univariate Taylor series c_0 + c_1 t + ... + c_N t^N. Composing a
// map with a curve's degree-3 series yields the exact 3-jet of the image
// curve, which is all the Frenet machinery needs.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <ostream>

namespace beltrami {

template <int N>
class Taylor {
 public:
  std::array<double, N + 1> c{};

  Taylor() = default;
  Taylor(double value) { c[0] = value; }  // NOLINT(google-explicit-constructor)

  // The series of t -> value + slope * t.
  static Taylor line(double value, double slope) {
    Taylor r(value);
    if constexpr (N >= 1) r.c[1] = slope;
    return r;
  }

  // Derivative of order k at t = 0.
  double derivative(int k) const {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return c[k] * f;
  }

  Taylor& operator+=(const Taylor& o) { return *this = *this + o; }
  Taylor& operator-=(const Taylor& o) { return *this = *this - o; }
  Taylor& operator*=(const Taylor& o) { return *this = *this * o; }
  Taylor& operator/=(const Taylor& o) { return *this = *this / o; }

  friend Taylor operator+(const Taylor& a, const Taylor& b) {
    Taylor r;
    for (int k = 0; k <= N; ++k) r.c[k] = a.c[k] + b.c[k];
    return r;
  }
  friend Taylor operator-(const Taylor& a) {
    Taylor r;
    for (int k = 0; k <= N; ++k) r.c[k] = -a.c[k];
    return r;
  }
  friend Taylor operator-(const Taylor& a, const Taylor& b) { return a + (-b); }
  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    Taylor r;
    for (int k = 0; k <= N; ++k) {
      double s = 0.0;
      for (int j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
      r.c[k] = s;
    }
    return r;
  }
  friend Taylor operator/(const Taylor& a, const Taylor& b) {
    Taylor r;
    for (int k = 0; k <= N; ++k) {
      double s = a.c[k];
      for (int j = 1; j <= k; ++j) s -= b.c[j] * r.c[k - j];
      r.c[k] = s / b.c[0];
    }
    return r;
  }

  friend bool operator<(const Taylor& a, const Taylor& b) { return a.c[0] < b.c[0]; }
  friend bool operator>(const Taylor& a, const Taylor& b) { return a.c[0] > b.c[0]; }
  friend bool operator<=(const Taylor& a, const Taylor& b) { return a.c[0] <= b.c[0]; }
  friend bool operator>=(const Taylor& a, const Taylor& b) { return a.c[0] >= b.c[0]; }
  friend bool operator==(const Taylor& a, const Taylor& b) { return a.c[0] == b.c[0]; }
  friend bool operator!=(const Taylor& a, const Taylor& b) { return a.c[0] != b.c[0]; }

  friend std::ostream& operator<<(std::ostream& os, const Taylor& a) {
    return os << a.c[0];
  }
};

template <int N>
Taylor<N> exp(const Taylor<N>& a) {
  Taylor<N> e;
  e.c[0] = std::exp(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * a.c[j] * e.c[k - j];
    e.c[k] = s / k;
  }
  return e;
}

template <int N>
Taylor<N> log(const Taylor<N>& a) {
  Taylor<N> l;
  l.c[0] = std::log(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    double s = 0.0;
    for (int j = 1; j < k; ++j) s += j * l.c[j] * a.c[k - j];
    l.c[k] = (a.c[k] - s / k) / a.c[0];
  }
  return l;
}

template <int N>
Taylor<N> sqrt(const Taylor<N>& a) {
  Taylor<N> r;
  r.c[0] = std::sqrt(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    double s = 0.0;
    for (int j = 1; j < k; ++j) s += r.c[j] * r.c[k - j];
    r.c[k] = (a.c[k] - s) / (2.0 * r.c[0]);
  }
  return r;
}

template <int N>
void sincos(const Taylor<N>& a, Taylor<N>& s, Taylor<N>& c) {
  s = Taylor<N>();
  c = Taylor<N>();
  s.c[0] = std::sin(a.c[0]);
  c.c[0] = std::cos(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    double ss = 0.0, cc = 0.0;
    for (int j = 1; j <= k; ++j) {
      ss += j * a.c[j] * c.c[k - j];
      cc -= j * a.c[j] * s.c[k - j];
    }
    s.c[k] = ss / k;
    c.c[k] = cc / k;
  }
}

template <int N>
Taylor<N> sin(const Taylor<N>& a) {
  Taylor<N> s, c;
  sincos(a, s, c);
  return s;
}

template <int N>
Taylor<N> cos(const Taylor<N>& a) {
  Taylor<N> s, c;
  sincos(a, s, c);
  return c;
}

template <int N>
Taylor<N> tan(const Taylor<N>& a) {
  Taylor<N> s, c;
  sincos(a, s, c);
  return s / c;
}

template <int N>
Taylor<N> atan(const Taylor<N>& a) {
  // atan' = 1/(1+a^2): integrate the derivative series.
  Taylor<N> q = Taylor<N>(1.0) / (Taylor<N>(1.0) + a * a);
  Taylor<N> r;
  r.c[0] = std::atan(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * a.c[j] * q.c[k - j];
    r.c[k] = s / k;
  }
  return r;
}

template <int N>
Taylor<N> abs(const Taylor<N>& a) {
  return a.c[0] < 0.0 ? -a : a;
}

template <int N>
Taylor<N> pow(const Taylor<N>& a, double p) {
  if (p == std::round(p) && std::abs(p) <= 64.0) {
    const int e = static_cast<int>(std::abs(p));
    Taylor<N> r(1.0), base = a;
    for (int k = e; k > 0; k >>= 1) {
      if (k & 1) r = r * base;
      base = base * base;
    }
    return p < 0 ? Taylor<N>(1.0) / r : r;
  }
  Taylor<N> r;
  r.c[0] = std::pow(a.c[0], p);
  for (int k = 1; k <= N; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += (p * j - (k - j)) * a.c[j] * r.c[k - j];
    r.c[k] = s / (k * a.c[0]);
  }
  return r;
}

template <int N>
Taylor<N> pow(const Taylor<N>& a, const Taylor<N>& b) {
  bool constant = true;
  for (int k = 1; k <= N; ++k) constant = constant && b.c[k] == 0.0;
  if (constant) return pow(a, b.c[0]);
  return exp(b * log(a));
}

template <int N>
double value_of(const Taylor<N>& x) {
  return x.c[0];
}

using Taylor3 = Taylor<3>;

}  // namespace beltrami

namespace Eigen {

template <int N>
struct NumTraits<beltrami::Taylor<N>> : NumTraits<double> {
  using Real = beltrami::Taylor<N>;
  using NonInteger = beltrami::Taylor<N>;
  using Nested = beltrami::Taylor<N>;
  using Literal = double;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 10
  };
};

template <int N, typename BinaryOp>
struct ScalarBinaryOpTraits<beltrami::Taylor<N>, double, BinaryOp> {
  using ReturnType = beltrami::Taylor<N>;
};
template <int N, typename BinaryOp>
struct ScalarBinaryOpTraits<double, beltrami::Taylor<N>, BinaryOp> {
  using ReturnType = beltrami::Taylor<N>;
};

}  // namespace Eigen
