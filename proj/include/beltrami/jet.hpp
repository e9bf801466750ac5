#pragma once

// Second-order forward-mode jets: a value together with its gradient and
// Hessian with respect to up to kMaxJetDim chart coordinates. Every metric,
// map and scalar field in the library is written once, templated on the
// scalar, and instantiated with double (values) or Jet (exact partials).

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <ostream>

namespace beltrami {

inline constexpr int kMaxJetDim = 9;

class Jet {
 public:
  using Grad = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxJetDim, 1>;
  using Hess = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0,
                             kMaxJetDim, kMaxJetDim>;

  double v = 0.0;
  Grad d;  // empty gradient means "constant"
  Hess h;

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  Jet(double value, const Grad& grad, const Hess& hess)
      : v(value), d(grad), h(hess) {}

  // Independent variable number `index` out of `dim`.
  static Jet variable(double value, int index, int dim) {
    Jet j(value);
    j.d = Grad::Zero(dim);
    j.d(index) = 1.0;
    j.h = Hess::Zero(dim, dim);
    return j;
  }

  int dim() const { return static_cast<int>(d.size()); }
  bool is_constant() const { return d.size() == 0; }

  double partial(int k) const { return is_constant() ? 0.0 : d(k); }
  double partial2(int k, int l) const {
    return is_constant() ? 0.0 : h(k, l);
  }

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(const Jet& a, const Jet& b) {
    if (b.is_constant()) return Jet(a.v + b.v, a.d, a.h);
    if (a.is_constant()) return Jet(a.v + b.v, b.d, b.h);
    return Jet(a.v + b.v, a.d + b.d, a.h + b.h);
  }
  friend Jet operator-(const Jet& a) { return Jet(-a.v, -a.d, -a.h); }
  friend Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }
  friend Jet operator*(const Jet& a, const Jet& b) {
    if (b.is_constant()) return Jet(a.v * b.v, a.d * b.v, a.h * b.v);
    if (a.is_constant()) return Jet(a.v * b.v, b.d * a.v, b.h * a.v);
    Hess h = a.h * b.v + b.h * a.v + a.d * b.d.transpose() +
             b.d * a.d.transpose();
    return Jet(a.v * b.v, a.d * b.v + b.d * a.v, h);
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    if (b.is_constant()) return Jet(a.v / b.v, a.d / b.v, a.h / b.v);
    return a * reciprocal(b);
  }

  friend bool operator<(const Jet& a, const Jet& b) { return a.v < b.v; }
  friend bool operator>(const Jet& a, const Jet& b) { return a.v > b.v; }
  friend bool operator<=(const Jet& a, const Jet& b) { return a.v <= b.v; }
  friend bool operator>=(const Jet& a, const Jet& b) { return a.v >= b.v; }
  friend bool operator==(const Jet& a, const Jet& b) { return a.v == b.v; }
  friend bool operator!=(const Jet& a, const Jet& b) { return a.v != b.v; }

  // Chain rule for a scalar function with derivatives f0, f1, f2 at a.v.
  friend Jet apply(const Jet& a, double f0, double f1, double f2) {
    if (a.is_constant()) return Jet(f0);
    return Jet(f0, a.d * f1, a.h * f1 + (a.d * a.d.transpose()) * f2);
  }

  friend Jet reciprocal(const Jet& a) {
    const double r = 1.0 / a.v;
    return apply(a, r, -r * r, 2.0 * r * r * r);
  }

  friend std::ostream& operator<<(std::ostream& os, const Jet& a) {
    return os << a.v;
  }
};

// Keep the double overloads visible next to the jet ones for generic code.
using std::abs;
using std::atan;
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;
using std::tan;

inline Jet sin(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return apply(a, s, c, -s);
}
inline Jet cos(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return apply(a, c, -s, -c);
}
inline Jet tan(const Jet& a) {
  const double t = std::tan(a.v), sec2 = 1.0 + t * t;
  return apply(a, t, sec2, 2.0 * t * sec2);
}
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return apply(a, e, e, e);
}
inline Jet log(const Jet& a) {
  return apply(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}
inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return apply(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet abs(const Jet& a) { return a.v < 0.0 ? -a : a; }
inline Jet pow(const Jet& a, double p) {
  // Exact zeros for the vanishing coefficients keep 0^(negative) out of play.
  const double f1 = p == 0.0 ? 0.0 : p * std::pow(a.v, p - 1.0);
  const double f2 =
      (p == 0.0 || p == 1.0) ? 0.0 : p * (p - 1.0) * std::pow(a.v, p - 2.0);
  return apply(a, std::pow(a.v, p), f1, f2);
}
inline Jet pow(const Jet& a, const Jet& b) {
  if (b.is_constant()) return pow(a, b.v);
  return exp(b * log(a));
}
inline Jet atan(const Jet& a) {
  const double q = 1.0 / (1.0 + a.v * a.v);
  return apply(a, std::atan(a.v), q, -2.0 * a.v * q * q);
}

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }

}  // namespace beltrami

namespace Eigen {

template <>
struct NumTraits<beltrami::Jet> : NumTraits<double> {
  using Real = beltrami::Jet;
  using NonInteger = beltrami::Jet;
  using Nested = beltrami::Jet;
  using Literal = double;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 16,
    MulCost = 32
  };
};

template <typename BinaryOp>
struct ScalarBinaryOpTraits<beltrami::Jet, double, BinaryOp> {
  using ReturnType = beltrami::Jet;
};
template <typename BinaryOp>
struct ScalarBinaryOpTraits<double, beltrami::Jet, BinaryOp> {
  using ReturnType = beltrami::Jet;
};

}  // namespace Eigen
