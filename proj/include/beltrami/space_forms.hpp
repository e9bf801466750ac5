#pragma once

// Constant-curvature chart models and Möbius maps.

#include "beltrami/chart_diffeo.hpp"
#include "beltrami/chart_metric.hpp"
#include "beltrami/family.hpp"

#include <string>

namespace beltrami {

// g_ij = δ_ij / (1 + (C/4)|x|²)².
template <typename S>
MatX<S> riemannian_form_matrix(const VecX<S>& x, double c) {
  const int n = static_cast<int>(x.size());
  const S d = S(1.0) + (c / 4.0) * squared_norm(x);
  const S f = S(1.0) / (d * d);
  MatX<S> g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = i == j ? f : S(0.0);
  return g;
}

// g_ij = δ_ij / (1 + t|x|²) − t x_i x_j / (1 + t|x|²)².
template <typename S, typename T>
MatX<S> gnomonic_matrix(const VecX<S>& x, const T& t) {
  const int n = static_cast<int>(x.size());
  const S q = S(1.0) + t * squared_norm(x);
  const S a = S(1.0) / q;
  const S b = t / (q * q);
  MatX<S> g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = (i == j ? a : S(0.0)) - b * x(i) * x(j);
  return g;
}

// ∂_t of gnomonic_matrix.
template <typename S>
MatX<S> gnomonic_dt_matrix(const VecX<S>& x, double t) {
  const int n = static_cast<int>(x.size());
  const S r2 = squared_norm(x);
  const S q = S(1.0) + t * r2;
  const S q2 = q * q;
  MatX<S> g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const S xx = x(i) * x(j);
      g(i, j) = (i == j ? -r2 / q2 : S(0.0)) - xx / q2 +
                2.0 * t * r2 * xx / (q2 * q);
    }
  }
  return g;
}

// du² + cos²u dv² in coordinates (u, v).
template <typename S>
MatX<S> sphere_uv_matrix(const VecX<S>& x) {
  MatX<S> g(2, 2);
  const S c = cos(x(0));
  g(0, 0) = S(1.0);
  g(0, 1) = S(0.0);
  g(1, 0) = S(0.0);
  g(1, 1) = c * c;
  return g;
}

struct SpaceFormModel {
  double curvature = 0.0;
  int dim = 0;
  ChartMetric chart;
};

inline constexpr double kEuclideanHalfWidth = 100.0;

ChartMetric euclidean(int n, double half_width = kEuclideanHalfWidth);
// For C < 0 the chart is the ball |x| < 2/√(−C); for C > 0 it is guarded to
// |x| < 2/√C.
SpaceFormModel riemannian_form(double c, int n);
// |u| < u_max < π/2, |v| < π.
ChartMetric sphere_uv(double u_max = 1.5);
// Admissible where 1 + t|x|² > 0; t < 0 gives the ball |x| < 1/√(−t).
ChartMetric gnomonic_metric(double t, int n, double half_width = 10.0);
// e^{2φ} δ with a scalar field φ.
ChartMetric conformal_metric(const std::string& name, const ScalarField& phi,
                             const Domain& domain);

// The gnomonic curve t ↦ g⁽ᵗ⁾ around base parameter t0 (t0 = 0 is flat) on
// the box of the given half width.
DeformationFamily gnomonic_family(int n, double t0 = 0.0,
                                  double half_width = 1.0);

// Möbius map in factored form x ↦ λ A y + b where y = x, or y is the
// inversion a + ρ²(x − a)/|x − a|² when `inverts` is set.
class MobiusMap {
 public:
  static MobiusMap similarity(double scale, const Mat& orthogonal,
                              const Vec& shift);
  static MobiusMap inversion(const Vec& center, double radius);

  int dim() const { return static_cast<int>(shift_.size()); }
  bool inverts() const { return inverts_; }
  double scale() const { return scale_; }
  const Mat& orthogonal() const { return a_; }
  const Vec& shift() const { return shift_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }

  template <typename S>
  VecX<S> apply(const VecX<S>& x) const {
    const int n = dim();
    VecX<S> y = x;
    if (inverts_) {
      VecX<S> d(n);
      for (int i = 0; i < n; ++i) d(i) = x(i) - center_(i);
      const S r2 = squared_norm(d);
      if (std::abs(value_of(r2)) < kSingularRadius * kSingularRadius) {
        throw SingularityError("Möbius map evaluated at the inversion center");
      }
      for (int i = 0; i < n; ++i)
        y(i) = center_(i) + radius_ * radius_ * d(i) / r2;
    }
    VecX<S> out(n);
    for (int i = 0; i < n; ++i) {
      S s(shift_(i));
      for (int k = 0; k < n; ++k) s = s + scale_ * a_(i, k) * y(k);
      out(i) = s;
    }
    return out;
  }

  template <typename S>
  MatX<S> jacobian(const VecX<S>& x) const {
    const int n = dim();
    MatX<S> j(n, n);
    if (!inverts_) {
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) j(i, k) = S(scale_ * a_(i, k));
      return j;
    }
    VecX<S> d(n);
    for (int i = 0; i < n; ++i) d(i) = x(i) - center_(i);
    const S r2 = squared_norm(d);
    if (std::abs(value_of(r2)) < kSingularRadius * kSingularRadius) {
      throw SingularityError("Möbius Jacobian at the inversion center");
    }
    const S f = radius_ * radius_ / r2;
    MatX<S> ji(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        ji(i, k) = f * ((i == k ? S(1.0) : S(0.0)) - 2.0 * d(i) * d(k) / r2);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        S s(0.0);
        for (int m = 0; m < n; ++m) s = s + scale_ * a_(i, m) * ji(m, k);
        j(i, k) = s;
      }
    }
    return j;
  }

  Vec operator()(const Vec& x) const { return apply(x); }

  // this ∘ inner, again in factored form.
  MobiusMap compose(const MobiusMap& inner) const;
  MobiusMap inverse() const;

  // e^{2φ(x)} with Ψ*δ = e^{2φ} δ.
  double conformal_factor(const Vec& x) const;

  ChartDiffeo to_diffeo(const std::string& name = "mobius") const;

  static constexpr double kSingularRadius = 1e-6;

 private:
  bool inverts_ = false;
  Vec center_;
  double radius_ = 1.0;
  double scale_ = 1.0;
  Mat a_;
  Vec shift_;
};

// Euclidean metric pulled back through a Möbius map.
ChartMetric mobius_pullback(const MobiusMap& map, const ChartMetric& metric,
                            const Domain& source_domain);

}  // namespace beltrami
