#pragma once

// Pointwise tensor calculus for chart metrics.
//
// Curvature sign convention: R(V,W)X = ∇_[V,W]X − ∇_V∇_W X + ∇_W∇_V X, the
// negative of the common convention. Sectional curvature is then
//   K(u, v) = g(R(u,v)u, v) / (g(u,u)g(v,v) − g(u,v)²),
// which gives the unit sphere K = +1.

#include "beltrami/chart_metric.hpp"

#include <vector>

namespace beltrami {

// Γ^k_ij stored as gamma[k](i, j).
struct Christoffel {
  std::vector<Mat> gamma;

  int dim() const { return static_cast<int>(gamma.size()); }
  double operator()(int k, int i, int j) const { return gamma[k](i, j); }
  // Vector with components Γ^k_ij v^i w^j.
  Vec contract(const Vec& v, const Vec& w) const;
};

// Everything second-order about a metric at one point.
struct LocalGeometry {
  Vec x;
  Mat g;
  Mat g_inv;
  std::vector<Mat> dg;    // dg[k] = ∂_k g
  std::vector<Mat> ddg;   // ddg[k*n+l] = ∂_k∂_l g
  Christoffel christoffel;
  std::vector<Christoffel> dchristoffel;  // dchristoffel[m] = ∂_m Γ

  int dim() const { return static_cast<int>(x.size()); }
  double inner(const Vec& a, const Vec& b) const { return a.dot(g * b); }
  double norm(const Vec& a) const;
};

// Builds the local geometry from a metric's jets. Throws MetricError when
// g(x) is not symmetric positive-definite.
LocalGeometry local_geometry(const ChartMetric& metric, const Vec& x);
LocalGeometry local_geometry_from_jets(const MatX<Jet>& jets, const Vec& x);

Christoffel christoffel(const ChartMetric& metric, const Vec& x);
// First-order only (cheaper: no Christoffel derivatives).
Christoffel christoffel_from_jets(const MatX<Jet>& jets, int dim);

// Riemann tensor in the library sign convention:
// R(∂_i, ∂_j)∂_k = R^l_ijk ∂_l, stored flat.
class RiemannTensor {
 public:
  explicit RiemannTensor(int dim = 0)
      : n_(dim), data_(static_cast<size_t>(dim) * dim * dim * dim, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int l, int i, int j, int k) {
    return data_[((l * n_ + i) * n_ + j) * n_ + k];
  }
  double operator()(int l, int i, int j, int k) const {
    return data_[((l * n_ + i) * n_ + j) * n_ + k];
  }
  // R(u, v)w.
  Vec apply(const Vec& u, const Vec& v, const Vec& w) const;

 private:
  int n_;
  std::vector<double> data_;
};

RiemannTensor riemann(const LocalGeometry& geo);

double sectional_curvature(const LocalGeometry& geo, const RiemannTensor& r,
                           const Vec& u, const Vec& v);

struct CurvatureData {
  Christoffel christoffel;
  RiemannTensor riemann;
  double sectional = 0.0;
};

// Throws DegeneratePlaneError when u and v are (numerically) parallel.
CurvatureData riemann_and_sectional(const ChartMetric& metric, const Vec& x,
                                    const Vec& u, const Vec& v);
double sectional_curvature(const ChartMetric& metric, const Vec& x,
                           const Vec& u, const Vec& v);

struct GradHessian {
  Vec grad;          // g^{-1} df
  Mat hessian_form;  // Hess_f(∂_i, ∂_j)
  Mat hs;            // Hessian operator Hs_f = g^{-1} Hess_f
  double laplacian = 0.0;
};

GradHessian grad_hessian(const LocalGeometry& geo, const Jet& f);
GradHessian grad_hessian(const ChartMetric& metric, const ScalarField& f,
                         const Vec& x);

// σ with δg = σ⌟g, i.e. δg(V,W) = g(σV,W), together with ∇σ.
struct VariationSlice {
  Mat sigma;
  double trace_sigma = 0.0;
  Vec d_trace_sigma;               // ∂_k trace σ
  std::vector<Mat> nabla_sigma;    // nabla_sigma[k] = ∇_{∂_k} σ (a (1,1)-tensor)
  double self_adjoint_residual = 0.0;
};

VariationSlice sigma_of_variation(const LocalGeometry& geo,
                                  const MatX<Jet>& delta_g);
VariationSlice sigma_of_variation(const ChartMetric& metric,
                                  const TensorField& delta_g, const Vec& x);

// Euclidean-norm based relative degeneracy threshold for 2-planes.
inline constexpr double kDegeneratePlaneTol = 1e-12;

}  // namespace beltrami
