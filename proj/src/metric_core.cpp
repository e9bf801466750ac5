#include "beltrami/metric_core.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace beltrami {

namespace {

Mat checked_inverse(const Mat& g, const Vec& x) {
  Eigen::LLT<Mat> llt(g);
  if (!g.allFinite() || llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "metric is not positive-definite at (" << x.transpose() << ")";
    throw MetricError(os.str());
  }
  return llt.solve(Mat::Identity(g.rows(), g.cols()));
}

// Γ from g^{-1} and first partials.
Christoffel christoffel_from(const Mat& g_inv, const std::vector<Mat>& dg) {
  const int n = static_cast<int>(g_inv.rows());
  // Lowered symbols Γ_{l,ij} = ½(∂_i g_lj + ∂_j g_li − ∂_l g_ij).
  std::vector<Mat> lowered(n, Mat::Zero(n, n));
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        lowered[l](i, j) = 0.5 * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
  Christoffel c;
  c.gamma.assign(n, Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) c.gamma[k] += g_inv(k, l) * lowered[l];
  return c;
}

}  // namespace

Vec Christoffel::contract(const Vec& v, const Vec& w) const {
  const int n = dim();
  Vec r(n);
  for (int k = 0; k < n; ++k) r(k) = v.dot(gamma[k] * w);
  return r;
}

double LocalGeometry::norm(const Vec& a) const {
  return std::sqrt(std::max(0.0, inner(a, a)));
}

Christoffel christoffel_from_jets(const MatX<Jet>& jets, int dim) {
  std::vector<Mat> dg(dim, Mat::Zero(dim, dim));
  Mat g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const Jet& e = jets(i, j);
      g(i, j) = e.v;
      if (e.is_constant()) continue;
      for (int k = 0; k < dim; ++k) dg[k](i, j) = e.d(k);
    }
  }
  return christoffel_from(checked_inverse(g, Vec::Zero(dim)), dg);
}

LocalGeometry local_geometry_from_jets(const MatX<Jet>& jets, const Vec& x) {
  const int n = static_cast<int>(x.size());
  Partials p = unpack(jets, n);
  LocalGeometry geo;
  geo.x = x;
  geo.g = p.value;
  geo.g_inv = checked_inverse(p.value, x);
  geo.dg = std::move(p.d);
  geo.ddg = std::move(p.dd);
  geo.christoffel = christoffel_from(geo.g_inv, geo.dg);

  // ∂_m Γ^k_ij = ½ ∂_m g^{kl} S_lij + ½ g^{kl} ∂_m S_lij.
  geo.dchristoffel.resize(n);
  for (int m = 0; m < n; ++m) {
    const Mat dg_inv = -geo.g_inv * geo.dg[m] * geo.g_inv;
    std::vector<Mat> s(n, Mat::Zero(n, n)), ds(n, Mat::Zero(n, n));
    for (int l = 0; l < n; ++l) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          s[l](i, j) =
              0.5 * (geo.dg[i](l, j) + geo.dg[j](l, i) - geo.dg[l](i, j));
          ds[l](i, j) = 0.5 * (geo.ddg[m * n + i](l, j) +
                               geo.ddg[m * n + j](l, i) -
                               geo.ddg[m * n + l](i, j));
        }
      }
    }
    Christoffel d;
    d.gamma.assign(n, Mat::Zero(n, n));
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        d.gamma[k] += dg_inv(k, l) * s[l] + geo.g_inv(k, l) * ds[l];
    geo.dchristoffel[m] = std::move(d);
  }
  return geo;
}

LocalGeometry local_geometry(const ChartMetric& metric, const Vec& x) {
  return local_geometry_from_jets(metric.jet(x), x);
}

Christoffel christoffel(const ChartMetric& metric, const Vec& x) {
  return christoffel_from_jets(metric.jet(x), metric.dim());
}

Vec RiemannTensor::apply(const Vec& u, const Vec& v, const Vec& w) const {
  Vec r = Vec::Zero(n_);
  for (int l = 0; l < n_; ++l)
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k)
          r(l) += (*this)(l, i, j, k) * u(i) * v(j) * w(k);
  return r;
}

RiemannTensor riemann(const LocalGeometry& geo) {
  const int n = geo.dim();
  const auto& G = geo.christoffel;
  const auto& dG = geo.dchristoffel;
  RiemannTensor r(n);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          // Common-sign component, negated below.
          double common = dG[i](l, j, k) - dG[j](l, i, k);
          for (int m = 0; m < n; ++m) {
            common += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
          }
          r(l, i, j, k) = -common;
        }
      }
    }
  }
  return r;
}

double sectional_curvature(const LocalGeometry& geo, const RiemannTensor& r,
                           const Vec& u, const Vec& v) {
  const double uu = geo.inner(u, u), vv = geo.inner(v, v),
               uv = geo.inner(u, v);
  const double area2 = uu * vv - uv * uv;
  if (!(area2 > kDegeneratePlaneTol * uu * vv)) {
    throw DegeneratePlaneError("sectional curvature: u and v are parallel");
  }
  return geo.inner(r.apply(u, v, u), v) / area2;
}

CurvatureData riemann_and_sectional(const ChartMetric& metric, const Vec& x,
                                    const Vec& u, const Vec& v) {
  const LocalGeometry geo = local_geometry(metric, x);
  CurvatureData out;
  out.christoffel = geo.christoffel;
  out.riemann = riemann(geo);
  out.sectional = sectional_curvature(geo, out.riemann, u, v);
  return out;
}

double sectional_curvature(const ChartMetric& metric, const Vec& x,
                           const Vec& u, const Vec& v) {
  return riemann_and_sectional(metric, x, u, v).sectional;
}

GradHessian grad_hessian(const LocalGeometry& geo, const Jet& f) {
  const int n = geo.dim();
  const Jet fj = densify(f, n);
  Vec df(n);
  Mat ddf(n, n);
  for (int i = 0; i < n; ++i) {
    df(i) = fj.d(i);
    for (int j = 0; j < n; ++j) ddf(i, j) = fj.h(i, j);
  }
  GradHessian out;
  out.grad = geo.g_inv * df;
  out.hessian_form = ddf;
  for (int k = 0; k < n; ++k) out.hessian_form -= df(k) * geo.christoffel.gamma[k];
  out.hs = geo.g_inv * out.hessian_form;
  out.laplacian = out.hs.trace();
  return out;
}

GradHessian grad_hessian(const ChartMetric& metric, const ScalarField& f,
                         const Vec& x) {
  metric.require_inside(x);
  if (!f.has_analytic_partials() &&
      metric.domain().margin(x) < 2.0 * f.field().fd().second) {
    throw DomainError(
        "grad_hessian: point too close to the boundary for finite differences");
  }
  return grad_hessian(local_geometry(metric, x), f.jet(x));
}

VariationSlice sigma_of_variation(const LocalGeometry& geo,
                                  const MatX<Jet>& delta_g) {
  const int n = geo.dim();
  const Partials dg = unpack(delta_g, n);
  const double scale = std::max(1.0, dg.value.cwiseAbs().maxCoeff());
  if ((dg.value - dg.value.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InputError("sigma_of_variation: delta_g is not symmetric");
  }
  VariationSlice out;
  out.sigma = geo.g_inv * dg.value;
  out.trace_sigma = out.sigma.trace();
  const Mat gs = geo.g * out.sigma;
  out.self_adjoint_residual = (gs - gs.transpose()).cwiseAbs().maxCoeff();

  out.d_trace_sigma.resize(n);
  out.nabla_sigma.resize(n);
  for (int k = 0; k < n; ++k) {
    const Mat d_sigma =
        -geo.g_inv * geo.dg[k] * geo.g_inv * dg.value + geo.g_inv * dg.d[k];
    out.d_trace_sigma(k) = d_sigma.trace();
    Mat gamma_k(n, n);  // (Γ_k)^i_m = Γ^i_km
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < n; ++m) gamma_k(i, m) = geo.christoffel(i, k, m);
    out.nabla_sigma[k] = d_sigma + gamma_k * out.sigma - out.sigma * gamma_k;
  }
  return out;
}

VariationSlice sigma_of_variation(const ChartMetric& metric,
                                  const TensorField& delta_g, const Vec& x) {
  return sigma_of_variation(local_geometry(metric, x), delta_g.jet(x));
}

}  // namespace beltrami
