#include "beltrami/surface_geometry.hpp"

#include "beltrami/metric_core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

namespace beltrami {

namespace {

Vec cross(const Vec& a, const Vec& b) {
  const Eigen::Vector3d c = Eigen::Vector3d(a).cross(Eigen::Vector3d(b));
  return Vec(c);
}

// Five-point first derivative of f along direction `dir` at step h.
template <typename F>
Vec d1(const F& f, const Vec& uv, const Vec& dir, double h) {
  return ((f(uv - 2 * h * dir) - f(uv + 2 * h * dir)) +
          8.0 * (f(uv + h * dir) - f(uv - h * dir))) /
         (12.0 * h);
}

template <typename F>
Vec d2(const F& f, const Vec& uv, const Vec& dir, double h) {
  return (-(f(uv + 2 * h * dir) + f(uv - 2 * h * dir)) +
          16.0 * (f(uv + h * dir) + f(uv - h * dir)) - 30.0 * f(uv)) /
         (12.0 * h * h);
}

Vec unit(int i) {
  Vec e = Vec::Zero(2);
  e(i) = 1.0;
  return e;
}

struct ShapeCore {
  Mat g;
  Mat T;
  Mat I;
  Vec N;
  Mat II;
  Christoffel gamma;
};

Vec unit_normal(const Mat& g, const Mat& t) {
  const Vec nu = cross(t.col(0), t.col(1));
  const Vec n = g.ldlt().solve(nu);
  return n / std::sqrt(nu.dot(n));
}

ShapeCore shape_core(const SurfaceJet& j, const ChartMetric& ambient) {
  ShapeCore c;
  c.g = ambient.value(j.x);
  c.T = j.tangent();
  c.I = c.T.transpose() * c.g * c.T;
  if (!(c.I.determinant() >= kMinGramDeterminant)) {
    std::ostringstream os;
    os << "surface is irregular at x = (" << j.x.transpose() << ")";
    throw MetricError(os.str());
  }
  c.N = unit_normal(c.g, c.T);
  c.gamma = christoffel(ambient, j.x);
  const Vec* second[2][2] = {{&j.xuu, &j.xuv}, {&j.xuv, &j.xvv}};
  c.II.resize(2, 2);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const Vec cov = *second[a][b] + c.gamma.contract(c.T.col(a), c.T.col(b));
      c.II(a, b) = c.N.dot(c.g * cov);
    }
  }
  c.II = 0.5 * (c.II + c.II.transpose()).eval();
  return c;
}

double param_margin(const SurfacePatch& s, const Vec& uv) { return s.param().margin(uv); }

double jet_margin(const SurfacePatch& s) { return s.analytic() ? 0.0 : 2.0 * s.step(); }

}  // namespace

Mat SurfaceJet::tangent() const {
  Mat t(xu.size(), 2);
  t.col(0) = xu;
  t.col(1) = xv;
  return t;
}

SurfacePatch::SurfacePatch(std::string name, Domain param, ValueFn value, double step)
    : name_(std::move(name)), param_(std::move(param)), value_(std::move(value)), step_(step) {
  if (param_.dim() != 2) throw InputError("surface parameter domain must be 2-D");
}

SurfaceJet SurfacePatch::jet(const Vec& uv) const {
  SurfaceJet j;
  if (jet_) {
    if (!param_.contains(uv)) throw DomainError("surface parameter outside the patch");
    const VecX<Jet> y = jet_(seed_jets(uv));
    const int n = static_cast<int>(y.size());
    j.x.resize(n);
    j.xu.resize(n);
    j.xv.resize(n);
    j.xuu.resize(n);
    j.xuv.resize(n);
    j.xvv.resize(n);
    for (int i = 0; i < n; ++i) {
      j.x(i) = y(i).v;
      j.xu(i) = y(i).partial(0);
      j.xv(i) = y(i).partial(1);
      j.xuu(i) = y(i).partial2(0, 0);
      j.xuv(i) = y(i).partial2(0, 1);
      j.xvv(i) = y(i).partial2(1, 1);
    }
    return j;
  }
  if (param_.margin(uv) < 2.0 * step_) {
    std::ostringstream os;
    os << "surface '" << name_ << "': (" << uv.transpose()
       << ") is too close to the patch boundary for differences";
    throw DomainError(os.str());
  }
  const double h = step_;
  const Vec eu = unit(0), ev = unit(1);
  auto f = [this](const Vec& p) -> Vec { return value_(p); };
  j.x = f(uv);
  j.xu = d1(f, uv, eu, h);
  j.xv = d1(f, uv, ev, h);
  j.xuu = d2(f, uv, eu, h);
  j.xvv = d2(f, uv, ev, h);
  auto fv = [&](const Vec& p) -> Vec { return d1(f, p, ev, h); };
  j.xuv = d1(fv, uv, eu, h);
  return j;
}

ShapeData shape_data(const SurfacePatch& surface, const ChartMetric& ambient,
                     const Vec& uv) {
  ShapeData s;
  s.jet = surface.jet(uv);
  const ShapeCore c = shape_core(s.jet, ambient);
  s.first_form = c.I;
  s.N = c.N;
  s.second_form = c.II;
  s.A = c.I.ldlt().solve(c.II);
  s.H = 0.5 * s.A.trace();

  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(c.II, c.I);
  s.lambda1 = es.eigenvalues()(1);
  s.lambda2 = es.eigenvalues()(0);
  s.umbilic = s.lambda1 - s.lambda2 < kUmbilicTol;
  if (s.umbilic) {
    const Vec xu = c.T.col(0), xv = c.T.col(1);
    s.e1 = xu / std::sqrt(xu.dot(c.g * xu));
    const Vec w = xv - s.e1.dot(c.g * xv) * s.e1;
    s.e2 = w / std::sqrt(w.dot(c.g * w));
  } else {
    s.e1 = c.T * es.eigenvectors().col(1);
    s.e2 = c.T * es.eigenvectors().col(0);
  }

  const double h = surface.step();
  if (param_margin(surface, uv) < 2.0 * h + jet_margin(surface)) {
    s.gauss_residual = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  auto normal = [&](const Vec& p) -> Vec {
    const SurfaceJet j = surface.jet(p);
    return unit_normal(ambient.value(j.x), j.tangent());
  };
  double worst = 0.0;
  for (int a = 0; a < 2; ++a) {
    const Vec dn = d1(normal, uv, unit(a), h);
    const Vec cov = dn + c.gamma.contract(c.T.col(a), c.N);
    for (int b = 0; b < 2; ++b) {
      worst = std::max(worst, std::abs(c.II(a, b) + c.T.col(b).dot(c.g * cov)));
    }
  }
  s.gauss_residual = worst;
  return s;
}

Vec TwoMetricSplit::xbar(const Vec& v, const Vec& w) const {
  Vec r(Xbar.size());
  for (size_t k = 0; k < Xbar.size(); ++k) r(static_cast<int>(k)) = v.dot(Xbar[k] * w);
  return r;
}

namespace {

TwoMetricSplit split_at(const SurfaceJet& j, const ChartMetric& g_bar,
                        const ChartMetric& g_tilde_bar) {
  TwoMetricSplit s;
  const Mat gb = g_bar.value(j.x);
  const Mat gt = g_tilde_bar.value(j.x);
  if (!is_positive_definite(gb) || !is_positive_definite(gt)) {
    throw MetricError("two_metric_split: ambient metric is not positive-definite");
  }
  s.sigma = gb.ldlt().solve(gt);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(gt, gb);
  s.sigma_eigenvalues = es.eigenvalues();
  s.s = es.eigenvectors();
  if (!(s.sigma_eigenvalues.minCoeff() > 0.0)) {
    throw MetricError("two_metric_split: σ is singular");
  }
  const Mat t = j.tangent();
  s.N = unit_normal(gb, t);
  const Vec si_n = gt.ldlt().solve(gb * s.N);
  s.Ntilde = si_n / std::sqrt(s.N.dot(gb * si_n));
  s.phi = s.N.dot(gb * s.Ntilde);
  s.Nt = s.Ntilde - s.phi * s.N;
  const Christoffel cb = christoffel(g_bar, j.x);
  const Christoffel ct = christoffel(g_tilde_bar, j.x);
  s.Xbar.resize(cb.gamma.size());
  for (size_t k = 0; k < cb.gamma.size(); ++k) s.Xbar[k] = ct.gamma[k] - cb.gamma[k];
  s.normal_residual = (s.Ntilde - unit_normal(gt, t)).cwiseAbs().maxCoeff();
  s.unit_residual = std::abs(s.Ntilde.dot(gt * s.Ntilde) - 1.0);
  return s;
}

}  // namespace

TwoMetricSplit two_metric_split(const SurfacePatch& surface, const ChartMetric& g_bar,
                                const ChartMetric& g_tilde_bar, const Vec& uv) {
  return split_at(surface.jet(uv), g_bar, g_tilde_bar);
}

double divergence_Nt(const SurfacePatch& surface, const ChartMetric& g_bar,
                     const ChartMetric& g_tilde_bar, const Vec& uv, double mesh) {
  if (param_margin(surface, uv) < 2.0 * mesh + jet_margin(surface)) {
    throw DomainError("divergence: mesh does not fit in the patch");
  }
  // √det I times the (xu, xv) components of Ñᵗ.
  auto flux = [&](const Vec& p) -> Vec {
    const SurfaceJet j = surface.jet(p);
    const TwoMetricSplit s = split_at(j, g_bar, g_tilde_bar);
    const Mat t = j.tangent();
    const Mat gb = g_bar.value(j.x);
    const Mat I = t.transpose() * gb * t;
    return std::sqrt(I.determinant()) * I.ldlt().solve(t.transpose() * gb * s.Nt);
  };
  const SurfaceJet j = surface.jet(uv);
  const Mat t = j.tangent();
  const Mat I = t.transpose() * g_bar.value(j.x) * t;
  const double div = d1(flux, uv, unit(0), mesh)(0) + d1(flux, uv, unit(1), mesh)(1);
  return div / std::sqrt(I.determinant());
}

HHtildeReport hhtilde_residual(const SurfacePatch& surface, const ChartMetric& g_bar,
                               const ChartMetric& g_tilde_bar, const Vec& uv) {
  const SurfaceJet j = surface.jet(uv);
  const ShapeCore cb = shape_core(j, g_bar);
  const ShapeCore ct = shape_core(j, g_tilde_bar);
  const TwoMetricSplit s = split_at(j, g_bar, g_tilde_bar);

  HHtildeReport r;
  r.H = 0.5 * cb.I.ldlt().solve(cb.II).trace();
  r.H_tilde = 0.5 * ct.I.ldlt().solve(ct.II).trace();
  r.phi = s.phi;
  r.div_Nt = divergence_Nt(surface, g_bar, g_tilde_bar, uv);
  Mat m(2, 2);
  for (int a = 0; a < 2; ++a) m.col(a) = cb.T.transpose() * cb.g * s.xbar(cb.T.col(a), s.Ntilde);
  r.trace_X = cb.I.ldlt().solve(m).trace();
  r.residual = std::abs(2.0 * r.H_tilde - 2.0 * r.phi * r.H + r.div_Nt + r.trace_X);
  return r;
}

DivNEigenframe divN_eigenframe(const SurfacePatch& surface, const ChartMetric& g_bar,
                               const ChartMetric& g_tilde_bar, const Vec& uv) {
  const ShapeData sd = shape_data(surface, g_bar, uv);
  const Vec& x = sd.jet.x;
  const Mat gb = g_bar.value(x);
  const Mat sigma = gb.ldlt().solve(g_tilde_bar.value(x));

  DivNEigenframe r;
  const Vec frame[3] = {sd.e1, sd.e2, sd.N};
  r.sigma.resize(3);
  for (int i = 0; i < 3; ++i) {
    const Vec& v = frame[i];
    r.sigma(i) = v.dot(gb * sigma * v);
    const Vec res = sigma * v - r.sigma(i) * v;
    r.alignment = std::max(r.alignment, std::sqrt(res.dot(gb * res)));
  }
  if (r.alignment > kAlignmentTol) {
    std::ostringstream os;
    os << "divN_eigenframe: principal frame is not a σ-eigenframe (residual "
       << r.alignment << ")";
    throw PreconditionError(os.str());
  }
  r.lambda1 = sd.lambda1;
  r.lambda2 = sd.lambda2;
  const double s3 = r.sigma(2), rs3 = std::sqrt(s3);
  const VariationSlice slice = sigma_of_variation(local_geometry(g_bar, x), g_tilde_bar.jet(x));
  const double lambda[2] = {r.lambda1, r.lambda2};
  for (int i = 0; i < 2; ++i) {
    Mat nabla = Mat::Zero(3, 3);
    for (int k = 0; k < 3; ++k) nabla += frame[i](k) * slice.nabla_sigma[k];
    r.nabla_sigma_term -= (nabla * sd.N).dot(gb * frame[i]) / (r.sigma(i) * rs3);
    r.lambda_term += rs3 * (1.0 / s3 - 1.0 / r.sigma(i)) * lambda[i];
  }
  r.rhs = r.nabla_sigma_term + r.lambda_term;
  r.coefficient = rs3 * (1.0 / r.sigma(1) - 1.0 / r.sigma(0));
  r.div_numeric = divergence_Nt(surface, g_bar, g_tilde_bar, uv);
  return r;
}

SurfacePatch lemma_comin2_surface(const ChartMetric& ambient, const Vec& p,
                                  const Vec& v1, const Vec& v2, double ell,
                                  double half_width, double step) {
  if (ambient.dim() != 3) throw InputError("lemma surface: ambient must be 3-D");
  const Mat g = ambient.value(p);
  const double err = std::max({std::abs(v1.dot(g * v1) - 1.0), std::abs(v2.dot(g * v2) - 1.0),
                               std::abs(v1.dot(g * v2))});
  if (err > 1e-8) throw InputError("lemma surface: v1, v2 are not ḡ-orthonormal");
  const Vec v3 = unit_normal(g, (Mat(3, 2) << v1, v2).finished());

  auto immersion = [ambient, p, v1, v2, v3, ell, step](const Vec& ab) -> Vec {
    const double a = ab(0), b = ab(1);
    const Vec w = a * v1 + b * v2 + 0.5 * ell * (a * a - b * b) * v3;
    return exp_map(ambient, p, w, step);
  };
  // The stencils reach four mesh steps past the patch.
  const double reach = 4.0 * kSurfaceMeshStep;
  double hw = half_width;
  bool truncated = false;
  for (int attempt = 0;; ++attempt) {
    bool ok = true;
    const double r = hw + reach;
    for (double a : {-r, 0.0, r}) {
      for (double b : {-r, 0.0, r}) {
        Vec ab(2);
        ab << a, b;
        try {
          immersion(ab);
        } catch (const DomainError&) {
          ok = false;
        }
      }
    }
    if (ok) break;
    if (attempt == 6) throw DomainError("lemma surface: no patch fits in the chart");
    hw *= 0.5;
    truncated = true;
  }
  std::ostringstream os;
  os << "comin2(ell=" << ell << ")";
  SurfacePatch s(os.str(), Domain::box(2, hw + reach), immersion);
  s.truncated = truncated;
  return s;
}

LambdaCoefficient lambda1_coefficient(const ChartMetric& g_bar,
                                      const ChartMetric& g_tilde_bar,
                                      const Vec& p, const Vec& v1,
                                      const Vec& v2, double ell_a,
                                      double ell_b) {
  if (ell_a == ell_b) throw InputError("lambda1_coefficient: ell values must differ");
  const Vec o = Vec::Zero(2);
  const auto div_at = [&](double ell) {
    const SurfacePatch s = lemma_comin2_surface(g_bar, p, v1, v2, ell);
    // Checks the eigenframe precondition.
    divN_eigenframe(s, g_bar, g_tilde_bar, o);
    return divergence_Nt(s, g_bar, g_tilde_bar, o);
  };
  const double da = div_at(ell_a), db = div_at(ell_b);

  LambdaCoefficient r;
  const Mat gb = g_bar.value(p);
  const Mat sigma = gb.ldlt().solve(g_tilde_bar.value(p));
  const Vec v3 = unit_normal(gb, (Mat(3, 2) << v1, v2).finished());
  r.sigma = Vec(3);
  r.sigma << v1.dot(gb * sigma * v1), v2.dot(gb * sigma * v2), v3.dot(gb * sigma * v3);
  r.extracted = (da - db) / (ell_a - ell_b);
  r.intercept = da - ell_a * r.extracted;
  r.predicted = std::sqrt(r.sigma(2)) * (1.0 / r.sigma(1) - 1.0 / r.sigma(0));
  return r;
}

}  // namespace beltrami
