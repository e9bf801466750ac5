#include "beltrami/deformation.hpp"

#include "beltrami/parallel.hpp"
#include "beltrami/space_forms.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace beltrami {

namespace {

// Columns form a g-orthonormal frame.
Mat orthonormal_frame(const Mat& g) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw MetricError("metric is not positive-definite");
  const int n = static_cast<int>(g.rows());
  const Mat l = llt.matrixL();
  return l.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
}

// ∇_Z σ for Z = Σ z_m ∂_m.
Mat nabla_along(const std::vector<Mat>& nabla, const Vec& z) {
  Mat r = Mat::Zero(nabla[0].rows(), nabla[0].cols());
  for (size_t m = 0; m < nabla.size(); ++m) r += z(static_cast<int>(m)) * nabla[m];
  return r;
}

struct SampleResult {
  double residual = 0.0;
  double scale = 0.0;
};

CriterionReport finish(const std::vector<Vec>& samples,
                       const std::vector<SampleResult>& per, double tol) {
  CriterionReport r;
  r.tol = tol;
  r.samples = static_cast<int>(samples.size());
  for (size_t i = 0; i < per.size(); ++i) {
    if (per[i].residual > r.residual || r.worst_point.size() == 0) {
      r.residual = std::max(r.residual, per[i].residual);
      r.worst_point = samples[i];
    }
    r.scale = std::max(r.scale, per[i].scale);
  }
  r.relative = r.scale > 0.0 ? r.residual / r.scale : r.residual;
  r.accepted = r.relative <= tol;
  return r;
}

double frame_scale(const ConnectionVariation& cv, const Mat& e) {
  const int n = cv.dim();
  double s = 0.0;
  for (int c = 0; c < n; ++c) {
    const Mat m = e.transpose() * cv.g * nabla_along(cv.slice.nabla_sigma, e.col(c)) * e;
    s = std::max(s, m.cwiseAbs().maxCoeff());
  }
  return s;
}

}  // namespace

Vec ConnectionVariation::apply(const Vec& v, const Vec& w) const {
  const int n = dim();
  Vec r(n);
  for (int k = 0; k < n; ++k) r(k) = v.dot(X[k] * w);
  return r;
}

double ConnectionVariation::trace(const Vec& v) const {
  double t = 0.0;
  for (int k = 0; k < dim(); ++k) t += v.dot(X[k].col(k));
  return t;
}

double ConnectionVariation::koszul_residual() const {
  const int n = dim();
  std::vector<Mat> gn(n);
  for (int m = 0; m < n; ++m) gn[m] = g * slice.nabla_sigma[m];
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vec xij(n);
      for (int k = 0; k < n; ++k) xij(k) = X[k](i, j);
      const Vec lhs = 2.0 * g * xij;
      for (int b = 0; b < n; ++b) {
        const double rhs = gn[i](b, j) + gn[j](b, i) - gn[b](j, i);
        worst = std::max(worst, std::abs(lhs(b) - rhs));
      }
    }
  }
  return worst;
}

ConnectionVariation connection_variation(const DeformationFamily& family,
                                         const Vec& x) {
  const LocalGeometry geo = local_geometry(family.base, x);
  ConnectionVariation cv;
  cv.x = x;
  cv.g = geo.g;
  cv.slice = sigma_of_variation(geo, family.delta_g.jet(x));
  const int n = geo.dim();
  std::vector<Mat> gn(n);
  for (int m = 0; m < n; ++m) gn[m] = geo.g * cv.slice.nabla_sigma[m];
  cv.X.assign(n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vec lowered(n);
      for (int b = 0; b < n; ++b) lowered(b) = gn[i](b, j) + gn[j](b, i) - gn[b](j, i);
      const Vec up = 0.5 * geo.g_inv * lowered;
      for (int k = 0; k < n; ++k) cv.X[k](i, j) = up(k);
    }
  }
  return cv;
}

Vec connection_variation(const DeformationFamily& family, const Vec& x,
                         const Vec& v, const Vec& w) {
  return connection_variation(family, x).apply(v, w);
}

CriterionReport infinitesimal_cogeodesic_test(const DeformationFamily& family,
                                              const std::vector<Vec>& samples,
                                              double tol) {
  std::vector<SampleResult> per(samples.size());
  parallel_for(static_cast<int>(samples.size()), [&](int s) {
    const ConnectionVariation cv = connection_variation(family, samples[s]);
    const int n = cv.dim();
    const Mat e = orthonormal_frame(cv.g);
    const Vec& dtr = cv.slice.d_trace_sigma;
    double worst = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        const Vec v = e.col(a), w = e.col(b);
        const Vec d = cv.apply(v, w) - (dtr.dot(v) * w + dtr.dot(w) * v) / (2.0 * (n + 1));
        worst = std::max(worst, std::sqrt(std::max(0.0, d.dot(cv.g * d))));
      }
    }
    per[s] = {worst, frame_scale(cv, e)};
  });
  return finish(samples, per, tol);
}

CriterionReport alpha_criterion_test(const DeformationFamily& family,
                                     const std::vector<Vec>& samples,
                                     double tol) {
  std::vector<SampleResult> per(samples.size());
  parallel_for(static_cast<int>(samples.size()), [&](int s) {
    const LocalGeometry geo = local_geometry(family.base, samples[s]);
    ConnectionVariation cv;
    cv.g = geo.g;
    cv.slice = sigma_of_variation(geo, family.delta_g.jet(samples[s]));
    const int n = geo.dim();
    std::vector<Mat> nabla_alpha(n);
    for (int m = 0; m < n; ++m) {
      nabla_alpha[m] = cv.slice.nabla_sigma[m] -
                       cv.slice.d_trace_sigma(m) / (n + 1) * Mat::Identity(n, n);
    }
    const Vec dtr_alpha = cv.slice.d_trace_sigma / (n + 1);
    const Mat e = orthonormal_frame(geo.g);
    double worst = 0.0;
    for (int c = 0; c < n; ++c) {
      const Mat m = e.transpose() * geo.g * nabla_along(nabla_alpha, e.col(c)) * e;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          double r = m(b, a);
          if (c == b) r -= 0.5 * dtr_alpha.dot(e.col(a));
          if (c == a) r -= 0.5 * dtr_alpha.dot(e.col(b));
          worst = std::max(worst, std::abs(r));
        }
      }
    }
    per[s] = {worst, frame_scale(cv, e)};
  });
  return finish(samples, per, tol);
}

AlphaTensor::AlphaTensor(DeformationFamily family) : family_(std::move(family)) {}

Mat AlphaTensor::alpha(const Vec& x) const {
  const int n = dim();
  const Mat sigma = family_.base.value(x).ldlt().solve(family_.delta_g.value(x));
  return sigma - sigma.trace() / (n + 1) * Mat::Identity(n, n);
}

MatX<Jet> AlphaTensor::alpha_jets(const Vec& x) const {
  const int n = dim();
  const MatX<Jet> sigma = multiply(inverse(family_.base.jet(x)), family_.delta_g.jet(x));
  const Jet tr = trace(sigma) / static_cast<double>(n + 1);
  MatX<Jet> a = sigma;
  for (int i = 0; i < n; ++i) a(i, i) = a(i, i) - tr;
  return a;
}

double AlphaTensor::trace_alpha(const Vec& x) const { return alpha(x).trace(); }

Mat AlphaTensor::L(double t, const Vec& x) const {
  return Mat::Identity(dim(), dim()) - t * alpha(x);
}

namespace {

void require_positive(const Mat& g, const Mat& l, double t, const Vec& x) {
  const Mat gl = g * l;
  if (!is_positive_definite(0.5 * (gl + gl.transpose()))) {
    std::ostringstream os;
    os << "L(t) is not positive-definite at t = " << t << ", x = ("
       << x.transpose() << ")";
    throw RangeError(os.str());
  }
}

}  // namespace

Mat AlphaTensor::gtilde_value(double t, const Vec& x) const {
  const Mat g = family_.base.value(x);
  const Mat l = L(t, x);
  require_positive(g, l, t, x);
  const Mat gt = g * l.inverse() / l.determinant();
  return 0.5 * (gt + gt.transpose());
}

MatX<Jet> AlphaTensor::gtilde_jets(double t, const Vec& x) const {
  const int n = dim();
  const MatX<Jet> g = family_.base.jet(x);
  const MatX<Jet> a = alpha_jets(x);
  MatX<Jet> l(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) l(i, j) = (i == j ? Jet(1.0) : Jet(0.0)) - a(i, j) * t;
  require_positive(values(g), values(l), t, x);
  const Jet inv_det = Jet(1.0) / determinant(l);
  const MatX<Jet> gl = multiply(g, inverse(l));
  MatX<Jet> r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = (gl(i, j) + gl(j, i)) * 0.5 * inv_det;
  return r;
}

ChartMetric AlphaTensor::gtilde(double t) const {
  const int n = dim();
  auto self = *this;
  TensorField::ValueFn value = [self, t](const Vec& x) { return self.gtilde_value(t, x); };
  TensorField::JetFn jet;
  if (family_.base.has_analytic_partials() && family_.delta_g.has_analytic_partials()) {
    jet = [self, t](const Vec& x) { return self.gtilde_jets(t, x); };
  }
  std::ostringstream os;
  os << family_.name << "/gtilde(" << t << ")";
  return ChartMetric(os.str(), family_.base.domain(),
                     TensorField(n, value, jet, family_.base.field().fd()));
}

double AlphaTensor::t_limit(const std::vector<Vec>& samples) const {
  double rho = 0.0;
  for (const Vec& x : samples) {
    const Mat g = family_.base.value(x);
    const Mat ga = g * alpha(x);
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(0.5 * (ga + ga.transpose()), g,
                                                     Eigen::EigenvaluesOnly);
    rho = std::max(rho, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return rho > 0.0 ? 1.0 / rho : std::numeric_limits<double>::infinity();
}

AlphaTensor build_projective_family(const DeformationFamily& family) {
  return AlphaTensor(family);
}

std::vector<Vec> sample_domain(const Domain& domain, SplitMix64& rng, int count,
                               double shrink) {
  const Vec mid = 0.5 * (domain.lower + domain.upper);
  const Vec half = 0.5 * shrink * (domain.upper - domain.lower);
  std::vector<Vec> pts;
  pts.reserve(count);
  while (static_cast<int>(pts.size()) < count) {
    Vec x = mid;
    for (int i = 0; i < x.size(); ++i) x(i) += rng.uniform(-half(i), half(i));
    if (domain.ball_radius > 0.0 && x.norm() >= shrink * domain.ball_radius) continue;
    pts.push_back(x);
  }
  return pts;
}

std::vector<TangentPlane> random_planes(const Domain& domain, SplitMix64& rng,
                                        int count, double shrink) {
  std::vector<TangentPlane> planes;
  for (const Vec& x : sample_domain(domain, rng, count, shrink)) {
    const int n = static_cast<int>(x.size());
    planes.push_back({x, rng.normal_vec(n), rng.normal_vec(n)});
  }
  return planes;
}

namespace {

constexpr double kCurvatureRoundoff = 1e-13;

}  // namespace

DeltaCurvature delta_curvature(const DeformationFamily& family,
                               const std::vector<TangentPlane>& planes,
                               double t_step) {
  if (!(t_step > 0.0)) throw InputError("delta_curvature: t_step must be > 0");
  const int m = static_cast<int>(planes.size());
  std::vector<double> dk(m), corr(m), kmag(m);
  const ChartMetric plus = family.at(t_step), minus = family.at(-t_step);
  const ChartMetric plus2 = family.at(0.5 * t_step), minus2 = family.at(-0.5 * t_step);
  parallel_for(m, [&](int i) {
    const TangentPlane& p = planes[i];
    const double kp = sectional_curvature(plus, p.x, p.u, p.v);
    const double km = sectional_curvature(minus, p.x, p.u, p.v);
    const double kp2 = sectional_curvature(plus2, p.x, p.u, p.v);
    const double km2 = sectional_curvature(minus2, p.x, p.u, p.v);
    const double d1 = (kp - km) / (2.0 * t_step);
    const double d2 = (kp2 - km2) / t_step;
    dk[i] = (4.0 * d2 - d1) / 3.0;
    corr[i] = std::abs(dk[i] - d2);
    kmag[i] = std::max({1.0, std::abs(kp), std::abs(km)});
  });
  DeltaCurvature r;
  r.t_step = t_step;
  r.delta_k = dk;
  if (m == 0) return r;
  r.min = *std::min_element(dk.begin(), dk.end());
  r.max = *std::max_element(dk.begin(), dk.end());
  r.spread = r.max - r.min;
  double sum = 0.0, kmax = 1.0;
  for (int i = 0; i < m; ++i) {
    sum += dk[i];
    r.richardson_correction = std::max(r.richardson_correction, corr[i]);
    kmax = std::max(kmax, kmag[i]);
  }
  r.mean = sum / m;
  r.noise_floor = r.richardson_correction + 3.0 * kCurvatureRoundoff * kmax / t_step;
  return r;
}

std::vector<Mat> sphere2d_table(const MatX<Jet>& dg, double u) {
  if (std::abs(u) > kSphereBandLimit) {
    std::ostringstream os;
    os << "sphere chart: |u| = " << std::abs(u) << " exceeds " << kSphereBandLimit;
    throw DomainError(os.str());
  }
  const Jet& e = dg(0, 0);
  const Jet& f = dg(0, 1);
  const Jet& g = dg(1, 1);
  const double s = std::sin(u), c = std::cos(u), ta = std::tan(u);
  std::vector<Mat> x(2, Mat::Zero(2, 2));
  x[0](0, 0) = 0.5 * e.partial(0);
  x[0](0, 1) = x[0](1, 0) = 0.5 * e.partial(1) + ta * f.v;
  x[0](1, 1) = f.partial(1) - s * c * e.v - 0.5 * g.partial(0);
  x[1](0, 0) = (f.partial(0) - 0.5 * e.partial(1)) / (c * c);
  x[1](0, 1) = x[1](1, 0) = s / (c * c * c) * g.v + g.partial(0) / (2.0 * c * c);
  x[1](1, 1) = -ta * f.v + g.partial(1) / (2.0 * c * c);
  return x;
}

Sphere2dReport sphere2d_identities(const TensorField& delta_g,
                                   const std::vector<Vec>& samples,
                                   bool assert_tsja) {
  if (delta_g.dim() != 2) throw InputError("sphere2d_identities: δg must be 2-D");
  DeformationFamily fam;
  fam.name = "sphere-uv";
  fam.base = sphere_uv(kSphereBandLimit + 1e-9);
  fam.delta_g = delta_g;

  Sphere2dReport r;
  r.samples = static_cast<int>(samples.size());
  r.identities_evaluated = assert_tsja;
  const int m = r.samples;
  std::vector<double> table(m), ode(m), dk(m);
  std::vector<std::array<double, 4>> tsja(m);
  std::vector<std::array<double, 2>> kij(m);
  parallel_for(m, [&](int i) {
    const Vec& x = samples[i];
    const double u = x(0);
    const MatX<Jet> dg = delta_g.jet(x);
    const std::vector<Mat> tab = sphere2d_table(dg, u);
    const ConnectionVariation cv = connection_variation(fam, x);
    double t = 0.0;
    for (int k = 0; k < 2; ++k) t = std::max(t, (tab[k] - cv.X[k]).cwiseAbs().maxCoeff());
    table[i] = t;
    if (!assert_tsja) return;

    const Jet& e = dg(0, 0);
    const Jet& f = dg(0, 1);
    const Jet& g = dg(1, 1);
    const double s = std::sin(u), c = std::cos(u), ta = std::tan(u);
    const double c2 = c * c, c3 = c2 * c;
    tsja[i] = {
        std::abs(0.5 * e.partial(0) - 2.0 * s / c3 * g.v - g.partial(0) / c2),
        std::abs(2.0 * f.partial(0) - e.partial(1)),
        std::abs(f.partial(1) - s * c * e.v - 0.5 * g.partial(0)),
        std::abs(g.partial(1) / (2.0 * c2) - e.partial(1) - 3.0 * ta * f.v)};
    ode[i] = std::abs(f.v + s * c * f.partial(0) + 0.5 * c2 * f.partial2(0, 0));

    const double x222 = tab[1](1, 1);
    const double d2_x111 = 0.5 * e.partial2(0, 1);
    const double d1_x222 = -f.v / c2 - ta * f.partial(0) +
                           g.partial2(0, 1) / (2.0 * c2) + g.partial(1) * s / c3;
    kij[i] = {std::abs(f.v - (0.5 * d2_x111 - d1_x222 - 0.5 * ta * x222)),
              std::abs(f.v - (0.5 * d1_x222 - d2_x111 - 0.5 * ta * x222))};
    dk[i] = -0.25 * e.partial2(0, 0) - e.v;
  });
  for (int i = 0; i < m; ++i) {
    r.table_residual = std::max(r.table_residual, table[i]);
    if (!assert_tsja) continue;
    for (int k = 0; k < 4; ++k) r.tsja[k] = std::max(r.tsja[k], tsja[i][k]);
    for (int k = 0; k < 2; ++k) r.delta_k_ij[k] = std::max(r.delta_k_ij[k], kij[i][k]);
    r.odedeltaF_residual = std::max(r.odedeltaF_residual, ode[i]);
  }
  if (assert_tsja) {
    r.tsja_residual = *std::max_element(r.tsja.begin(), r.tsja.end());
    r.delta_k = dk;
  }
  return r;
}

DeformationFamily linearized_family(const DeformationFamily& family) {
  DeformationFamily f = family;
  f.name = family.name + "/linearized";
  f.full_curve = nullptr;
  return f;
}

DeformationFamily pullback_family(const std::string& name, const ChartDiffeo& psi,
                                  const DeformationFamily& target,
                                  const Domain& source) {
  DeformationFamily f;
  f.name = name;
  f.base = pullback_metric(psi, target.base, source).renamed(name);
  f.delta_g = pullback_field(psi, target.delta_g);
  f.full_curve = [psi, target, source](double t) {
    return pullback_metric(psi, target.at(t), source);
  };
  f.t_max = target.t_max;
  return f;
}

DeformationFamily zero_family(int n) {
  DeformationFamily f;
  f.name = "zero-" + std::to_string(n);
  f.base = euclidean(n, 1.0);
  f.delta_g = TensorField::constant(Mat::Zero(n, n));
  const ChartMetric base = f.base;
  f.full_curve = [base](double) { return base; };
  return f;
}

DeformationFamily homothety_family(int n, double c) {
  DeformationFamily f;
  f.name = "homothety-" + std::to_string(n);
  f.base = euclidean(n, 1.0);
  f.delta_g = TensorField::constant(2.0 * c * Mat::Identity(n, n));
  const Domain d = f.base.domain();
  f.full_curve = [n, c, d](double t) {
    return ChartMetric("homothety", d,
                       TensorField::constant((1.0 + 2.0 * c * t) * Mat::Identity(n, n)));
  };
  f.t_max = c != 0.0 ? 1.0 / (2.0 * std::abs(c)) : 1.0;
  return f;
}

DeformationFamily shear_family() {
  DeformationFamily f;
  f.name = "shear-2";
  f.base = euclidean(2, 1.0);
  f.delta_g = TensorField::from_generic(2, [](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    MatX<S> m = MatX<S>::Zero(2, 2);
    m(1, 1) = x(0);
    return m;
  });
  return f;
}

DeformationFamily conformal_family() {
  DeformationFamily f;
  f.name = "conformal-2";
  f.base = euclidean(2, 1.0);
  f.delta_g = TensorField::from_generic(2, [](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    MatX<S> m = MatX<S>::Zero(2, 2);
    m(0, 0) = m(1, 1) = 2.0 * x(0);
    return m;
  });
  const Domain d = f.base.domain();
  f.full_curve = [d](double t) {
    return ChartMetric("conformal", d, TensorField::from_generic(2, [t](const auto& x) {
                         using S = typename std::decay_t<decltype(x)>::Scalar;
                         const S e = exp(2.0 * t * x(0));
                         MatX<S> m = MatX<S>::Zero(2, 2);
                         m(0, 0) = m(1, 1) = e;
                         return m;
                       }));
  };
  return f;
}

DeformationFamily projective_family(const Vec& a) {
  const int n = static_cast<int>(a.size());
  DeformationFamily f;
  f.name = "projective-" + std::to_string(n);
  f.base = euclidean(n, 1.0);
  f.delta_g = TensorField::from_generic(n, [a, n](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    const S ax = dot(lift<S>(a), VecX<S>(x));
    MatX<S> m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) = (i == j ? -2.0 * ax : S(0.0)) - a(i) * x(j) - x(i) * a(j);
    return m;
  });
  const Domain d = f.base.domain();
  f.full_curve = [a, n, d](double t) {
    return ChartMetric("projective", d, TensorField::from_generic(n, [a, n, t](const auto& x) {
                         using S = typename std::decay_t<decltype(x)>::Scalar;
                         const S q = S(1.0) + t * dot(lift<S>(a), VecX<S>(x));
                         MatX<S> j(n, n);
                         for (int i = 0; i < n; ++i)
                           for (int k = 0; k < n; ++k)
                             j(i, k) = (i == k ? S(1.0) / q : S(0.0)) - t * x(i) * a(k) / (q * q);
                         return multiply(MatX<S>(j.transpose()), j);
                       }));
  };
  f.t_max = 1.0 / a.lpNorm<1>();
  return f;
}

DeformationFamily sphere_pullback_family() {
  // Stereographic to central-projection coordinates, y = x/(1 − |x|²/4).
  const ChartDiffeo psi =
      ChartDiffeo::from_generic("stereo-to-gnomonic", 2,
                                [](const auto& x) {
                                  using S = typename std::decay_t<decltype(x)>::Scalar;
                                  const S q = S(1.0) - 0.25 * squared_norm(VecX<S>(x));
                                  VecX<S> y = x;
                                  for (int i = 0; i < y.size(); ++i) y(i) = y(i) / q;
                                  return y;
                                })
          .with_jacobian([](const auto& x) {
            using S = typename std::decay_t<decltype(x)>::Scalar;
            const S q = S(1.0) - 0.25 * squared_norm(VecX<S>(x));
            MatX<S> j(2, 2);
            for (int i = 0; i < 2; ++i)
              for (int k = 0; k < 2; ++k)
                j(i, k) = (i == k ? S(1.0) / q : S(0.0)) + x(i) * x(k) / (2.0 * q * q);
            return j;
          });
  return pullback_family("sphere-pullback-2", psi, gnomonic_family(2, 1.0, 2.0),
                         Domain::box(2, 0.8));
}

DeformationFamily sphere_uv_gnomonic_family() {
  // (u, v) ↦ (tan v, tan u / cos v), central projection onto the plane
  // tangent at u = v = 0.
  const ChartDiffeo psi =
      ChartDiffeo::from_generic("uv-to-gnomonic", 2,
                                [](const auto& x) {
                                  using S = typename std::decay_t<decltype(x)>::Scalar;
                                  VecX<S> y(2);
                                  y(0) = tan(x(1));
                                  y(1) = tan(x(0)) / cos(x(1));
                                  return y;
                                })
          .with_jacobian([](const auto& x) {
            using S = typename std::decay_t<decltype(x)>::Scalar;
            const S cu = cos(x(0)), cv = cos(x(1));
            MatX<S> j(2, 2);
            j(0, 0) = S(0.0);
            j(0, 1) = S(1.0) / (cv * cv);
            j(1, 0) = S(1.0) / (cu * cu * cv);
            j(1, 1) = tan(x(0)) * sin(x(1)) / (cv * cv);
            return j;
          });
  return pullback_family("sphere-uv-gnomonic", psi, gnomonic_family(2, 1.0, 4.0),
                         Domain::box(2, 1.05));
}

std::vector<DeformationFixture> deformation_fixtures() {
  Vec a(2);
  a << 0.3, -0.2;
  DeformationFamily hyper = gnomonic_family(3, -1.0, 0.5);
  hyper.name = "gnomonic-hyperbolic-3";
  DeformationFamily g2 = gnomonic_family(2);
  g2.name = "gnomonic-2";
  DeformationFamily g3 = gnomonic_family(3);
  g3.name = "gnomonic-3";
  return {
      {zero_family(2), true},
      {homothety_family(2, 0.5), true},
      {g2, true},
      {g3, true},
      {hyper, true},
      {projective_family(a), true},
      {sphere_pullback_family(), true},
      {sphere_uv_gnomonic_family(), true},
      {shear_family(), false},
      {conformal_family(), false},
  };
}

DeformationFixture deformation_fixture(const std::string& name) {
  for (auto& f : deformation_fixtures()) {
    if (f.family.name == name) return f;
  }
  throw InputError("unknown deformation fixture '" + name + "'");
}

}  // namespace beltrami
