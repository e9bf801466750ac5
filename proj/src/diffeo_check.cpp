#include "beltrami/diffeo_check.hpp"

#include "beltrami/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace beltrami {

namespace {

// Eigenvalues of g⁻¹a for symmetric a and positive-definite g, ascending.
Vec relative_eigenvalues(const Mat& a, const Mat& g) {
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(sym, g,
                                                   Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw MetricError("generalized eigenproblem failed");
  }
  return es.eigenvalues();
}

void finish(TrialReport& r) {
  r.trials = static_cast<int>(r.per_trial.size());
  r.residual = 0.0;
  for (int i = 0; i < r.trials; ++i) {
    const double v = r.per_trial[i];
    if (std::isnan(v)) {
      ++r.rejected;
      continue;
    }
    if (r.worst_trial < 0 || v > r.residual) {
      r.residual = v;
      r.worst_trial = i;
    }
  }
}

Vec g_normalize(const Mat& g, const Vec& v) {
  const double len = std::sqrt(v.dot(g * v));
  if (!(len > 0.0)) throw InputError("zero vector cannot be normalised");
  return v / len;
}

}  // namespace

ConformalFactor conformal_test(const ChartMetric& g, const ChartMetric& g2,
                               const std::vector<Vec>& sample, double tol) {
  if (g.dim() != g2.dim()) throw InputError("conformal_test: dimension mismatch");
  ConformalFactor out;
  out.conformal = true;
  for (const Vec& x : sample) {
    const Vec ev = relative_eigenvalues(g2.value(x), g.value(x));
    const double lo = ev.minCoeff(), hi = ev.maxCoeff(), mean = ev.mean();
    if (!(lo > 0.0)) throw MetricError("conformal_test: g2 is not positive-definite");
    const double spread = (hi - lo) / mean;
    out.phi.push_back(0.5 * std::log(mean));
    if (out.worst_point.size() == 0 || spread > out.residual) {
      out.residual = spread;
      out.worst_point = x;
    }
    out.anisotropy = std::max(out.anisotropy, hi / lo);
  }
  out.conformal = out.residual <= tol;
  return out;
}

TrialReport cogeodesic_test(const ChartMetric& g, const ChartMetric& g2,
                            const std::vector<GeodesicTrial>& trials,
                            double step) {
  TrialReport r;
  r.per_trial.assign(trials.size(), 0.0);
  std::vector<double> k2(trials.size(), 0.0);
  parallel_for(static_cast<int>(trials.size()), [&](int i) {
    const GeodesicTrial& tr = trials[i];
    const GeodesicPath path = integrate_geodesic(g2, tr.p, tr.v, tr.length, step);
    if (path.truncated || path.samples.size() < 2) {
      r.per_trial[i] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    const FrenetProfile f = frenet_curvatures(g, g2, path);
    r.per_trial[i] = f.k1_max;
    k2[i] = path.speed_drift(g2);
  });
  finish(r);
  for (double d : k2) r.secondary = std::max(r.secondary, d);
  return r;
}

std::vector<CircleTrial> random_circle_trials(const ChartMetric& g,
                                              SplitMix64& rng, int count,
                                              const Vec& lo, const Vec& hi,
                                              double k1_lo, double k1_hi,
                                              double arc) {
  const int n = g.dim();
  std::vector<CircleTrial> out;
  for (int i = 0; i < count; ++i) {
    CircleTrial c;
    c.p.resize(n);
    for (int k = 0; k < n; ++k) c.p(k) = rng.uniform(lo(k), hi(k));
    const Mat gp = g.value(c.p);
    c.t0 = g_normalize(gp, rng.normal_vec(n));
    Vec e = rng.normal_vec(n);
    e -= c.t0.dot(gp * e) * c.t0;
    c.e0 = g_normalize(gp, e);
    c.k1 = rng.uniform(k1_lo, k1_hi);
    c.length = arc;
    out.push_back(c);
  }
  return out;
}

TrialReport concircular_test(const ChartMetric& g, const ChartDiffeo& psi,
                             const ChartMetric& target,
                             const std::vector<CircleTrial>& trials,
                             double step, int stride) {
  TrialReport r;
  r.per_trial.assign(trials.size(), 0.0);
  std::vector<double> k2(trials.size(), 0.0);
  parallel_for(static_cast<int>(trials.size()), [&](int i) {
    const CircleTrial& c = trials[i];
    const auto jets =
        integrate_geodesic_circle(g, c.p, c.t0, c.e0, c.k1, c.length, step, stride);
    const int expected =
        static_cast<int>(std::ceil(c.length / step - 1e-9)) / std::max(1, stride);
    if (static_cast<int>(jets.size()) < std::max(4, expected)) {
      r.per_trial[i] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    std::vector<CurveJet> image;
    image.reserve(jets.size());
    for (const auto& j : jets) image.push_back(curve_jet(psi.apply(taylor_curve(j))));
    try {
      const FrenetProfile f = frenet_curvatures(target, image);
      r.per_trial[i] = f.k1_stdev;
      k2[i] = f.k2_max_abs;
    } catch (const DomainError&) {
      r.per_trial[i] = std::numeric_limits<double>::quiet_NaN();
    }
  });
  finish(r);
  for (size_t i = 0; i < k2.size(); ++i) {
    if (!std::isnan(r.per_trial[i])) r.secondary = std::max(r.secondary, k2[i]);
  }
  return r;
}

SphereFit fit_sphere(const std::vector<Vec>& points) {
  SphereFit fit;
  if (points.empty()) return fit;
  const int n = static_cast<int>(points[0].size());
  const int m = static_cast<int>(points.size());
  if (m < n + 2) return fit;
  Vec mean = Vec::Zero(n);
  for (const Vec& y : points) mean += y;
  mean /= m;
  double scale = 0.0;
  for (const Vec& y : points) scale = std::max(scale, (y - mean).norm());
  if (!(scale > 0.0)) return fit;

  // Centred and scaled coordinates keep the normal equations well posed for
  // small spheres far from the origin.
  Mat a(m, n + 1);
  Vec b(m);
  for (int i = 0; i < m; ++i) {
    const Vec z = (points[i] - mean) / scale;
    a.row(i).head(n) = 2.0 * z.transpose();
    a(i, n) = -1.0;
    b(i) = z.squaredNorm();
  }
  Eigen::ColPivHouseholderQR<Mat> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < n + 1) return fit;
  const Vec sol = qr.solve(b);
  const Vec c = sol.head(n);
  const double rho2 = c.squaredNorm() - sol(n);
  if (!(rho2 > 0.0)) return fit;
  fit.center = mean + scale * c;
  fit.radius = scale * std::sqrt(rho2);
  double ss = 0.0;
  for (const Vec& y : points) {
    const double d = (y - fit.center).norm() - fit.radius;
    ss += d * d;
  }
  fit.rms_residual = std::sqrt(ss / m);
  fit.ok = true;
  return fit;
}

std::vector<Vec> unit_directions(int n, int count) {
  const int half = std::max(1, (count + 1) / 2);
  std::vector<Vec> out;
  if (n == 2) {
    for (int k = 0; k < 2 * half; ++k) {
      const double th = std::numbers::pi * k / half;
      Vec v(2);
      v << std::cos(th), std::sin(th);
      out.push_back(v);
    }
    return out;
  }
  std::vector<Vec> base;
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < half; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / half;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vec v(3);
      v << r * std::cos(golden * k), r * std::sin(golden * k), z;
      base.push_back(v);
    }
  } else {
    SplitMix64 rng(0x5EEDD1C5ULL);
    for (int k = 0; k < half; ++k) base.push_back(rng.normal_vec(n).normalized());
  }
  for (const Vec& v : base) out.push_back(v);
  for (const Vec& v : base) out.push_back(-v);
  return out;
}

TrialReport cospherical_test(const ChartMetric& g, const ChartDiffeo& psi,
                             const SpaceFormModel& target,
                             const std::vector<SphereTrial>& trials,
                             int directions, double step) {
  const int n = g.dim();
  if (psi.dim() != n || target.dim != n) {
    throw InputError("cospherical_test: dimension mismatch");
  }
  const std::vector<Vec> dirs = unit_directions(n, directions);
  TrialReport r;
  r.per_trial.assign(trials.size(), 0.0);
  std::vector<double> rel(trials.size(), 0.0);
  parallel_for(static_cast<int>(trials.size()), [&](int i) {
    const SphereSample s = geodesic_sphere_sample(g, trials[i].p, trials[i].r, dirs, step);
    if (!s.omitted.empty()) {
      r.per_trial[i] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    std::vector<Vec> image;
    for (const Vec& y : s.points) {
      const Vec z = psi.apply(y);
      if (!target.chart.domain().contains(z)) {
        r.per_trial[i] = std::numeric_limits<double>::quiet_NaN();
        return;
      }
      image.push_back(z);
    }
    const SphereFit fit = fit_sphere(image);
    if (!fit.ok) {
      r.per_trial[i] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    r.per_trial[i] = fit.rms_residual;
    rel[i] = fit.rms_residual / fit.radius;
  });
  finish(r);
  for (size_t i = 0; i < rel.size(); ++i) {
    if (!std::isnan(r.per_trial[i])) r.secondary = std::max(r.secondary, rel[i]);
  }
  return r;
}

HessianCondition hessian_condition_test(const ScalarField& phi,
                                        const ChartMetric& g,
                                        const std::vector<Vec>& sample) {
  HessianCondition out;
  const int n = g.dim();
  for (const Vec& x : sample) {
    const LocalGeometry geo = local_geometry(g, x);
    const GradHessian gh = grad_hessian(g, phi, x);
    const Vec dphi = geo.g * gh.grad;
    const Mat m = gh.hessian_form - dphi * dphi.transpose();
    const Vec ev = relative_eigenvalues(m, geo.g);
    const double spread = ev.maxCoeff() - ev.minCoeff();
    const double mu = ev.sum() / n;
    out.mu.push_back(mu);
    out.traceless_norm =
        std::max(out.traceless_norm, (ev.array() - mu).abs().maxCoeff());
    if (out.worst_point.size() == 0 || spread > out.residual1) {
      out.residual1 = spread;
      out.worst_point = x;
    }

    const Jet h = exp(-phi.jet(x));
    const GradHessian hh = grad_hessian(geo, h);
    const Vec eh = relative_eigenvalues(hh.hessian_form, geo.g);
    out.residual2 = std::max(out.residual2, eh.maxCoeff() - eh.minCoeff());
  }
  return out;
}

namespace {

// Neville extrapolation of values y_i at abscissae x_i to x = 0.
Vec extrapolate_to_zero(const std::vector<double>& x, std::vector<Vec> y) {
  const int m = static_cast<int>(x.size());
  for (int k = 1; k < m; ++k) {
    for (int i = 0; i < m - k; ++i) {
      y[i] = (x[i + k] * y[i] - x[i] * y[i + 1]) / (x[i + k] - x[i]);
    }
  }
  return y[0];
}

}  // namespace

CenterDrift sphere_center_drift(const ScalarField& phi, const Domain& domain,
                                const Vec& p, const std::vector<double>& t_list,
                                int directions, double step) {
  if (t_list.size() < 2) throw InputError("sphere_center_drift: need at least two t");
  const int n = domain.dim();
  const ChartMetric g = conformal_metric("e^{2phi}delta", phi, domain);
  const std::vector<Vec> dirs = unit_directions(n, directions);
  CenterDrift out;
  const Jet pj = densify(phi.jet(p), n);
  out.grad_phi = Vec(n);
  for (int k = 0; k < n; ++k) out.grad_phi(k) = pj.d(k);

  std::vector<double> x;
  std::vector<Vec> b;
  for (double t : t_list) {
    if (!(t > 0.0)) throw InputError("sphere_center_drift: t must be positive");
    std::vector<Vec> pts;
    for (const Vec& d : dirs) pts.push_back(exp_map(g, p, t * d, step));
    const SphereFit fit = fit_sphere(pts);
    if (!fit.ok) throw InputError("sphere_center_drift: degenerate sphere fit");
    out.t.push_back(t);
    out.centers.push_back(fit.center);
    out.rms.push_back(fit.rms_residual);
    x.push_back(t * t);
    b.push_back(2.0 * (fit.center - p) / (t * t));
  }
  out.b2 = extrapolate_to_zero(x, b);
  out.error = (out.b2 + out.grad_phi).norm();
  return out;
}

}  // namespace beltrami
