#include "beltrami/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace beltrami {

namespace {

std::optional<Christoffel> try_christoffel(const ChartMetric& m, const Vec& x) {
  if (!x.allFinite() || !m.domain().contains(x)) return std::nullopt;
  try {
    return christoffel(m, x);
  } catch (const DomainError&) {
    return std::nullopt;
  } catch (const MetricError&) {
    return std::nullopt;
  }
}

std::optional<LocalGeometry> try_geometry(const ChartMetric& m, const Vec& x) {
  if (!x.allFinite() || !m.domain().contains(x)) return std::nullopt;
  try {
    return local_geometry(m, x);
  } catch (const DomainError&) {
    return std::nullopt;
  } catch (const MetricError&) {
    return std::nullopt;
  }
}

int step_count(double length, double step) {
  if (!(step > 0.0)) throw InputError("integration step must be positive");
  if (!(length >= 0.0)) throw InputError("integration length must be >= 0");
  return std::max(1, static_cast<int>(std::ceil(length / step - 1e-9)));
}

// Σ_m c^m ∂_m Γ(a, b).
Vec dgamma_contract(const LocalGeometry& geo, const Vec& c, const Vec& a,
                    const Vec& b) {
  Vec r = Vec::Zero(geo.dim());
  for (int m = 0; m < geo.dim(); ++m) {
    if (c(m) != 0.0) r += c(m) * geo.dchristoffel[m].contract(a, b);
  }
  return r;
}

}  // namespace

double GeodesicPath::speed_drift(const ChartMetric& metric) const {
  if (samples.empty()) return 0.0;
  auto speed = [&](const GeodesicSample& s) {
    return std::sqrt(s.v.dot(metric.value_unchecked(s.x) * s.v));
  };
  const double s0 = speed(samples.front());
  double worst = 0.0;
  for (const auto& s : samples) worst = std::max(worst, std::abs(speed(s) - s0));
  return s0 > 0.0 ? worst / s0 : worst;
}

GeodesicPath integrate_geodesic(const ChartMetric& metric, const Vec& p,
                                const Vec& v, double length, double step) {
  metric.require_inside(p);
  const int n_steps = step_count(length, step);
  const double h = length / n_steps;
  GeodesicPath path;
  path.metric_name = metric.name();
  path.step = h;
  path.samples.reserve(n_steps + 1);
  path.samples.push_back({0.0, p, v});

  Vec x = p, u = v;
  for (int i = 0; i < n_steps; ++i) {
    auto acc = [&](const Vec& y, const Vec& w) -> std::optional<Vec> {
      auto c = try_christoffel(metric, y);
      if (!c) return std::nullopt;
      return Vec(-c->contract(w, w));
    };
    const auto a1 = acc(x, u);
    if (!a1) break;
    const Vec x2 = x + 0.5 * h * u, u2 = u + 0.5 * h * *a1;
    const auto a2 = acc(x2, u2);
    if (!a2) break;
    const Vec x3 = x + 0.5 * h * u2, u3 = u + 0.5 * h * *a2;
    const auto a3 = acc(x3, u3);
    if (!a3) break;
    const Vec x4 = x + h * u3, u4 = u + h * *a3;
    const auto a4 = acc(x4, u4);
    if (!a4) break;
    const Vec xn = x + (h / 6.0) * (u + 2.0 * u2 + 2.0 * u3 + u4);
    const Vec un = u + (h / 6.0) * (*a1 + 2.0 * *a2 + 2.0 * *a3 + *a4);
    if (!xn.allFinite() || !metric.domain().contains(xn)) break;
    x = xn;
    u = un;
    path.samples.push_back({(i + 1) * h, x, u});
  }
  path.truncated = static_cast<int>(path.samples.size()) != n_steps + 1;
  return path;
}

Vec exp_map(const ChartMetric& metric, const Vec& p, const Vec& v,
            double step) {
  metric.require_inside(p);
  const double speed = std::sqrt(std::max(0.0, v.dot(metric.value(p) * v)));
  const int n = std::max(16, static_cast<int>(std::ceil(speed / step)));
  const GeodesicPath path = integrate_geodesic(metric, p, v, 1.0, 1.0 / n);
  if (path.truncated) {
    std::ostringstream os;
    os << "exp_map: geodesic from (" << p.transpose() << ") leaves the chart of '"
       << metric.name() << "'";
    throw DomainError(os.str());
  }
  return path.back().x;
}

SphereSample geodesic_sphere_sample(const ChartMetric& metric, const Vec& p,
                                    double r, const std::vector<Vec>& directions,
                                    double step) {
  const Mat g = metric.value(p);
  SphereSample out;
  for (size_t i = 0; i < directions.size(); ++i) {
    const Vec& d = directions[i];
    const double len = std::sqrt(d.dot(g * d));
    if (!(len > 0.0)) throw InputError("geodesic_sphere_sample: zero direction");
    const Vec u = d / len;
    try {
      out.points.push_back(exp_map(metric, p, r * u, step));
      out.directions.push_back(u);
    } catch (const DomainError&) {
      out.omitted.push_back(static_cast<int>(i));
    }
  }
  return out;
}

CurveJet curve_jet(const VecX<Taylor3>& c) {
  const int n = static_cast<int>(c.size());
  CurveJet j{Vec(n), Vec(n), Vec(n), Vec(n)};
  for (int i = 0; i < n; ++i) {
    j.x(i) = c(i).derivative(0);
    j.d1(i) = c(i).derivative(1);
    j.d2(i) = c(i).derivative(2);
    j.d3(i) = c(i).derivative(3);
  }
  return j;
}

VecX<Taylor3> taylor_curve(const CurveJet& c) {
  const int n = static_cast<int>(c.x.size());
  VecX<Taylor3> r(n);
  for (int i = 0; i < n; ++i) {
    Taylor3 t;
    t.c = {c.x(i), c.d1(i), c.d2(i) / 2.0, c.d3(i) / 6.0};
    r(i) = t;
  }
  return r;
}

FrenetPoint frenet_at(const LocalGeometry& geo, const CurveJet& c) {
  const auto& G = geo.christoffel;
  const Vec& v = c.d1;
  const double sigma = geo.norm(v);
  if (!(sigma > 0.0)) throw InputError("frenet: curve is not regular");
  const Vec t = v / sigma;
  const Vec a = c.d2 + G.contract(v, v);
  const double at = geo.inner(a, t);
  const Vec a_perp = a - at * t;
  const Vec k = a_perp / (sigma * sigma);  // curvature vector D_s T
  FrenetPoint out;
  out.k1 = geo.norm(k);
  if (out.k1 <= kFrenetEpsilon) return out;

  // b = D_τ a.
  const Vec da = c.d3 + dgamma_contract(geo, v, v, v) + 2.0 * G.contract(c.d2, v);
  const Vec b = da + G.contract(v, a);
  const double ap2 = geo.inner(a_perp, a_perp);
  const Vec d_aperp = b - (geo.inner(b, t) + ap2 / sigma) * t - (at / sigma) * a_perp;
  const double dsigma = at;  // σ′ = g(a, T)
  const Vec dk_tau = d_aperp / (sigma * sigma) -
                     2.0 * dsigma / (sigma * sigma * sigma) * a_perp;
  const Vec dk = dk_tau / sigma;  // D_s of the curvature vector
  const double dk1 = geo.inner(dk, k) / out.k1;
  const Vec de2 = dk / out.k1 - (dk1 / (out.k1 * out.k1)) * k;
  out.k2 = geo.norm(de2 + out.k1 * t);
  out.k2_defined = true;
  return out;
}

FrenetPoint frenet_at(const ChartMetric& metric, const CurveJet& c) {
  return frenet_at(local_geometry(metric, c.x), c);
}

namespace {

FrenetProfile summarize(std::vector<FrenetPoint> pts) {
  FrenetProfile p;
  if (pts.empty()) return p;
  double sum = 0.0;
  for (const auto& f : pts) {
    p.k1.push_back(f.k1);
    p.k2.push_back(f.k2_defined ? f.k2 : std::numeric_limits<double>::quiet_NaN());
    sum += f.k1;
    p.k1_max = std::max(p.k1_max, f.k1);
    if (f.k2_defined) p.k2_max_abs = std::max(p.k2_max_abs, std::abs(f.k2));
  }
  p.k1_mean = sum / pts.size();
  double var = 0.0;
  for (double k : p.k1) var += (k - p.k1_mean) * (k - p.k1_mean);
  p.k1_stdev = std::sqrt(var / pts.size());
  return p;
}

}  // namespace

FrenetProfile frenet_curvatures(const ChartMetric& metric,
                                const std::vector<CurveJet>& curve) {
  std::vector<FrenetPoint> pts;
  pts.reserve(curve.size());
  for (const auto& c : curve) pts.push_back(frenet_at(metric, c));
  return summarize(std::move(pts));
}

FrenetProfile frenet_curvatures(const ChartMetric& metric,
                                const std::vector<Vec>& samples, double dtau) {
  std::vector<FrenetPoint> pts;
  const double h = dtau;
  for (size_t i = 2; i + 2 < samples.size(); ++i) {
    const Vec& m2 = samples[i - 2];
    const Vec& m1 = samples[i - 1];
    const Vec& p1 = samples[i + 1];
    const Vec& p2 = samples[i + 2];
    CurveJet c;
    c.x = samples[i];
    c.d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    c.d2 = (-p2 + 16.0 * p1 - 30.0 * c.x + 16.0 * m1 - m2) / (12.0 * h * h);
    c.d3 = (p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * h * h * h);
    pts.push_back(frenet_at(metric, c));
  }
  return summarize(std::move(pts));
}

CurveJet geodesic_jet(const LocalGeometry& geo, const Vec& v) {
  const auto& G = geo.christoffel;
  CurveJet c;
  c.x = geo.x;
  c.d1 = v;
  c.d2 = -G.contract(v, v);
  c.d3 = -dgamma_contract(geo, v, v, v) - 2.0 * G.contract(c.d2, v);
  return c;
}

FrenetProfile frenet_curvatures(const ChartMetric& metric,
                                const ChartMetric& path_metric,
                                const GeodesicPath& path) {
  std::vector<FrenetPoint> pts;
  pts.reserve(path.samples.size());
  for (const auto& s : path.samples) {
    const CurveJet c = geodesic_jet(local_geometry(path_metric, s.x), s.v);
    pts.push_back(frenet_at(metric, c));
  }
  return summarize(std::move(pts));
}

std::vector<CurveJet> integrate_geodesic_circle(const ChartMetric& metric,
                                                const Vec& p, const Vec& t0,
                                                const Vec& e0, double k1,
                                                double length, double step,
                                                int stride) {
  metric.require_inside(p);
  {
    const Mat g = metric.value(p);
    if (std::abs(t0.dot(g * t0) - 1.0) > 1e-10 ||
        std::abs(e0.dot(g * e0) - 1.0) > 1e-10 || std::abs(t0.dot(g * e0)) > 1e-10) {
      throw InputError("geodesic circle: (t0, e0) must be g-orthonormal");
    }
  }
  const int n_steps = step_count(length, step);
  const double h = length / n_steps;
  stride = std::max(1, stride);

  // State (x, T, E).
  struct State {
    Vec x, t, e;
  };
  auto rhs = [&](const State& s) -> std::optional<State> {
    auto c = try_christoffel(metric, s.x);
    if (!c) return std::nullopt;
    return State{s.t, -c->contract(s.t, s.t) + k1 * s.e,
                 -c->contract(s.t, s.e) - k1 * s.t};
  };
  auto axpy = [](const State& s, double a, const State& d) {
    return State{s.x + a * d.x, s.t + a * d.t, s.e + a * d.e};
  };
  auto jet_of = [&](const State& s) -> std::optional<CurveJet> {
    auto geo = try_geometry(metric, s.x);
    if (!geo) return std::nullopt;
    const auto& G = geo->christoffel;
    CurveJet c;
    c.x = s.x;
    c.d1 = s.t;
    c.d2 = -G.contract(s.t, s.t) + k1 * s.e;
    const Vec de = -G.contract(s.t, s.e) - k1 * s.t;
    c.d3 = -dgamma_contract(*geo, s.t, s.t, s.t) - 2.0 * G.contract(c.d2, s.t) +
           k1 * de;
    return c;
  };

  std::vector<CurveJet> out;
  State s{p, t0, e0};
  if (auto j = jet_of(s)) out.push_back(*j);
  for (int i = 0; i < n_steps; ++i) {
    const auto f1 = rhs(s);
    if (!f1) break;
    const auto f2 = rhs(axpy(s, 0.5 * h, *f1));
    if (!f2) break;
    const auto f3 = rhs(axpy(s, 0.5 * h, *f2));
    if (!f3) break;
    const auto f4 = rhs(axpy(s, h, *f3));
    if (!f4) break;
    State next = s;
    next.x += (h / 6.0) * (f1->x + 2.0 * f2->x + 2.0 * f3->x + f4->x);
    next.t += (h / 6.0) * (f1->t + 2.0 * f2->t + 2.0 * f3->t + f4->t);
    next.e += (h / 6.0) * (f1->e + 2.0 * f2->e + 2.0 * f3->e + f4->e);
    if (!next.x.allFinite() || !metric.domain().contains(next.x)) break;
    s = next;
    if ((i + 1) % stride == 0 || i + 1 == n_steps) {
      auto j = jet_of(s);
      if (!j) break;
      out.push_back(*j);
    }
  }
  return out;
}

JacobiSolution integrate_jacobi(const ChartMetric& metric,
                                const GeodesicPath& path, const Vec& v0,
                                const Vec& dv0) {
  if (path.samples.empty()) throw InputError("integrate_jacobi: empty path");
  const int n = metric.dim();
  const double h = path.step;
  const int n_steps = static_cast<int>(path.samples.size()) - 1;
  const Vec p = path.samples[0].x;
  const Vec u0 = path.samples[0].v;

  // Parallel frame seeded by Gram-Schmidt from γ′(0).
  const Mat g0 = metric.value(p);
  std::vector<Vec> frame0;
  {
    std::vector<Vec> cand{u0};
    for (int i = 0; i < n; ++i) cand.push_back(Vec::Unit(n, i));
    for (const Vec& c : cand) {
      Vec w = c;
      for (const Vec& f : frame0) w -= f.dot(g0 * w) * f;
      const double len = std::sqrt(std::max(0.0, w.dot(g0 * w)));
      if (len > 1e-8) frame0.push_back(w / len);
      if (static_cast<int>(frame0.size()) == n) break;
    }
  }

  // State: x, u = γ′, V, W = D_s V, frame.
  struct State {
    Vec x, u, v, w;
    std::vector<Vec> f;
  };
  auto rhs = [&](const State& s) -> std::optional<State> {
    auto geo = try_geometry(metric, s.x);
    if (!geo) return std::nullopt;
    const auto& G = geo->christoffel;
    const RiemannTensor r = riemann(*geo);
    State d;
    d.x = s.u;
    d.u = -G.contract(s.u, s.u);
    d.v = s.w - G.contract(s.u, s.v);
    d.w = -r.apply(s.u, s.v, s.u) - G.contract(s.u, s.w);
    for (const Vec& e : s.f) d.f.push_back(-G.contract(s.u, e));
    return d;
  };
  auto axpy = [](const State& s, double a, const State& d) {
    State r{s.x + a * d.x, s.u + a * d.u, s.v + a * d.v, s.w + a * d.w, {}};
    for (size_t i = 0; i < s.f.size(); ++i) r.f.push_back(s.f[i] + a * d.f[i]);
    return r;
  };

  JacobiSolution out;
  auto record = [&](const State& s, double arc) {
    const Mat g = metric.value_unchecked(s.x);
    Vec comps(static_cast<int>(s.f.size()));
    for (size_t i = 0; i < s.f.size(); ++i) comps(i) = s.f[i].dot(g * s.v);
    const Vec perp = s.v - (s.u.dot(g * s.v) / s.u.dot(g * s.u)) * s.u;
    out.s.push_back(arc);
    out.v.push_back(s.v);
    out.dv.push_back(s.w);
    out.frame.push_back(comps);
    out.normal_norm.push_back(std::sqrt(std::max(0.0, perp.dot(g * perp))));
  };

  State s{p, u0, v0, dv0, frame0};
  record(s, 0.0);
  for (int i = 0; i < n_steps; ++i) {
    const auto k1 = rhs(s);
    if (!k1) break;
    const auto k2 = rhs(axpy(s, 0.5 * h, *k1));
    if (!k2) break;
    const auto k3 = rhs(axpy(s, 0.5 * h, *k2));
    if (!k3) break;
    const auto k4 = rhs(axpy(s, h, *k3));
    if (!k4) break;
    State next = axpy(axpy(axpy(axpy(s, h / 6.0, *k1), h / 3.0, *k2), h / 3.0, *k3),
                      h / 6.0, *k4);
    if (!next.x.allFinite() || !metric.domain().contains(next.x)) break;
    s = std::move(next);
    record(s, (i + 1) * h);
  }
  out.truncated = static_cast<int>(out.s.size()) != n_steps + 1;
  return out;
}

namespace {

// Hermite cubic through consecutive geodesic samples.
Vec hermite(const GeodesicSample& a, const GeodesicSample& b, double s) {
  const double h = b.s - a.s;
  const double t = (s - a.s) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * a.x + (t3 - 2 * t2 + t) * h * a.v +
         (-2 * t3 + 3 * t2) * b.x + (t3 - t2) * h * b.v;
}

}  // namespace

DeviationResult deviation_phi(const DeformationFamily& family, const Vec& p,
                              const Vec& v, double t, double step) {
  const ChartMetric& g = family.base;
  const Vec target = exp_map(family.at(t), p, v, step);
  const double speed = std::sqrt(v.dot(g.value(p) * v));
  if (!(speed > 0.0)) throw InputError("deviation_phi: zero initial vector");
  const double range = 2.0 * speed;
  const GeodesicPath path = integrate_geodesic(g, p, v / speed, range, step);
  const auto& smp = path.samples;

  auto dist_at = [&](double s) {
    const double h = path.step;
    int i = std::clamp(static_cast<int>(std::floor(s / h)), 0,
                       static_cast<int>(smp.size()) - 2);
    const Vec y = hermite(smp[i], smp[i + 1], s);
    const Vec d = target - y;
    return std::sqrt(std::max(0.0, d.dot(g.value_unchecked(y) * d)));
  };

  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < smp.size(); ++i) {
    const Vec d = target - smp[i].x;
    const double di = std::sqrt(std::max(0.0, d.dot(g.value_unchecked(smp[i].x) * d)));
    if (di < best_d) {
      best_d = di;
      best = static_cast<int>(i);
    }
  }
  const int last = static_cast<int>(smp.size()) - 1;
  double lo = smp[std::max(0, best - 1)].s;
  double hi = smp[std::min(last, best + 1)].s;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - invphi * (hi - lo), b = lo + invphi * (hi - lo);
  double fa = dist_at(a), fb = dist_at(b);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - invphi * (hi - lo);
      fa = dist_at(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + invphi * (hi - lo);
      fb = dist_at(b);
    }
  }
  DeviationResult r;
  r.s_min = 0.5 * (lo + hi);
  r.phi = std::min({dist_at(r.s_min), fa, fb, best_d});
  r.target = target;
  const double tol = path.step;
  r.boundary = path.truncated || r.s_min <= tol || r.s_min >= smp.back().s - tol;
  return r;
}

DeviationOrder deviation_order(const DeformationFamily& family, const Vec& p,
                               const Vec& v, double t, double step) {
  const DeviationResult a = deviation_phi(family, p, v, t, step);
  const DeviationResult b = deviation_phi(family, p, v, 0.5 * t, step);
  DeviationOrder o;
  o.phi_t = a.phi;
  o.phi_half = b.phi;
  o.order = (a.phi > 0.0 && b.phi > 0.0) ? std::log2(a.phi / b.phi) : 0.0;
  o.slope = 4.0 * b.phi / t - a.phi / t;
  o.boundary = a.boundary || b.boundary;
  return o;
}

}  // namespace beltrami
