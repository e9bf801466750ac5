#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "beltrami/geodesic.hpp"
#include "beltrami/space_forms.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace beltrami;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

// Distance of y from the line through a with direction d.
double line_distance(const Vec& y, const Vec& a, const Vec& d) {
  const Vec u = d.normalized();
  const Vec w = y - a;
  return (w - w.dot(u) * u).norm();
}

// Great-circle distance between (latitude, longitude) pairs.
double spherical_distance(const Vec& p, const Vec& q) {
  const double c = std::sin(p(0)) * std::sin(q(0)) +
                   std::cos(p(0)) * std::cos(q(0)) * std::cos(p(1) - q(1));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

ChartMetric linear_conformal(const Vec& a) {
  const int n = static_cast<int>(a.size());
  const auto phi = ScalarField::from_generic(n, [a](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    S s(0.0);
    for (int i = 0; i < x.size(); ++i) s = s + a(i) * x(i);
    return s;
  });
  return conformal_metric("linear-conformal", phi, Domain::box(n, 5.0));
}

}  // namespace

TEST_CASE("Euclidean geodesics are straight lines") {
  const ChartMetric e = euclidean(3);
  const Vec p = vec3(0.1, -0.2, 0.3), v = vec3(0.3, 0.5, -0.2);
  const GeodesicPath path = integrate_geodesic(e, p, v, 2.0, 0.01);
  CHECK_FALSE(path.truncated);
  for (const auto& s : path.samples) {
    CHECK((s.x - (p + s.s * v)).norm() < 1e-12);
  }
  CHECK((exp_map(e, p, v) - (p + v)).norm() < 1e-12);
}

TEST_CASE("stereographic sphere chart: radial geodesic") {
  const ChartMetric s = riemannian_form(1.0, 2).chart;
  // Unit speed at the origin; chart radius is 2 tan(s/2).
  const GeodesicPath path = integrate_geodesic(s, Vec::Zero(2), vec2(1, 0), 1.2);
  for (const auto& smp : path.samples) {
    CHECK(std::abs(smp.x(1)) < 1e-14);
    CHECK(std::abs(smp.x(0) - 2.0 * std::tan(smp.s / 2.0)) < 1e-9);
  }
  CHECK(path.speed_drift(s) < 1e-6 * 1.2);
}

TEST_CASE("gnomonic geodesics are chords") {
  const ChartMetric g = gnomonic_metric(0.3, 2);
  const Vec p = vec2(-0.2, 0.1), q = vec2(0.3, -0.2);
  const GeodesicPath path = integrate_geodesic(g, p, q - p, 1.5);
  double worst = 0.0;
  for (const auto& s : path.samples) worst = std::max(worst, line_distance(s.x, p, q - p));
  CHECK(worst < 1e-6);

  const ChartMetric g4 = gnomonic_metric(0.4, 2);
  const GeodesicPath p4 = integrate_geodesic(g4, p, q - p, 3.0);
  worst = 0.0;
  for (const auto& s : p4.samples) worst = std::max(worst, line_distance(s.x, p, q - p));
  CHECK(worst < 1e-6);
}

TEST_CASE("speed is conserved") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (const ChartMetric& g :
       {riemannian_form(1.0, 3).chart, riemannian_form(-1.0, 3).chart,
        gnomonic_metric(0.5, 3), euclidean(3)}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Vec p = vec3(u(rng), u(rng), u(rng));
      const Vec v = vec3(u(rng), u(rng), u(rng));
      const GeodesicPath path = integrate_geodesic(g, p, v, 1.0);
      CHECK(path.speed_drift(g) < 1e-6);
    }
  }
}

TEST_CASE("RK4 step halving") {
  const ChartMetric s = sphere_uv();
  const Vec p = vec2(0.2, 0.1), v = vec2(0.6, 0.9);
  const Vec ref = integrate_geodesic(s, p, v, 1.0, 1e-3).back().x;
  const Vec a = integrate_geodesic(s, p, v, 1.0, 0.1).back().x;
  const Vec b = integrate_geodesic(s, p, v, 1.0, 0.05).back().x;
  const double ratio = (a - ref).norm() / (b - ref).norm();
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("geodesics leaving the chart are truncated") {
  const ChartMetric s = riemannian_form(1.0, 2).chart;
  const GeodesicPath path = integrate_geodesic(s, Vec::Zero(2), vec2(1, 0), 4.0);
  CHECK(path.truncated);
  CHECK(path.back().x.norm() < 2.0);
  CHECK_THROWS_AS(exp_map(s, Vec::Zero(2), vec2(4.0, 0)), DomainError);
}

TEST_CASE("conformal geodesic equation") {
  const Vec a = vec2(0.4, -0.3);
  const ChartMetric g = linear_conformal(a);
  const GeodesicPath path = integrate_geodesic(g, vec2(0.1, 0.2), vec2(0.7, 0.2), 1.0);
  const auto& s = path.samples;
  const double h = path.step;
  double worst = 0.0;
  for (size_t i = 1; i + 1 < s.size(); ++i) {
    const Vec dd = (s[i + 1].x - 2.0 * s[i].x + s[i - 1].x) / (h * h);
    const Vec& v = s[i].v;
    const Vec rhs = v.squaredNorm() * a - 2.0 * a.dot(v) * v;
    worst = std::max(worst, (dd - rhs).norm());
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("exp map Taylor expansion under a linear conformal exponent") {
  const Vec a = vec2(0.4, 0.0);
  const ChartMetric g = linear_conformal(a);
  const Vec p = vec2(0.0, 0.0);
  const Vec v = vec2(0.6, 0.8);
  const Vec b2 = a - 2.0 * a.dot(v) * v;
  const Vec b3 = 2.0 * v.dot(b2) * a - 2.0 * a.dot(b2) * v - 2.0 * a.dot(v) * b2;
  auto err = [&](double t) {
    const Vec y = exp_map(g, p, t * v, 1e-4);
    return (y - (p + t * v + t * t / 2 * b2 + t * t * t / 6 * b3)).norm();
  };
  const double e1 = err(0.2), e2 = err(0.1);
  CHECK(e1 / e2 > 13.0);
  CHECK(e1 / e2 < 19.0);
}

TEST_CASE("geodesic sphere on the sphere chart") {
  const ChartMetric s = sphere_uv();
  std::vector<Vec> dirs;
  for (int k = 0; k < 12; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 12;
    dirs.push_back(vec2(std::cos(th), std::sin(th)));
  }
  const SphereSample smp = geodesic_sphere_sample(s, Vec::Zero(2), 0.5, dirs);
  REQUIRE(smp.points.size() == 12);
  for (const Vec& q : smp.points) {
    CHECK(std::abs(spherical_distance(Vec::Zero(2), q) - 0.5) < 1e-6);
  }
  const SphereSample flat = geodesic_sphere_sample(euclidean(2), vec2(1, 1), 0.5, dirs);
  for (const Vec& q : flat.points) CHECK(std::abs((q - vec2(1, 1)).norm() - 0.5) < 1e-12);

  const SphereSample cut =
      geodesic_sphere_sample(riemannian_form(1.0, 2).chart, vec2(1.5, 0.0), 0.8, dirs);
  CHECK_FALSE(cut.omitted.empty());
  CHECK(cut.points.size() + cut.omitted.size() == 12);
}

TEST_CASE("Frenet curvatures of classical curves") {
  const ChartMetric e2 = euclidean(2);
  const ChartMetric e3 = euclidean(3);
  std::vector<CurveJet> circle, helix;
  const double r = 2.0, hr = 1.5, hc = 0.5;
  for (int k = 0; k < 64; ++k) {
    const Taylor3 tau = Taylor3::line(0.1 * k, 1.0);
    VecX<Taylor3> c(2);
    c << 1.0 + r * cos(tau), -2.0 + r * sin(tau);
    circle.push_back(curve_jet(c));
    VecX<Taylor3> h(3);
    h << hr * cos(tau), hr * sin(tau), hc * tau;
    helix.push_back(curve_jet(h));
  }
  const FrenetProfile pc = frenet_curvatures(e2, circle);
  CHECK(std::abs(pc.k1_mean - 0.5) < 1e-8);
  CHECK(pc.k1_stdev < 1e-8);
  CHECK(pc.k2_max_abs < 1e-8);

  const FrenetProfile ph = frenet_curvatures(e3, helix);
  const double den = hr * hr + hc * hc;
  CHECK(std::abs(ph.k1_mean - hr / den) < 1e-12);
  for (double k2 : ph.k2) CHECK(std::abs(k2 - hc / den) < 1e-12);
}

TEST_CASE("latitude circles on the sphere chart") {
  const ChartMetric s = sphere_uv();
  const double u0 = 0.6;
  std::vector<CurveJet> lat;
  for (int k = 0; k < 20; ++k) {
    const Taylor3 tau = Taylor3::line(-2.0 + 0.2 * k, 1.0);
    VecX<Taylor3> c(2);
    c << Taylor3(u0), tau;
    lat.push_back(curve_jet(c));
  }
  const FrenetProfile p = frenet_curvatures(s, lat);
  CHECK(std::abs(p.k1_mean - std::tan(u0)) < 1e-12);
  CHECK(p.k2_max_abs < 1e-12);
}

TEST_CASE("inverted circle has constant curvature") {
  // |x - (3,0)| = 1 maps under x/|x|² to the circle through 1/2 and 1/4.
  const ChartMetric e = euclidean(2);
  std::vector<CurveJet> jets;
  std::vector<Vec> samples;
  const int m = 4000;
  const double dtau = 2.0 * std::numbers::pi / m;
  for (int k = 0; k < m; ++k) {
    const Taylor3 tau = Taylor3::line(k * dtau, 1.0);
    const Taylor3 x = 3.0 + cos(tau), y = sin(tau);
    const Taylor3 r2 = x * x + y * y;
    VecX<Taylor3> c(2);
    c << x / r2, y / r2;
    if (k % 50 == 0) jets.push_back(curve_jet(c));
    samples.push_back(curve_jet(c).x);
  }
  const FrenetProfile p = frenet_curvatures(e, jets);
  CHECK(std::abs(p.k1_mean - 8.0) < 1e-9);
  CHECK(p.k1_stdev < 1e-9);
  const FrenetProfile q = frenet_curvatures(e, samples, dtau);
  CHECK(std::abs(q.k1_mean - 8.0) < 1e-6);
}

TEST_CASE("integrated geodesics have vanishing first curvature") {
  for (const ChartMetric& g : {sphere_uv(), riemannian_form(-1.0, 2).chart}) {
    const GeodesicPath path = integrate_geodesic(g, vec2(0.1, 0.2), vec2(0.5, -0.4), 1.0);
    CHECK(frenet_curvatures(g, g, path).k1_max <= 1e-7);
  }
}

TEST_CASE("integrated geodesic circles") {
  const ChartMetric e = euclidean(2);
  const auto jets = integrate_geodesic_circle(e, vec2(0, 0), vec2(1, 0), vec2(0, 1), 0.5,
                                              2.0 * std::numbers::pi * 2.0, 1e-3, 100);
  CHECK((jets.back().x - vec2(0, 0)).norm() < 1e-9);
  const FrenetProfile p = frenet_curvatures(e, jets);
  CHECK(std::abs(p.k1_mean - 0.5) < 1e-10);

  // On the unit sphere a circle of geodesic curvature k has spherical radius
  // atan(1/k) about its centre.
  const ChartMetric s = sphere_uv();
  const double k1 = 2.0;
  const auto sj = integrate_geodesic_circle(s, vec2(0, 0), vec2(0, 1), vec2(1, 0), k1,
                                            1.0, 1e-3, 50);
  const FrenetProfile ps = frenet_curvatures(s, sj);
  CHECK(ps.k1_stdev < 1e-9);
  CHECK(ps.k2_max_abs < 1e-7);
  const Vec centre = vec2(std::atan(1.0 / k1), 0.0);
  for (const auto& j : sj) {
    CHECK(std::abs(spherical_distance(centre, j.x) - std::atan(1.0 / k1)) < 1e-9);
  }
}

TEST_CASE("Jacobi fields") {
  const ChartMetric e = euclidean(2);
  const GeodesicPath line = integrate_geodesic(e, vec2(0, 0), vec2(1, 0), 1.0, 0.01);
  const JacobiSolution lin = integrate_jacobi(e, line, vec2(0.2, 0.3), vec2(-0.1, 0.5));
  for (size_t i = 0; i < lin.s.size(); ++i) {
    CHECK((lin.v[i] - (vec2(0.2, 0.3) + lin.s[i] * vec2(-0.1, 0.5))).norm() < 1e-12);
  }

  const ChartMetric s = sphere_uv();
  const GeodesicPath eq = integrate_geodesic(s, vec2(0, 0), vec2(0, 1), 2.0);
  const JacobiSolution j = integrate_jacobi(s, eq, vec2(0, 0), vec2(1, 0));
  for (size_t i = 0; i < j.s.size(); ++i) {
    CHECK(std::abs(j.normal_norm[i] - std::sin(j.s[i])) < 1e-5);
  }

  // Any unit-speed geodesic on the stereographic chart.
  const ChartMetric st = riemannian_form(1.0, 3).chart;
  const Vec p = vec3(0.2, -0.1, 0.3);
  const double lam = 1.0 / (1.0 + 0.25 * p.squaredNorm());
  const Vec u = vec3(0.6, 0.8, 0.0) / lam;
  const Vec nrm = vec3(0.0, 0.0, 1.0) / lam;
  const GeodesicPath gp = integrate_geodesic(st, p, u, 1.5);
  const JacobiSolution js = integrate_jacobi(st, gp, Vec::Zero(3), nrm);
  for (size_t i = 0; i < js.s.size(); ++i) {
    CHECK(std::abs(js.normal_norm[i] - std::sin(js.s[i])) < 1e-5);
    // A parallel frame keeps the components of V in the normal plane.
    CHECK(std::abs(js.frame[i](0)) < 1e-8);
  }
}

TEST_CASE("deviation of simple families") {
  DeformationFamily zero;
  zero.name = "zero";
  zero.base = euclidean(2);
  zero.delta_g = TensorField::constant(Mat::Zero(2, 2));
  const DeviationResult z = deviation_phi(zero, vec2(0.1, 0.1), vec2(0.3, 0.4), 0.2);
  CHECK(z.phi < 1e-12);
  CHECK_FALSE(z.boundary);
  CHECK(std::abs(z.s_min - 0.5) < 1e-6);

  const DeformationFamily gn = gnomonic_family(2);
  for (double t : {0.1, 0.2, 0.3}) {
    const DeviationResult r = deviation_phi(gn, vec2(-0.2, 0.1), vec2(0.4, 0.3), t);
    CHECK(r.phi < 1e-7);
    CHECK_FALSE(r.boundary);
  }
}
