#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "beltrami/geodesic.hpp"
#include "beltrami/metric_core.hpp"
#include "beltrami/rng.hpp"
#include "beltrami/space_forms.hpp"

#include <cmath>

using namespace beltrami;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// A point inside the ball of radius `r` (componentwise uniform, rejected
// outside).
Vec point_in_ball(SplitMix64& rng, int n, double r) {
  for (;;) {
    const Vec x = rng.uniform_vec(n, -r, r);
    if (x.norm() < r) return x;
  }
}

MobiusMap random_mobius(SplitMix64& rng, int n) {
  const MobiusMap s = MobiusMap::similarity(rng.uniform(0.5, 2.0), rng.orthogonal(n),
                                            rng.uniform_vec(n, -1.0, 1.0));
  Vec c = rng.normal_vec(n);
  c *= rng.uniform(3.0, 4.0) / c.norm();
  return s.compose(MobiusMap::inversion(c, rng.uniform(0.5, 2.0)));
}

}  // namespace

TEST_CASE("Riemannian form metric entries") {
  const SpaceFormModel m = riemannian_form(1.0, 2);
  CHECK((m.chart.value(Vec::Zero(2)) - Mat::Identity(2, 2)).norm() == 0.0);
  const Vec x = vec2(0.6, -0.8);
  CHECK(m.chart.value(x)(0, 0) == doctest::Approx(1.0 / (1.25 * 1.25)));
  CHECK(m.chart.value(x)(0, 1) == 0.0);
  const SpaceFormModel flat = riemannian_form(0.0, 3);
  CHECK((flat.chart.value(Vec::Ones(3)) - Mat::Identity(3, 3)).norm() == 0.0);
  CHECK_THROWS_AS(riemannian_form(-1.0, 2).chart.value(vec2(1.5, 1.5)), DomainError);
}

TEST_CASE("curvature constancy of Riemannian forms") {
  SplitMix64 rng(11);
  for (double c : {-1.0, 0.0, 1.0}) {
    for (int n : {2, 3}) {
      const ChartMetric g = riemannian_form(c, n).chart;
      double sum = 0.0, sum2 = 0.0;
      const int m = 100;
      for (int i = 0; i < m; ++i) {
        const Vec x = point_in_ball(rng, n, 1.5);
        const double k = sectional_curvature(g, x, rng.normal_vec(n), rng.normal_vec(n));
        sum += k;
        sum2 += k * k;
      }
      const double mean = sum / m;
      const double sd = std::sqrt(std::max(0.0, sum2 / m - mean * mean));
      CHECK(std::abs(mean - c) < 1e-6);
      CHECK(sd < 1e-6);
    }
  }
}

TEST_CASE("gnomonic metrics") {
  SplitMix64 rng(12);
  for (double t : {0.1, 0.25, -0.4}) {
    const ChartMetric g = gnomonic_metric(t, 3);
    for (int i = 0; i < 10; ++i) {
      const Vec x = point_in_ball(rng, 3, 1.0);
      CHECK(std::abs(sectional_curvature(g, x, rng.normal_vec(3), rng.normal_vec(3)) - t) <
            1e-9);
    }
  }
  CHECK((gnomonic_metric(0.0, 2).value(vec2(0.3, 0.7)) - Mat::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("gnomonic family variation") {
  const DeformationFamily f = gnomonic_family(2);
  const Mat d = f.delta_g.value(vec2(0.3, 0.0));
  CHECK(d(0, 0) == doctest::Approx(-0.18));
  CHECK(d(1, 1) == doctest::Approx(-0.09));
  CHECK(d(0, 1) == 0.0);
  // δg is the t-derivative of the curve.
  const Vec x = vec2(0.2, -0.5);
  const double h = 1e-4;
  const Mat fd = (f.at(h).value(x) - f.at(-h).value(x)) / (2 * h);
  CHECK((fd - f.delta_g.value(x)).cwiseAbs().maxCoeff() < 1e-8);

  // Away from t = 0 the same holds for the shifted family.
  const DeformationFamily k = gnomonic_family(3, -1.0);
  Vec y(3);
  y << 0.1, 0.2, -0.3;
  const Mat fk = (k.at(h).value(y) - k.at(-h).value(y)) / (2 * h);
  CHECK((fk - k.delta_g.value(y)).cwiseAbs().maxCoeff() < 1e-7);
  CHECK_THROWS_AS(f.at(0.6), RangeError);
}

TEST_CASE("gnomonic straightness for |t| <= 0.5") {
  SplitMix64 rng(13);
  for (double t : {-0.5, -0.2, 0.2, 0.5}) {
    const ChartMetric g = gnomonic_metric(t, 2, 1.0);
    for (int i = 0; i < 4; ++i) {
      const Vec p = point_in_ball(rng, 2, 0.5);
      const Vec v = rng.normal_vec(2).normalized() * 0.3;
      const GeodesicPath path = integrate_geodesic(g, p, v, 1.0);
      const Vec u = v.normalized();
      double worst = 0.0;
      for (const auto& s : path.samples) {
        const Vec w = s.x - p;
        worst = std::max(worst, (w - w.dot(u) * u).norm());
      }
      CHECK(worst < 1e-6);
    }
  }
}

TEST_CASE("Möbius conformal factors") {
  const MobiusMap inv = MobiusMap::inversion(Vec::Zero(2), 1.0);
  CHECK(inv.conformal_factor(vec2(2, 0)) == doctest::Approx(1.0 / 16));
  CHECK((inv(vec2(2, 0)) - vec2(0.5, 0)).norm() < 1e-16);

  SplitMix64 rng(14);
  const Mat a = rng.orthogonal(2);
  const MobiusMap sim = MobiusMap::similarity(3.0, a, vec2(1, -2));
  CHECK(sim.conformal_factor(vec2(0.4, 0.1)) == doctest::Approx(9.0));

  const ChartMetric e = euclidean(2);
  const ChartMetric pb = mobius_pullback(inv, e, Domain::box(vec2(1, -1), vec2(3, 1)));
  const Mat g = pb.value(vec2(2, 0));
  CHECK((g - Mat::Identity(2, 2) / 16.0).norm() < 1e-15);
  CHECK_THROWS_AS(inv(vec2(0, 0)), SingularityError);
}

TEST_CASE("random Möbius pullbacks are conformal") {
  SplitMix64 rng(15);
  for (int n : {2, 3}) {
    for (int k = 0; k < 5; ++k) {
      const MobiusMap m = random_mobius(rng, n);
      for (int i = 0; i < 10; ++i) {
        const Vec x = rng.uniform_vec(n, -1.0, 1.0);
        const Mat j = m.jacobian(x);
        const Mat pb = j.transpose() * j;
        const double f = m.conformal_factor(x);
        CHECK((pb - f * Mat::Identity(n, n)).norm() / f < 1e-10);
      }
    }
  }
}

TEST_CASE("Möbius group closure") {
  SplitMix64 rng(16);
  for (int n : {2, 3}) {
    for (int k = 0; k < 10; ++k) {
      const MobiusMap a = random_mobius(rng, n);
      const MobiusMap b = random_mobius(rng, n);
      const MobiusMap ab = a.compose(b);
      const MobiusMap id = a.compose(a.inverse());
      CHECK_FALSE(id.inverts());
      CHECK(std::abs(id.scale() - 1.0) < 1e-12);
      CHECK((id.orthogonal() - Mat::Identity(n, n)).norm() < 1e-12);
      CHECK(id.shift().norm() < 1e-12);
      for (int i = 0; i < 5; ++i) {
        const Vec x = rng.uniform_vec(n, -1.0, 1.0);
        const Vec y = a(b(x));
        CHECK((ab(x) - y).norm() < 1e-12 * (1.0 + y.norm()));
        CHECK((a.inverse()(a(x)) - x).norm() < 1e-12);
      }
    }
  }
  // Composition with a shared centre collapses to a homothety.
  const MobiusMap i1 = MobiusMap::inversion(vec2(1, 1), 2.0);
  const MobiusMap i2 = MobiusMap::inversion(vec2(1, 1), 1.0);
  const MobiusMap h = i2.compose(i1);
  CHECK_FALSE(h.inverts());
  CHECK(h.scale() == doctest::Approx(0.25));
}

TEST_CASE("Möbius maps through the diffeo interface") {
  SplitMix64 rng(17);
  const MobiusMap m = random_mobius(rng, 2);
  const ChartDiffeo d = m.to_diffeo();
  const Vec x = vec2(0.2, -0.3);
  CHECK((d.apply(x) - m(x)).norm() < 1e-15);
  CHECK((d.jacobian(x) - m.jacobian(x)).norm() < 1e-12);
  CHECK((d.inverse(d.apply(x)) - x).norm() < 1e-12);
  // Analytic pullback partials match differenced ones.
  const ChartMetric e = euclidean(2);
  const ChartMetric pb = pullback_metric(d, e, Domain::box(2, 1.0));
  const Christoffel ca = christoffel(pb, x);
  const Christoffel cf = christoffel(pb.without_partials(), x);
  for (int k = 0; k < 2; ++k) CHECK((ca.gamma[k] - cf.gamma[k]).norm() < 1e-7);
}
