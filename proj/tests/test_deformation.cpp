#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "beltrami/deformation.hpp"
#include "beltrami/geodesic.hpp"
#include "beltrami/space_forms.hpp"

#include <cmath>

using namespace beltrami;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

DeformationFamily on_euclidean(const std::string& name, const TensorField& dg) {
  DeformationFamily f;
  f.name = name;
  f.base = euclidean(dg.dim(), 1.0);
  f.delta_g = dg;
  return f;
}

// X by differentiating the Christoffel symbols of g + tδg in t.
std::vector<Mat> christoffel_derivative(const DeformationFamily& f, const Vec& x) {
  const double h = 1e-4;
  const Christoffel p = christoffel(f.linearized(h), x);
  const Christoffel m = christoffel(f.linearized(-h), x);
  std::vector<Mat> d(p.gamma.size());
  for (size_t k = 0; k < d.size(); ++k) d[k] = (p.gamma[k] - m.gamma[k]) / (2 * h);
  return d;
}

std::vector<Vec> fixture_samples(const DeformationFamily& f, int count, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return sample_domain(f.base.domain(), rng, count);
}

}  // namespace

TEST_CASE("connection variation examples") {
  const DeformationFamily zero = zero_family(2);
  CHECK(connection_variation(zero, vec2(0.1, 0.2), vec2(1, 0), vec2(0, 1)).norm() == 0.0);

  const DeformationFamily g = gnomonic_family(2);
  const Vec x = connection_variation(g, vec2(0.3, 0.0), vec2(1, 0), vec2(1, 0));
  CHECK(x(0) == doctest::Approx(-0.6));
  CHECK(std::abs(x(1)) < 1e-15);

  DeformationFamily s;
  s.name = "sphere δE = u²";
  s.base = sphere_uv();
  s.delta_g = TensorField::from_generic(2, [](const auto& y) {
    using S = typename std::decay_t<decltype(y)>::Scalar;
    MatX<S> m = MatX<S>::Zero(2, 2);
    m(0, 0) = y(0) * y(0);
    return m;
  });
  const ConnectionVariation cv = connection_variation(s, vec2(1.0, 0.3));
  CHECK(cv.X[0](0, 0) == doctest::Approx(1.0));
}

TEST_CASE("connection variation matches the t-derivative of the Christoffel symbols") {
  for (const auto& fx : deformation_fixtures()) {
    CAPTURE(fx.family.name);
    for (const Vec& x : fixture_samples(fx.family, 5, 31)) {
      const ConnectionVariation cv = connection_variation(fx.family, x);
      const std::vector<Mat> fd = christoffel_derivative(fx.family, x);
      for (int k = 0; k < cv.dim(); ++k) {
        CHECK((cv.X[k] - fd[k]).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((cv.X[k] - cv.X[k].transpose()).norm() < 1e-12);
      }
      CHECK(cv.koszul_residual() < 1e-8);
    }
  }
}

TEST_CASE("trace identity on every fixture") {
  SplitMix64 rng(32);
  for (const auto& fx : deformation_fixtures()) {
    CAPTURE(fx.family.name);
    double worst = 0.0;
    for (const Vec& x : fixture_samples(fx.family, 100, 33)) {
      const ConnectionVariation cv = connection_variation(fx.family, x);
      const Vec v = rng.normal_vec(cv.dim());
      worst = std::max(worst, std::abs(cv.trace(v) - 0.5 * v.dot(cv.slice.d_trace_sigma)));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("cogeodesicity criteria") {
  const DeformationFamily g = gnomonic_family(2);
  const auto pts = fixture_samples(g, 30, 34);
  const CriterionReport x = infinitesimal_cogeodesic_test(g, pts);
  const CriterionReport a = alpha_criterion_test(g, pts);
  CHECK(x.residual <= 1e-8);
  CHECK(a.residual <= 1e-8);
  CHECK(x.accepted);
  CHECK(a.accepted);

  const DeformationFamily h = homothety_family(2, 0.5);
  CHECK(infinitesimal_cogeodesic_test(h, pts).residual == 0.0);
  CHECK(alpha_criterion_test(zero_family(2), pts).residual == 0.0);

  const DeformationFamily s = shear_family();
  const CriterionReport xs = infinitesimal_cogeodesic_test(s, pts);
  const CriterionReport as = alpha_criterion_test(s, pts);
  CHECK(xs.residual > 1e-3);
  CHECK(as.residual > 1e-3);
  CHECK_FALSE(xs.accepted);
  CHECK_FALSE(as.accepted);
}

TEST_CASE("criteria agree on all fixtures") {
  const auto fixtures = deformation_fixtures();
  CHECK(fixtures.size() == 10);
  for (const auto& fx : fixtures) {
    CAPTURE(fx.family.name);
    const auto pts = fixture_samples(fx.family, 20, 35);
    const bool x = infinitesimal_cogeodesic_test(fx.family, pts).accepted;
    const bool a = alpha_criterion_test(fx.family, pts).accepted;
    CHECK(x == a);
    CHECK(x == fx.cogeodesic);
  }
}

TEST_CASE("alpha tensor of the gnomonic variation") {
  const AlphaTensor at = build_projective_family(gnomonic_family(3));
  Vec x(3);
  x << 0.3, -0.1, 0.2;
  CHECK((at.alpha(x) + x * x.transpose()).norm() < 1e-14);
  CHECK(at.trace_alpha(x) == doctest::Approx(-x.squaredNorm()));
  CHECK((values(at.alpha_jets(x)) - at.alpha(x)).norm() < 1e-14);
  CHECK((at.L(0.2, x) - Mat::Identity(3, 3) - 0.2 * x * x.transpose()).norm() < 1e-14);
}

TEST_CASE("L-construction reproduces the gnomonic metric") {
  const DeformationFamily g = gnomonic_family(2);
  const AlphaTensor at = build_projective_family(g);
  for (double t : {0.1, 0.3}) {
    const ChartMetric exact = gnomonic_metric(t, 2);
    const ChartMetric gt = at.gtilde(t);
    for (const Vec& x : fixture_samples(g, 20, 36)) {
      CHECK((gt.value(x) - exact.value(x)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  const AlphaTensor z = build_projective_family(zero_family(2));
  CHECK((z.L(0.4, vec2(0.1, 0.1)) - Mat::Identity(2, 2)).norm() == 0.0);
  CHECK((z.gtilde_value(0.4, vec2(0.1, 0.1)) - Mat::Identity(2, 2)).norm() < 1e-15);
  // α = −xxᵀ has eigenvalue −|x|², so L(t) fails once t < −1/|x|².
  CHECK_THROWS_AS(at.gtilde_value(-5.0, vec2(0.6, 0.6)), RangeError);
  CHECK(at.t_limit({vec2(0.6, 0.0)}) == doctest::Approx(1.0 / 0.36));
}

TEST_CASE("g̃ jets agree with finite differences") {
  const AlphaTensor at = build_projective_family(sphere_pullback_family());
  const ChartMetric gt = at.gtilde(0.1);
  const Vec x = vec2(0.2, -0.3);
  const Partials exact = unpack(gt.jet(x), 2);
  const Partials fd = unpack(gt.field().fd_jet(x), 2);
  for (int k = 0; k < 2; ++k) CHECK((exact.d[k] - fd.d[k]).cwiseAbs().maxCoeff() < 1e-8);
  for (int k = 0; k < 4; ++k) CHECK((exact.dd[k] - fd.dd[k]).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("g and g̃ agree to first order") {
  Vec a(2);
  a << 0.3, -0.2;
  const DeformationFamily f = projective_family(a);
  const AlphaTensor at = build_projective_family(f);
  auto gap = [](const DeformationFamily& fam, const AlphaTensor& alpha, double t) {
    double worst = 0.0;
    const ChartMetric gt = alpha.gtilde(t), g = fam.at(t);
    for (const Vec& x : fixture_samples(fam, 10, 37)) {
      worst = std::max(worst, (gt.value(x) - g.value(x)).cwiseAbs().maxCoeff());
    }
    return worst;
  };
  const double ratio = gap(f, at, 0.1) / gap(f, at, 0.05);
  CHECK(ratio >= 3.2);
  CHECK(ratio <= 4.8);

  // Pullbacks of the gnomonic family are reproduced exactly.
  const DeformationFamily s = sphere_pullback_family();
  const AlphaTensor as = build_projective_family(s);
  CHECK(gap(s, as, 0.1) <= 1e-12);
}

TEST_CASE("g̃ geodesics are g geodesics") {
  Vec a(2);
  a << 0.3, -0.2;
  SplitMix64 rng(38);
  for (const DeformationFamily& f : {projective_family(a), sphere_pullback_family(),
                                     sphere_uv_gnomonic_family()}) {
    CAPTURE(f.name);
    const ChartMetric gt = build_projective_family(f).gtilde(0.1);
    for (int i = 0; i < 4; ++i) {
      const Vec p = sample_domain(f.base.domain(), rng, 1, 0.5)[0];
      const Vec v = rng.normal_vec(2).normalized() * 0.3;
      const GeodesicPath path = integrate_geodesic(gt, p, v, 1.0);
      const FrenetProfile prof = frenet_curvatures(f.base, gt, path);
      CHECK(prof.k1_max <= 1e-6);
    }
  }
}

TEST_CASE("sphere pullback fixture") {
  const DeformationFamily f = sphere_pullback_family();
  // The base is the C = 1 Riemannian form.
  const ChartMetric rf = riemannian_form(1.0, 2).chart;
  for (const Vec& x : fixture_samples(f, 10, 39)) {
    CHECK((f.base.value(x) - rf.value(x)).cwiseAbs().maxCoeff() < 1e-13);
  }
  const ChartMetric gt = build_projective_family(f).gtilde(0.05);
  SplitMix64 rng(40);
  for (int i = 0; i < 3; ++i) {
    const Vec p = sample_domain(f.base.domain(), rng, 1, 0.5)[0];
    const GeodesicPath path = integrate_geodesic(gt, p, rng.normal_vec(2).normalized() * 0.3, 1.0);
    CHECK(frenet_curvatures(f.base, gt, path).k1_max <= 1e-5);
  }

  const DeformationFamily uv = sphere_uv_gnomonic_family();
  const ChartMetric s = sphere_uv();
  for (const Vec& x : fixture_samples(uv, 10, 41)) {
    CHECK((uv.base.value(x) - s.value(x)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("full curves are first-order tangent to δg") {
  for (const auto& fx : deformation_fixtures()) {
    if (!fx.family.has_full_curve()) continue;
    CAPTURE(fx.family.name);
    const auto pts = fixture_samples(fx.family, 5, 42);
    auto gap = [&](double t) {
      double worst = 0.0;
      const ChartMetric gt = fx.family.at(t);
      for (const Vec& x : pts) {
        const Mat lin = fx.family.base.value(x) + t * fx.family.delta_g.value(x);
        worst = std::max(worst, (gt.value(x) - lin).cwiseAbs().maxCoeff());
      }
      return worst;
    };
    const double g1 = gap(0.02), g2 = gap(0.01);
    if (g1 < 1e-13) continue;  // linear curves
    CHECK(std::log2(g1 / g2) >= 1.8);
  }
}

TEST_CASE("δK examples") {
  SplitMix64 rng(43);
  const DeformationFamily g = gnomonic_family(2);
  const DeltaCurvature dk = delta_curvature(g, random_planes(g.base.domain(), rng, 50));
  CHECK(std::abs(dk.mean - 1.0) <= 1e-4);
  CHECK(std::abs(dk.min - 1.0) <= 1e-4);
  CHECK(std::abs(dk.max - 1.0) <= 1e-4);
  CHECK(dk.spread <= 2e-4);

  const DeformationFamily h = homothety_family(2, 0.5);
  const DeltaCurvature dh = delta_curvature(h, random_planes(h.base.domain(), rng, 10));
  CHECK(std::abs(dh.max) < 1e-9);
  CHECK(std::abs(dh.min) < 1e-9);

  // For δg = f(x₁) dx₂² on the flat plane, δK = −½f″, so the shear itself
  // has δK ≡ 0 while a cubic f makes δK = −3x₁ vary.
  const DeformationFamily s = shear_family();
  const DeltaCurvature ds = delta_curvature(s, random_planes(s.base.domain(), rng, 50));
  CHECK(std::abs(ds.min) < 1e-9);
  CHECK(std::abs(ds.max) < 1e-9);
  const DeformationFamily cubic =
      on_euclidean("cubic-shear", TensorField::from_generic(2, [](const auto& y) {
                     using S = typename std::decay_t<decltype(y)>::Scalar;
                     MatX<S> m = MatX<S>::Zero(2, 2);
                     m(1, 1) = y(0) * y(0) * y(0);
                     return m;
                   }));
  const auto cp = random_planes(cubic.base.domain(), rng, 50);
  std::vector<Vec> cpts;
  for (const auto& pl : cp) cpts.push_back(pl.x);
  CHECK_FALSE(infinitesimal_cogeodesic_test(cubic, cpts).accepted);
  const DeltaCurvature dc = delta_curvature(cubic, cp);
  CHECK(dc.spread > 1e-2);
  for (size_t i = 0; i < cp.size(); ++i) {
    CHECK(dc.delta_k[i] == doctest::Approx(-3.0 * cp[i].x(0)).epsilon(1e-6));
  }

  const DeformationFamily p = sphere_pullback_family();
  const DeltaCurvature dp = delta_curvature(p, random_planes(p.base.domain(), rng, 50));
  CHECK(dp.spread <= 1e-3);
  CHECK(dp.mean == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("infinitesimal Beltrami on space forms") {
  SplitMix64 rng(44);
  for (double c : {-1.0, 0.0, 1.0}) {
    for (int n : {2, 3}) {
      CAPTURE(c);
      CAPTURE(n);
      const DeformationFamily f = gnomonic_family(n, c, 0.5);
      const auto planes = random_planes(f.base.domain(), rng, 30);
      std::vector<Vec> pts;
      for (const auto& pl : planes) pts.push_back(pl.x);
      CHECK(infinitesimal_cogeodesic_test(f, pts).accepted);
      const DeltaCurvature dk = delta_curvature(f, planes);
      CHECK(dk.spread <= 10.0 * dk.noise_floor);
      // A linearized family has the same δK.
      const DeltaCurvature dl = delta_curvature(linearized_family(f), planes);
      CHECK(std::abs(dl.mean - 1.0) < 1e-6);
      CHECK(dl.spread <= 10.0 * dl.noise_floor);
    }
  }
}

TEST_CASE("sphere chart identities") {
  const auto zero = TensorField::constant(Mat::Zero(2, 2));
  const Sphere2dReport z = sphere2d_identities(zero, {vec2(0.2, 0.1), vec2(-0.7, 0.4)});
  CHECK(z.table_residual == 0.0);
  CHECK(z.tsja_residual == 0.0);
  CHECK(z.odedeltaF_residual == 0.0);

  const auto de = TensorField::from_generic(2, [](const auto& y) {
    using S = typename std::decay_t<decltype(y)>::Scalar;
    MatX<S> m = MatX<S>::Zero(2, 2);
    m(0, 0) = y(0) * y(0);
    return m;
  });
  const double u = 0.7;
  const std::vector<Mat> tab = sphere2d_table(de.jet(vec2(u, 0.2)), u);
  CHECK(tab[0](0, 0) == doctest::Approx(u));
  CHECK(tab[1](0, 0) == 0.0);
  CHECK(tab[0](1, 1) == doctest::Approx(-u * u * std::sin(u) * std::cos(u)));
  CHECK(sphere2d_identities(de, {vec2(u, 0.2)}, false).table_residual < 1e-12);

  // The closed-form table against the generic Koszul computation.
  const auto generic = TensorField::from_generic(2, [](const auto& y) {
    using S = typename std::decay_t<decltype(y)>::Scalar;
    MatX<S> m(2, 2);
    m(0, 0) = sin(y(0) * y(1)) + 0.3;
    m(0, 1) = m(1, 0) = y(0) * y(0) * y(1);
    m(1, 1) = exp(0.5 * y(1)) * cos(y(0));
    return m;
  });
  SplitMix64 rng(45);
  std::vector<Vec> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(vec2(rng.uniform(-1.4, 1.4), rng.uniform(-2, 2)));
  CHECK(sphere2d_identities(generic, pts, false).table_residual < 1e-10);
  CHECK(sphere2d_identities(generic, pts).tsja_residual > 1e-2);

  CHECK_THROWS_AS(sphere2d_identities(de, {vec2(1.55, 0.0)}), DomainError);
}

TEST_CASE("transferred gnomonic family satisfies the sphere identities") {
  const DeformationFamily f = sphere_uv_gnomonic_family();
  std::vector<Vec> grid;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) grid.push_back(vec2(-1.0 + 2.0 * i / 39, -1.0 + 2.0 * j / 39));
  const Sphere2dReport r = sphere2d_identities(f.delta_g, grid);
  CHECK(r.table_residual < 1e-9);
  CHECK(r.tsja_residual <= 1e-5);
  CHECK(r.odedeltaF_residual <= 1e-4);
  CHECK(r.delta_k_ij[0] <= 1e-6);
  CHECK(r.delta_k_ij[1] <= 1e-6);
  for (double k : r.delta_k) CHECK(k == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("deviation links to the criteria") {
  SplitMix64 rng(46);
  Vec a(2);
  a << 0.3, -0.2;
  for (const DeformationFamily& f : {gnomonic_family(2), projective_family(a)}) {
    CAPTURE(f.name);
    const Vec p = sample_domain(f.base.domain(), rng, 1, 0.4)[0];
    const Vec v = rng.normal_vec(2).normalized() * 0.25;
    // Exact families deviate by nothing at all.
    CHECK(deviation_phi(f, p, v, 0.1).phi <= 1e-7);
    const DeviationOrder o = deviation_order(linearized_family(f), p, v, 0.1);
    CHECK_FALSE(o.boundary);
    CHECK(o.order >= 1.8);
  }
  // The shear deviates to first order in the direction that feels x₁ dx₂².
  const DeviationOrder s = deviation_order(shear_family(), vec2(0.1, 0.0), vec2(0.2, 0.4), 0.1);
  CHECK(s.slope > 1e-3);
  CHECK(s.order < 1.5);
}
