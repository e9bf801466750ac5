// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "beltrami/deformation.hpp"
#include "beltrami/diffeo_check.hpp"
#include "beltrami/geodesic.hpp"
#include "beltrami/metric_core.hpp"
#include "beltrami/rng.hpp"
#include "beltrami/space_forms.hpp"
#include "beltrami/surface_geometry.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace beltrami;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double stdev(const std::vector<double>& v, double* mean_out = nullptr) {
  double mean = 0.0, var = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  for (double x : v) var += (x - mean) * (x - mean);
  if (mean_out) *mean_out = mean;
  return std::sqrt(var / v.size());
}

std::vector<Vec> samples(const DeformationFamily& f, int count, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return sample_domain(f.base.domain(), rng, count);
}

Outcome christoffel_table() {
  const ChartMetric analytic = sphere_uv();
  const ChartMetric differenced = analytic.without_partials();
  SplitMix64 rng(101);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec x = vec2(rng.uniform(-1.2, 1.2), rng.uniform(-3.0, 3.0));
    const double u = x(0);
    Mat e0 = Mat::Zero(2, 2), e1 = Mat::Zero(2, 2);
    e0(1, 1) = std::sin(u) * std::cos(u);
    e1(0, 1) = e1(1, 0) = -std::tan(u);
    for (const ChartMetric* g : {&analytic, &differenced}) {
      const Christoffel c = christoffel(*g, x);
      worst = std::max({worst, (c.gamma[0] - e0).cwiseAbs().maxCoeff(),
                        (c.gamma[1] - e1).cwiseAbs().maxCoeff()});
    }
  }
  return {worst <= 1e-8, "max table error " + fmt(worst) + " (jets and differences)"};
}

Outcome curvature_constancy() {
  SplitMix64 rng(102);
  double worst_sd = 0.0, worst_mean = 0.0;
  for (double c : {-1.0, 0.0, 1.0}) {
    for (int n : {2, 3}) {
      const ChartMetric g = riemannian_form(c, n).chart;
      std::vector<double> k;
      while (k.size() < 100) {
        const Vec x = rng.uniform_vec(n, -1.5, 1.5);
        if (x.norm() >= 1.5) continue;
        k.push_back(sectional_curvature(g, x, rng.normal_vec(n), rng.normal_vec(n)));
      }
      double mean = 0.0;
      worst_sd = std::max(worst_sd, stdev(k, &mean));
      worst_mean = std::max(worst_mean, std::abs(mean - c));
    }
  }
  return {worst_sd <= 1e-6 && worst_mean <= 1e-6,
          "max stdev " + fmt(worst_sd) + ", max |mean - C| " + fmt(worst_mean)};
}

Outcome criterion_equivalence() {
  const DeformationFamily g = gnomonic_family(2);
  const auto pts = samples(g, 50, 103);
  const CriterionReport gx = infinitesimal_cogeodesic_test(g, pts);
  const CriterionReport ga = alpha_criterion_test(g, pts);
  const DeformationFamily s = shear_family();
  const auto spts = samples(s, 50, 104);
  const CriterionReport sx = infinitesimal_cogeodesic_test(s, spts);
  const CriterionReport sa = alpha_criterion_test(s, spts);
  int agree = 0, total = 0;
  for (const auto& fx : deformation_fixtures()) {
    const auto p = samples(fx.family, 30, 105);
    const bool x = infinitesimal_cogeodesic_test(fx.family, p).accepted;
    const bool a = alpha_criterion_test(fx.family, p).accepted;
    agree += (x == a && x == fx.cogeodesic);
    ++total;
  }
  const bool ok = gx.residual <= 1e-8 && ga.residual <= 1e-8 && sx.residual > 1e-3 &&
                  sa.residual > 1e-3 && agree == total && total == 10;
  return {ok, "gnomonic X " + fmt(gx.residual) + " alpha " + fmt(ga.residual) + "; shear X " +
                  fmt(sx.residual) + " alpha " + fmt(sa.residual) + "; verdicts agree on " +
                  std::to_string(agree) + "/" + std::to_string(total) + " fixtures"};
}

Outcome l_construction() {
  const DeformationFamily g = gnomonic_family(2);
  const AlphaTensor at = build_projective_family(g);
  double exact_gap = 0.0;
  for (double t : {0.1, 0.3}) {
    const ChartMetric exact = gnomonic_metric(t, 2);
    const ChartMetric gt = at.gtilde(t);
    for (const Vec& x : samples(g, 50, 106)) {
      exact_gap = std::max(exact_gap, (gt.value(x) - exact.value(x)).cwiseAbs().maxCoeff());
    }
  }
  const DeformationFamily p = projective_family(vec2(0.3, -0.2));
  const AlphaTensor ap = build_projective_family(p);
  const auto pts = samples(p, 20, 107);
  const auto gap = [&](double t) {
    double worst = 0.0;
    const ChartMetric gt = ap.gtilde(t), gp = p.at(t);
    for (const Vec& x : pts) worst = std::max(worst, (gt.value(x) - gp.value(x)).norm());
    return worst;
  };
  const double ratio = gap(0.1) / gap(0.05);
  return {exact_gap <= 1e-12 && ratio >= 3.2 && ratio <= 4.8,
          "gnomonic gap " + fmt(exact_gap) + "; projective halving ratio " + fmt(ratio)};
}

Outcome geodesic_sharing() {
  SplitMix64 rng(108);
  double worst = 0.0;
  int n = 0;
  for (const DeformationFamily& f :
       {projective_family(vec2(0.3, -0.2)), sphere_pullback_family()}) {
    const ChartMetric gt = build_projective_family(f).gtilde(0.1);
    std::vector<GeodesicTrial> trials;
    for (int i = 0; i < 20; ++i) {
      const Vec p = sample_domain(f.base.domain(), rng, 1, 0.5)[0];
      trials.push_back({p, rng.normal_vec(2).normalized() * 0.3, 1.0});
    }
    const TrialReport r = cogeodesic_test(f.base, gt, trials);
    worst = std::max(worst, r.residual);
    n += r.trials - r.rejected;
  }
  return {worst <= 1e-6 && n == 40,
          "max g-Frenet k1 " + fmt(worst) + " over " + std::to_string(n) + " geodesics"};
}

Outcome infinitesimal_beltrami() {
  SplitMix64 rng(109);
  const DeformationFamily g = gnomonic_family(2);
  const DeltaCurvature dk = delta_curvature(g, random_planes(g.base.domain(), rng, 50));
  const DeformationFamily s = sphere_pullback_family();
  const auto planes = random_planes(s.base.domain(), rng, 50);
  const DeltaCurvature ds = delta_curvature(s, planes);
  std::vector<Vec> pts;
  for (const auto& pl : planes) pts.push_back(pl.x);
  const bool accepted = infinitesimal_cogeodesic_test(s, pts).accepted;
  const double dev = std::max(std::abs(dk.min - 1.0), std::abs(dk.max - 1.0));
  return {dk.spread <= 2e-4 && dev <= 1e-4 && ds.spread <= 1e-3 && accepted,
          "gnomonic spread " + fmt(dk.spread) + ", max |dK - 1| " + fmt(dev) +
              "; sphere pullback spread " + fmt(ds.spread) +
              (accepted ? ", accepted" : ", rejected")};
}

Outcome cospherical_drift() {
  const auto phi = ScalarField::from_generic(2, [](const auto& x) {
    return 0.24 * x(0) + 0.32 * x(1);  // |a| = 0.4
  });
  const CenterDrift d =
      sphere_center_drift(phi, Domain::box(2, 3.0), vec2(0.1, -0.2), {0.1, 0.05, 0.025});
  const double err = (d.b2 + vec2(0.24, 0.32)).norm();
  return {err <= 0.05 * 0.4, "|b2 + a| = " + fmt(err) + " (bound " + fmt(0.02) + ")"};
}

MobiusMap random_mobius(SplitMix64& rng, int n) {
  const MobiusMap s = MobiusMap::similarity(rng.uniform(0.5, 2.0), rng.orthogonal(n),
                                            rng.uniform_vec(n, -1.0, 1.0));
  Vec c = rng.normal_vec(n);
  c *= rng.uniform(3.0, 4.0) / c.norm();
  return s.compose(MobiusMap::inversion(c, rng.uniform(0.5, 2.0)));
}

Outcome mobius_concircularity() {
  SplitMix64 rng(110);
  const int n = 3;
  const ChartMetric e = euclidean(n);
  const auto circles = random_circle_trials(e, rng, 20, Vec::Constant(n, -0.5),
                                            Vec::Constant(n, 0.5), 1.0, 2.0, 1.0);
  double k1 = 0.0, k2 = 0.0;
  int rejected = 0;
  for (int m = 0; m < 5; ++m) {
    const TrialReport r = concircular_test(e, random_mobius(rng, n).to_diffeo(), e, circles);
    k1 = std::max(k1, r.residual);
    k2 = std::max(k2, r.secondary);
    rejected += r.rejected;
  }
  const ChartDiffeo shear = ChartDiffeo::from_generic("shear", n, [](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    VecX<S> y = x;
    y(1) = x(1) + 0.3 * x(0) * x(0);
    return y;
  });
  const double sk1 = concircular_test(e, shear, e, circles).residual;
  return {k1 <= 1e-6 && k2 <= 1e-6 && sk1 > 1e-3 && rejected == 0,
          "Mobius max stdev(k1) " + fmt(k1) + ", max |k2| " + fmt(k2) + "; shear stdev(k1) " +
              fmt(sk1)};
}

ChartMetric random_ambient(SplitMix64& rng, const std::string& name) {
  const Mat q = rng.orthogonal(3);
  const Vec d = rng.uniform_vec(3, 0.6, 2.0);
  const Mat a = q.transpose() * d.asDiagonal() * q;
  const Vec k = rng.uniform_vec(3, -0.4, 0.4);
  const Vec w = rng.uniform_vec(3, -0.2, 0.2);
  return ChartMetric(name, Domain::box(3, 2.0),
                     TensorField::from_generic(3, [a, k, w](const auto& x) {
                       using S = typename std::decay_t<decltype(x)>::Scalar;
                       MatX<S> g(3, 3);
                       const S kx = k(0) * x(0) + k(1) * x(1) + k(2) * x(2);
                       for (int i = 0; i < 3; ++i) {
                         for (int j = 0; j < 3; ++j) g(i, j) = S(a(i, j)) * exp(kx);
                         g(i, i) = g(i, i) + w(i) * sin(x(i));
                       }
                       g(0, 1) = g(0, 1) + 0.1 * x(2) * x(2);
                       g(1, 0) = g(0, 1);
                       return g;
                     }));
}

Outcome hhtilde_identity() {
  SplitMix64 rng(111);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Vec c = rng.uniform_vec(4, -0.5, 0.5);
    const SurfacePatch s = SurfacePatch::from_generic(
        "graph", Domain::box(2, 0.5), [c](const auto& uv) {
          using S = typename std::decay_t<decltype(uv)>::Scalar;
          const S u = uv(0), v = uv(1);
          VecX<S> x(3);
          x(0) = u;
          x(1) = v;
          x(2) = c(0) * u * u + c(1) * u * v + c(2) * v * v + c(3) * u * u * u;
          return x;
        });
    const ChartMetric gb = random_ambient(rng, "g-bar");
    const ChartMetric gt = random_ambient(rng, "g-tilde-bar");
    worst = std::max(worst, hhtilde_residual(s, gb, gt, rng.uniform_vec(2, -0.3, 0.3)).residual);
  }
  return {worst <= 1e-6, "max residual " + fmt(worst) + " over 20 fixtures"};
}

Outcome lambda_law() {
  SplitMix64 rng(112);
  const ChartMetric gb = euclidean(3);
  double worst = 0.0;
  int iff_ok = 0, total = 0;
  double min_distinct = 1e300, max_equal = 0.0;
  for (int i = 0; i < 12; ++i) {
    Vec d = rng.uniform_vec(3, 0.5, 3.0);
    if (i % 3 == 0) d(1) = d(0);
    const Mat q = rng.orthogonal(3);
    const Mat m = q * d.asDiagonal() * q.transpose();
    const ChartMetric gt("sigma", Domain::box(3, 3.0), TensorField::constant(m));
    const Vec p = rng.uniform_vec(3, -0.5, 0.5);
    const LambdaCoefficient c = lambda1_coefficient(gb, gt, p, q.col(0), q.col(1));
    worst = std::max(worst, std::abs(c.extracted - c.predicted));
    const bool equal = std::abs(c.sigma(0) - c.sigma(1)) <= 1e-12;
    const bool vanishes = std::abs(c.extracted) <= 1e-10;
    iff_ok += (equal == vanishes);
    ++total;
    if (equal) {
      max_equal = std::max(max_equal, std::abs(c.extracted));
    } else {
      min_distinct = std::min(min_distinct, std::abs(c.extracted));
    }
  }
  return {worst <= 1e-8 && iff_ok == total,
          "max |extracted - predicted| " + fmt(worst) + "; vanishing iff sigma1 = sigma2 on " +
              std::to_string(iff_ok) + "/" + std::to_string(total) + " (equal max " +
              fmt(max_equal) + ", distinct min " + fmt(min_distinct) + ")"};
}

Outcome sphere_identities() {
  const DeformationFamily f = sphere_uv_gnomonic_family();
  std::vector<Vec> grid;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) grid.push_back(vec2(-1.0 + 2.0 * i / 39, -1.0 + 2.0 * j / 39));
  const Sphere2dReport r = sphere2d_identities(f.delta_g, grid);
  return {r.tsja_residual <= 1e-5 && r.odedeltaF_residual <= 1e-4,
          "cogeodesicity conditions " + fmt(r.tsja_residual) + ", dF equation " +
              fmt(r.odedeltaF_residual) + " on 40x40"};
}

Outcome deviation_discrimination() {
  SplitMix64 rng(113);
  double exact = 0.0, min_order = 1e300;
  bool boundary = false;
  for (const DeformationFamily& f : {gnomonic_family(2), projective_family(vec2(0.3, -0.2))}) {
    for (int i = 0; i < 3; ++i) {
      const Vec p = sample_domain(f.base.domain(), rng, 1, 0.4)[0];
      const Vec v = rng.normal_vec(2).normalized() * 0.25;
      exact = std::max(exact, deviation_phi(f, p, v, 0.1).phi);
      const DeviationOrder o = deviation_order(linearized_family(f), p, v, 0.1);
      min_order = std::min(min_order, o.order);
      boundary = boundary || o.boundary;
    }
  }
  const DeviationOrder s = deviation_order(shear_family(), vec2(0.1, 0.0), vec2(0.2, 0.4), 0.1);
  return {exact <= 1e-7 && min_order >= 1.8 && !boundary && s.slope > 1e-3,
          "exact families phi " + fmt(exact) + ", linearized min order " + fmt(min_order) +
              "; shear slope " + fmt(s.slope) + " (order " + fmt(s.order) + ")"};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "sphere chart Christoffel table", 1.0, christoffel_table},
      {2, "Riemannian form curvature constancy", 10.0, curvature_constancy},
      {3, "criterion equivalence and soundness", 10.0, criterion_equivalence},
      {4, "L-construction exactness and order", 5.0, l_construction},
      {5, "g-tilde geodesics are g geodesics", 20.0, geodesic_sharing},
      {6, "infinitesimal Beltrami", 30.0, infinitesimal_beltrami},
      {7, "cospherical centre drift", 30.0, cospherical_drift},
      {8, "Mobius concircularity", 20.0, mobius_concircularity},
      {9, "H-H~ identity", 10.0, hhtilde_identity},
      {10, "lambda1 coefficient law", 5.0, lambda_law},
      {11, "sphere chart identities", 20.0, sphere_identities},
      {12, "deviation discrimination", 20.0, deviation_discrimination},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && s < c.budget_s;
    failed += !pass;
    std::printf("%s  %2d  %s: %s [%.2f s of %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), s, c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
