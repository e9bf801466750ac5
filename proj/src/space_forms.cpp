#include "beltrami/space_forms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace beltrami {

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

ChartMetric euclidean(int n, double half_width) {
  return ChartMetric("euclidean:" + std::to_string(n),
                     Domain::box(n, half_width),
                     TensorField::constant(Mat::Identity(n, n)));
}

SpaceFormModel riemannian_form(double c, int n) {
  if (n < 2) throw InputError("riemannian_form: dimension must be >= 2");
  Domain domain = Domain::box(n, kEuclideanHalfWidth);
  if (c != 0.0) {
    const double r = 2.0 / std::sqrt(std::abs(c));
    domain = Domain::box(n, r).with_ball(r);
  }
  auto field = TensorField::from_generic(
      n, [c](const auto& x) { return riemannian_form_matrix(x, c); });
  SpaceFormModel m;
  m.curvature = c;
  m.dim = n;
  m.chart = ChartMetric(
      "riemannian-form:" + format_double(c) + ":" + std::to_string(n), domain,
      field);
  return m;
}

ChartMetric sphere_uv(double u_max) {
  if (!(u_max > 0.0 && u_max < std::numbers::pi / 2)) {
    throw InputError("sphere_uv: u_max must lie in (0, pi/2)");
  }
  Vec lo(2), hi(2);
  lo << -u_max, -std::numbers::pi;
  hi << u_max, std::numbers::pi;
  return ChartMetric(
      "sphere-uv", Domain::box(lo, hi),
      TensorField::from_generic(2, [](const auto& x) { return sphere_uv_matrix(x); }));
}

ChartMetric gnomonic_metric(double t, int n, double half_width) {
  Domain domain = Domain::box(n, half_width);
  if (t < 0.0) domain = domain.with_ball(1.0 / std::sqrt(-t));
  return ChartMetric(
      "gnomonic:" + format_double(t) + ":" + std::to_string(n), domain,
      TensorField::from_generic(
          n, [t](const auto& x) { return gnomonic_matrix(x, t); }));
}

ChartMetric conformal_metric(const std::string& name, const ScalarField& phi,
                             const Domain& domain) {
  const int n = domain.dim();
  TensorField::ValueFn value = [phi, n](const Vec& x) -> Mat {
    return std::exp(2.0 * phi.value(x)) * Mat::Identity(n, n);
  };
  TensorField::JetFn jet;
  if (phi.has_analytic_partials()) {
    jet = [phi, n](const Vec& x) -> MatX<Jet> {
      const Jet f = exp(phi.jet(x) * 2.0);
      MatX<Jet> g(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = i == j ? f : Jet(0.0);
      return g;
    };
  }
  return ChartMetric(name, domain,
                     TensorField(n, value, jet, phi.field().fd()));
}

DeformationFamily gnomonic_family(int n, double t0, double half_width) {
  DeformationFamily f;
  f.name = "gnomonic-family:" + format_double(t0) + ":" + std::to_string(n);
  f.base = gnomonic_metric(t0, n, half_width);
  // 1 + (t0 + t)|x|² > 0 on the whole base domain. For t0 < 0 the base ball
  // is pulled in to half the degenerate radius² so that t_max = −t0.
  double r2 = n * half_width * half_width;
  if (t0 < 0.0 && -0.5 / t0 < r2) {
    r2 = -0.5 / t0;
    f.base = f.base.with_domain(Domain::box(n, half_width).with_ball(std::sqrt(r2)));
  }
  f.delta_g = TensorField::from_generic(
      n, [t0](const auto& x) { return gnomonic_dt_matrix(x, t0); });
  const Domain domain = f.base.domain();
  f.full_curve = [t0, n, half_width, domain](double t) {
    const ChartMetric m = gnomonic_metric(t0 + t, n, half_width);
    Domain d = domain;
    if (m.domain().ball_radius > 0.0 &&
        (d.ball_radius <= 0.0 || m.domain().ball_radius < d.ball_radius)) {
      d.ball_radius = m.domain().ball_radius;
    }
    return m.with_domain(d);
  };
  f.t_max = t0 + 1.0 / r2;
  return f;
}

MobiusMap MobiusMap::similarity(double scale, const Mat& orthogonal,
                                const Vec& shift) {
  const int n = static_cast<int>(shift.size());
  if (orthogonal.rows() != n || orthogonal.cols() != n) {
    throw InputError("Möbius similarity: matrix/shift dimension mismatch");
  }
  if (!(scale > 0.0)) throw InputError("Möbius similarity: scale must be > 0");
  if ((orthogonal.transpose() * orthogonal - Mat::Identity(n, n))
          .cwiseAbs()
          .maxCoeff() > 1e-10) {
    throw InputError("Möbius similarity: matrix is not orthogonal");
  }
  MobiusMap m;
  m.scale_ = scale;
  m.a_ = orthogonal;
  m.shift_ = shift;
  m.center_ = Vec::Zero(n);
  return m;
}

MobiusMap MobiusMap::inversion(const Vec& center, double radius) {
  if (!(radius > 0.0)) throw InputError("Möbius inversion: radius must be > 0");
  const int n = static_cast<int>(center.size());
  MobiusMap m = similarity(1.0, Mat::Identity(n, n), Vec::Zero(n));
  m.inverts_ = true;
  m.center_ = center;
  m.radius_ = radius;
  return m;
}

namespace {

// Pure similarity part of a map.
MobiusMap similarity_part(const MobiusMap& m) {
  return MobiusMap::similarity(m.scale(), m.orthogonal(), m.shift());
}

MobiusMap compose_similarities(const MobiusMap& outer, const MobiusMap& inner) {
  return MobiusMap::similarity(
      outer.scale() * inner.scale(), outer.orthogonal() * inner.orthogonal(),
      outer.scale() * outer.orthogonal() * inner.shift() + outer.shift());
}

// Similarity followed by an inversion I_{c,ρ}: x ↦ S(I_{c,ρ}(x)).
MobiusMap with_inversion(const MobiusMap& s, const Vec& c, double rho) {
  return s.compose(MobiusMap::inversion(c, rho));
}

}  // namespace

MobiusMap MobiusMap::compose(const MobiusMap& in) const {
  const int n = dim();
  if (in.dim() != n) throw InputError("Möbius compose: dimension mismatch");
  if (!inverts_) {
    MobiusMap r = compose_similarities(*this, similarity_part(in));
    if (in.inverts_) {
      r.inverts_ = true;
      r.center_ = in.center_;
      r.radius_ = in.radius_;
    }
    return r;
  }
  // this = S2 ∘ I2, in = S1 ∘ [I1]. I2 ∘ S1 = S'' ∘ I_{c,1} with
  // c = S1⁻¹(a2) and S''(y) = (ρ2²/λ1) A1 (y − c) + a2.
  const double l1 = in.scale_;
  const Vec c = in.a_.transpose() * (center_ - in.shift_) / l1;
  const double k = radius_ * radius_ / l1;
  const MobiusMap s2 = similarity_part(*this);
  const MobiusMap outer = compose_similarities(
      s2, similarity(k, in.a_, center_ - k * in.a_ * c));
  if (!in.inverts_) return with_inversion(outer, c, 1.0);

  // outer ∘ I_{c,1} ∘ I_{a1,ρ1}.
  const Vec& a1 = in.center_;
  const double r1 = in.radius_;
  if ((c - a1).norm() <= 1e-14 * (1.0 + a1.norm())) {
    // Two inversions about one centre give a homothety about it.
    const double h = 1.0 / (r1 * r1);
    return compose_similarities(
        outer, similarity(h, Mat::Identity(n, n), c - h * c));
  }
  // T = I_{c,1} ∘ I_{a1,ρ1} ∘ I_{c',1} is a similarity, with c' = I_{a1,ρ1}(c).
  const MobiusMap ia1 = inversion(a1, r1);
  const MobiusMap ic = inversion(c, 1.0);
  const Vec cp = ia1.apply(c);
  const MobiusMap icp = inversion(cp, 1.0);
  const double d = (c - a1).norm();
  for (int axis = 0; axis < n; ++axis) {
    const Vec z = cp + d * Vec::Unit(n, axis);
    const Vec z1 = icp.apply(z);
    const Vec z2 = ia1.apply(z1);
    if ((z1 - a1).norm() < 1e-3 * d || (z2 - c).norm() < 1e-3 * d) continue;
    const Vec tz = ic.apply(z2);
    const Mat j = ic.jacobian(z2) * ia1.jacobian(z1) * icp.jacobian(z);
    const double lambda = std::pow(std::abs(j.determinant()), 1.0 / n);
    const Mat a = j / lambda;
    // Re-orthogonalise against round-off.
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat q = svd.matrixU() * svd.matrixV().transpose();
    const MobiusMap t = similarity(lambda, q, tz - lambda * q * z);
    return with_inversion(compose_similarities(outer, t), cp, 1.0);
  }
  throw SingularityError("Möbius compose: no regular evaluation point");
}

MobiusMap MobiusMap::inverse() const {
  const MobiusMap s_inv = similarity(1.0 / scale_, a_.transpose(),
                                     -a_.transpose() * shift_ / scale_);
  if (!inverts_) return s_inv;
  // (S ∘ I)⁻¹ = I ∘ S⁻¹.
  return inversion(center_, radius_).compose(s_inv);
}

double MobiusMap::conformal_factor(const Vec& x) const {
  if (!inverts_) return scale_ * scale_;
  const double r2 = (x - center_).squaredNorm();
  if (r2 < kSingularRadius * kSingularRadius) {
    throw SingularityError("Möbius conformal factor at the inversion center");
  }
  const double f = scale_ * radius_ * radius_ / r2;
  return f * f;
}

ChartDiffeo MobiusMap::to_diffeo(const std::string& name) const {
  const MobiusMap self = *this;
  const MobiusMap inv = inverse();
  return ChartDiffeo::from_generic(
             name, dim(), [self](const auto& x) { return self.apply(x); })
      .with_jacobian([self](const auto& x) { return self.jacobian(x); })
      .with_inverse([inv](const Vec& y) { return inv.apply(y); });
}

ChartMetric mobius_pullback(const MobiusMap& map, const ChartMetric& metric,
                            const Domain& source_domain) {
  return pullback_metric(map.to_diffeo(), metric, source_domain);
}

}  // namespace beltrami
