#include "beltrami/chart_metric.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace beltrami {

Domain Domain::box(int dim, double half_width) {
  return box(Vec::Constant(dim, -half_width), Vec::Constant(dim, half_width));
}

Domain Domain::box(const Vec& lower, const Vec& upper) {
  if (lower.size() != upper.size()) {
    throw InputError("domain bounds have different dimensions");
  }
  Domain d;
  d.lower = lower;
  d.upper = upper;
  return d;
}

bool Domain::contains(const Vec& x) const {
  if (x.size() != lower.size()) return false;
  for (int i = 0; i < x.size(); ++i) {
    if (!(x(i) > lower(i) && x(i) < upper(i))) return false;
  }
  return ball_radius <= 0.0 || x.norm() < ball_radius;
}

double Domain::margin(const Vec& x) const {
  if (!contains(x)) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < x.size(); ++i) {
    m = std::min({m, x(i) - lower(i), upper(i) - x(i)});
  }
  if (ball_radius > 0.0) m = std::min(m, ball_radius - x.norm());
  return m;
}

Domain Domain::with_ball(double radius) const {
  Domain d = *this;
  d.ball_radius = radius;
  return d;
}

bool is_positive_definite(const Mat& m) {
  if (!m.allFinite()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    return false;
  }
  Eigen::LLT<Mat> llt(m);
  return llt.info() == Eigen::Success;
}

TensorField::TensorField(int dim, ValueFn value, JetFn jet,
                         FiniteDifference fd)
    : dim_(dim), value_(std::move(value)), jet_(std::move(jet)), fd_(fd) {}

TensorField TensorField::constant(const Mat& value) {
  const int n = static_cast<int>(value.rows());
  return TensorField(
      n, [value](const Vec&) { return value; },
      [value](const Vec&) { return lift<Jet>(value); });
}

MatX<Jet> TensorField::jet(const Vec& x) const {
  if (jet_) return jet_(x);
  return fd_jet(x);
}

MatX<Jet> TensorField::fd_jet(const Vec& x) const {
  const int n = dim_;
  Partials p;
  p.value = value_(x);
  p.d.resize(n);
  p.dd.resize(static_cast<size_t>(n) * n);

  const double h1 = fd_.first;
  for (int k = 0; k < n; ++k) {
    Vec xp = x, xm = x;
    xp(k) += h1;
    xm(k) -= h1;
    p.d[k] = (value_(xp) - value_(xm)) / (2.0 * h1);
  }

  const double h = fd_.second;
  auto at = [&](int k, int a, int l, int b) {
    Vec y = x;
    y(k) += a * h;
    y(l) += b * h;
    return value_(y);
  };
  // Fourth-order first-derivative weights at offsets -2..2.
  const double w1[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
  for (int k = 0; k < n; ++k) {
    const Mat dkk = (-at(k, 2, k, 0) + 16.0 * at(k, 1, k, 0) - 30.0 * p.value +
                     16.0 * at(k, -1, k, 0) - at(k, -2, k, 0)) /
                    (12.0 * h * h);
    p.dd[k * n + k] = dkk;
    for (int l = k + 1; l < n; ++l) {
      Mat acc = Mat::Zero(p.value.rows(), p.value.cols());
      for (int a = -2; a <= 2; ++a) {
        if (w1[a + 2] == 0.0) continue;
        for (int b = -2; b <= 2; ++b) {
          if (w1[b + 2] == 0.0) continue;
          acc += (w1[a + 2] * w1[b + 2]) * at(k, a, l, b);
        }
      }
      acc /= 144.0 * h * h;
      p.dd[k * n + l] = acc;
      p.dd[l * n + k] = acc;
    }
  }
  return pack(p);
}

TensorField TensorField::without_partials() const {
  return TensorField(dim_, value_, {}, fd_);
}

TensorField TensorField::scaled(double s) const {
  auto value = value_;
  JetFn jet;
  if (jet_) {
    auto j = jet_;
    jet = [j, s](const Vec& x) -> MatX<Jet> {
      MatX<Jet> m = j(x);
      for (int i = 0; i < m.rows(); ++i)
        for (int k = 0; k < m.cols(); ++k) m(i, k) = m(i, k) * s;
      return m;
    };
  }
  return TensorField(
      dim_, [value, s](const Vec& x) -> Mat { return s * value(x); }, jet, fd_);
}

TensorField TensorField::combine(const TensorField& a, double s,
                                 const TensorField& b) {
  if (a.dim() != b.dim()) throw InputError("combine: dimension mismatch");
  auto va = a.value_;
  auto vb = b.value_;
  // Each side contributes its own best jets (analytic or differenced).
  JetFn jet = [a, b, s](const Vec& x) -> MatX<Jet> {
    MatX<Jet> ja = a.jet(x);
    const MatX<Jet> jb = b.jet(x);
    for (int i = 0; i < ja.rows(); ++i)
      for (int k = 0; k < ja.cols(); ++k) ja(i, k) = ja(i, k) + jb(i, k) * s;
    return ja;
  };
  const bool analytic = a.has_analytic_partials() && b.has_analytic_partials();
  return TensorField(
      a.dim(), [va, vb, s](const Vec& x) -> Mat { return va(x) + s * vb(x); },
      analytic ? jet : JetFn{}, a.fd());
}

ScalarField ScalarField::from_values(int dim,
                                     std::function<double(const Vec&)> f,
                                     FiniteDifference fd) {
  return ScalarField(TensorField(
      dim,
      [f](const Vec& x) {
        Mat m(1, 1);
        m(0, 0) = f(x);
        return m;
      },
      {}, fd));
}

ChartMetric::ChartMetric(std::string name, Domain domain, TensorField field)
    : name_(std::move(name)), domain_(std::move(domain)),
      field_(std::move(field)) {
  if (field_.dim() < 1 || domain_.dim() != field_.dim()) {
    throw InputError("metric '" + name_ + "': domain/field dimension mismatch");
  }
}

void ChartMetric::require_inside(const Vec& x) const {
  if (x.size() != dim() || !domain_.contains(x)) {
    std::ostringstream os;
    os << "point (" << x.transpose() << ") is outside the domain of metric '"
       << name_ << "'";
    throw DomainError(os.str());
  }
}

Mat ChartMetric::value(const Vec& x) const {
  require_inside(x);
  return field_.value(x);
}

MatX<Jet> ChartMetric::jet(const Vec& x) const {
  require_inside(x);
  if (!field_.has_analytic_partials() &&
      domain_.margin(x) < 2.0 * field_.fd().second) {
    std::ostringstream os;
    os << "point (" << x.transpose()
       << ") is too close to the boundary for finite differences on metric '"
       << name_ << "'";
    throw DomainError(os.str());
  }
  return field_.jet(x);
}

ChartMetric ChartMetric::with_domain(Domain domain) const {
  return ChartMetric(name_, std::move(domain), field_);
}

ChartMetric ChartMetric::renamed(std::string name) const {
  return ChartMetric(std::move(name), domain_, field_);
}

ChartMetric ChartMetric::without_partials() const {
  return ChartMetric(name_ + "/fd", domain_, field_.without_partials());
}

Partials unpack(const MatX<Jet>& jets, int dim) {
  Partials p;
  const int r = static_cast<int>(jets.rows()), c = static_cast<int>(jets.cols());
  p.value.resize(r, c);
  p.d.assign(dim, Mat::Zero(r, c));
  p.dd.assign(static_cast<size_t>(dim) * dim, Mat::Zero(r, c));
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) {
      const Jet& e = jets(i, j);
      p.value(i, j) = e.v;
      if (e.is_constant()) continue;
      for (int k = 0; k < dim; ++k) {
        p.d[k](i, j) = e.d(k);
        for (int l = 0; l < dim; ++l) p.dd[k * dim + l](i, j) = e.h(k, l);
      }
    }
  }
  return p;
}

MatX<Jet> pack(const Partials& p) {
  const int n = static_cast<int>(p.d.size());
  MatX<Jet> m(p.value.rows(), p.value.cols());
  for (int i = 0; i < p.value.rows(); ++i) {
    for (int j = 0; j < p.value.cols(); ++j) {
      Jet::Grad g(n);
      Jet::Hess h(n, n);
      for (int k = 0; k < n; ++k) {
        g(k) = p.d[k](i, j);
        for (int l = 0; l < n; ++l) h(k, l) = p.dd[k * n + l](i, j);
      }
      m(i, j) = Jet(p.value(i, j), g, h);
    }
  }
  return m;
}

}  // namespace beltrami
