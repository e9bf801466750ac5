#include "beltrami/chart_diffeo.hpp"

#include <sstream>

namespace beltrami {

ChartDiffeo ChartDiffeo::identity(int dim) {
  return from_generic("identity", dim, [](const auto& x) { return x; })
      .with_jacobian([dim](const auto& x) {
        using S = typename std::decay_t<decltype(x)>::Scalar;
        return MatX<S>::Identity(dim, dim).eval();
      })
      .with_inverse([](const Vec& y) { return y; });
}

Vec ChartDiffeo::inverse(const Vec& y) const {
  if (!inverse_) throw InputError("map '" + name_ + "' has no inverse");
  return inverse_(y);
}

Mat ChartDiffeo::jacobian(const Vec& x) const {
  const VecX<Jet> y = apply_jets(x);
  Mat j = Mat::Zero(y.size(), dim_);
  for (int i = 0; i < y.size(); ++i) {
    if (y(i).is_constant()) continue;
    for (int k = 0; k < dim_; ++k) j(i, k) = y(i).d(k);
  }
  return j;
}

MatX<Jet> ChartDiffeo::jacobian_jets(const Vec& x) const {
  if (!jacobian_jet_) {
    throw InputError("map '" + name_ + "' has no analytic Jacobian");
  }
  return jacobian_jet_(seed_jets(x));
}

ChartDiffeo ChartDiffeo::after(const ChartDiffeo& inner) const {
  if (inner.dim_ != dim_) throw InputError("compose: dimension mismatch");
  ChartDiffeo d;
  d.name_ = name_ + "∘" + inner.name_;
  d.dim_ = dim_;
  auto outer = *this;
  d.value_ = [outer, inner](const Vec& x) { return outer.value_(inner.value_(x)); };
  d.jet_ = [outer, inner](const VecX<Jet>& x) { return outer.jet_(inner.jet_(x)); };
  d.taylor_ = [outer, inner](const VecX<Taylor3>& x) {
    return outer.taylor_(inner.taylor_(x));
  };
  if (jacobian_jet_ && inner.jacobian_jet_) {
    d.jacobian_jet_ = [outer, inner](const VecX<Jet>& x) {
      return multiply(outer.jacobian_jet_(inner.jet_(x)), inner.jacobian_jet_(x));
    };
  }
  if (inverse_ && inner.inverse_) {
    d.inverse_ = [outer, inner](const Vec& y) {
      return inner.inverse_(outer.inverse_(y));
    };
  }
  return d;
}

Jet compose(const Jet& f, const VecX<Jet>& y, int dim) {
  if (f.is_constant()) return Jet(f.v);
  const int m = static_cast<int>(y.size());
  Jet::Grad d = Jet::Grad::Zero(dim);
  Jet::Hess h = Jet::Hess::Zero(dim, dim);
  for (int a = 0; a < m; ++a) {
    const Jet ya = densify(y(a), dim);
    d += f.d(a) * ya.d;
    h += f.d(a) * ya.h;
    for (int b = 0; b < m; ++b) {
      const Jet yb = densify(y(b), dim);
      h += f.h(a, b) * ya.d * yb.d.transpose();
    }
  }
  return Jet(f.v, d, h);
}

namespace {

Mat pullback_value(const ChartDiffeo& psi, const ChartMetric& target,
                   const Vec& x) {
  const Vec y = psi.apply(x);
  if (!target.domain().contains(y)) {
    std::ostringstream os;
    os << "pullback: image (" << y.transpose() << ") of (" << x.transpose()
       << ") is outside the target domain";
    throw DomainError(os.str());
  }
  const Mat j = psi.jacobian(x);
  return j.transpose() * target.value(y) * j;
}

}  // namespace

ChartMetric pullback_metric(const ChartDiffeo& psi, const ChartMetric& target,
                            const Domain& source) {
  if (psi.dim() != target.dim() || source.dim() != psi.dim()) {
    throw InputError("pullback: dimension mismatch");
  }
  const int n = psi.dim();
  TensorField::ValueFn value = [psi, target](const Vec& x) {
    return pullback_value(psi, target, x);
  };
  TensorField::JetFn jet;
  if (psi.has_analytic_jacobian() && target.has_analytic_partials()) {
    jet = [psi, target, n](const Vec& x) -> MatX<Jet> {
      const VecX<Jet> y = psi.apply_jets(x);
      const Vec yv = values(y);
      if (!target.domain().contains(yv)) {
        throw DomainError("pullback: image point is outside the target domain");
      }
      const MatX<Jet> gy = target.jet(yv);
      MatX<Jet> gx(n, n);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) gx(i, k) = compose(gy(i, k), y, n);
      const MatX<Jet> j = psi.jacobian_jets(x);
      return multiply(MatX<Jet>(j.transpose()), multiply(gx, j));
    };
  }
  return ChartMetric(target.name() + "/pullback(" + psi.name() + ")", source,
                     TensorField(n, value, jet, target.field().fd()));
}

TensorField pullback_field(const ChartDiffeo& psi, const TensorField& field) {
  if (psi.dim() != field.dim()) throw InputError("pullback: dimension mismatch");
  const int n = psi.dim();
  TensorField::ValueFn value = [psi, field](const Vec& x) -> Mat {
    const Mat j = psi.jacobian(x);
    return j.transpose() * field.value(psi.apply(x)) * j;
  };
  TensorField::JetFn jet;
  if (psi.has_analytic_jacobian() && field.has_analytic_partials()) {
    jet = [psi, field, n](const Vec& x) -> MatX<Jet> {
      const VecX<Jet> y = psi.apply_jets(x);
      const MatX<Jet> fy = field.jet(values(y));
      MatX<Jet> fx(n, n);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) fx(i, k) = compose(fy(i, k), y, n);
      const MatX<Jet> j = psi.jacobian_jets(x);
      return multiply(MatX<Jet>(j.transpose()), multiply(fx, j));
    };
  }
  return TensorField(n, value, jet, field.fd());
}

}  // namespace beltrami
