#pragma once

#include "beltrami/chart_metric.hpp"
#include "beltrami/jet.hpp"
#include "beltrami/linalg.hpp"
#include "beltrami/taylor.hpp"
#include "beltrami/types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

namespace beltrami {

// A smooth map between charts of equal dimension. Built from a generic
// callable so it can be evaluated on values, jets (Jacobian and second
// derivatives) and Taylor series (exact image-curve jets).
class ChartDiffeo {
 public:
  using ValueFn = std::function<Vec(const Vec&)>;
  using JetFn = std::function<VecX<Jet>(const VecX<Jet>&)>;
  using TaylorFn = std::function<VecX<Taylor3>(const VecX<Taylor3>&)>;
  using JacobianJetFn = std::function<MatX<Jet>(const VecX<Jet>&)>;

  ChartDiffeo() = default;

  // `f` is generic: f(const VecX<S>&) -> VecX<S>.
  template <typename F>
  static ChartDiffeo from_generic(std::string name, int dim, F f) {
    auto shared = std::make_shared<F>(std::move(f));
    ChartDiffeo d;
    d.name_ = std::move(name);
    d.dim_ = dim;
    d.value_ = [shared](const Vec& x) -> Vec { return (*shared)(x); };
    d.jet_ = [shared](const VecX<Jet>& x) -> VecX<Jet> { return (*shared)(x); };
    d.taylor_ = [shared](const VecX<Taylor3>& x) -> VecX<Taylor3> {
      return (*shared)(x);
    };
    return d;
  }

  // Adds a generic analytic Jacobian j(const VecX<S>&) -> MatX<S>, which
  // lets pullback metrics carry exact second partials.
  template <typename J>
  ChartDiffeo with_jacobian(J j) const {
    auto shared = std::make_shared<J>(std::move(j));
    ChartDiffeo d = *this;
    d.jacobian_jet_ = [shared](const VecX<Jet>& x) -> MatX<Jet> {
      return (*shared)(x);
    };
    return d;
  }

  ChartDiffeo with_inverse(ValueFn inverse) const {
    ChartDiffeo d = *this;
    d.inverse_ = std::move(inverse);
    return d;
  }

  static ChartDiffeo identity(int dim);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  bool has_inverse() const { return static_cast<bool>(inverse_); }
  bool has_analytic_jacobian() const { return static_cast<bool>(jacobian_jet_); }

  Vec apply(const Vec& x) const { return value_(x); }
  VecX<Taylor3> apply(const VecX<Taylor3>& x) const { return taylor_(x); }
  VecX<Jet> apply_jets(const Vec& x) const { return jet_(seed_jets(x)); }
  VecX<Jet> apply(const VecX<Jet>& x) const { return jet_(x); }
  Vec inverse(const Vec& y) const;

  Mat jacobian(const Vec& x) const;
  // Jacobian entries as jets in x (exact first and second partials); only
  // with an analytic Jacobian.
  MatX<Jet> jacobian_jets(const Vec& x) const;

  // this ∘ inner.
  ChartDiffeo after(const ChartDiffeo& inner) const;

 private:
  std::string name_;
  int dim_ = 0;
  ValueFn value_;
  JetFn jet_;
  TaylorFn taylor_;
  JacobianJetFn jacobian_jet_;
  ValueFn inverse_;
};

// f(y) composed with y(x), both as second-order jets.
Jet compose(const Jet& f, const VecX<Jet>& y, int dim);

// (Ψ*g)(x) = J(x)ᵀ g(Ψ(x)) J(x) on `source`. Exact second partials need an
// analytic Jacobian on Ψ and analytic partials on g; otherwise the pullback
// falls back to finite differences. Throws DomainError when Ψ(x) leaves the
// target domain.
ChartMetric pullback_metric(const ChartDiffeo& psi, const ChartMetric& target,
                            const Domain& source);

// Jᵀ f(Ψ(x)) J for a symmetric field that is not itself a metric (a
// variation δg, say). No domain checks.
TensorField pullback_field(const ChartDiffeo& psi, const TensorField& field);

}  // namespace beltrami
