#pragma once

#include "beltrami/jet.hpp"
#include "beltrami/linalg.hpp"
#include "beltrami/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace beltrami {

// Finite-difference controls. First partials use central differences with
// `first`; second partials use fourth-order five-point stencils with
// `second`, which must be much larger than `first` at double precision.
struct FiniteDifference {
  double first = 1e-5;
  double second = 1e-3;
};

// A matrix-valued field on a chart together with exact or finite-difference
// partials up to second order, exposed uniformly as a matrix of jets.
class TensorField {
 public:
  using ValueFn = std::function<Mat(const Vec&)>;
  using JetFn = std::function<MatX<Jet>(const Vec&)>;

  TensorField() = default;
  TensorField(int dim, ValueFn value, JetFn jet = {},
              FiniteDifference fd = {});

  // `f` is a generic callable: f(const VecX<S>&) -> MatX<S>.
  template <typename F>
  static TensorField from_generic(int dim, F f, FiniteDifference fd = {}) {
    auto shared = std::make_shared<F>(std::move(f));
    return TensorField(
        dim, [shared](const Vec& x) -> Mat { return (*shared)(x); },
        [shared](const Vec& x) -> MatX<Jet> {
          return (*shared)(seed_jets(x));
        },
        fd);
  }

  static TensorField constant(const Mat& value);

  int dim() const { return dim_; }
  bool valid() const { return static_cast<bool>(value_); }
  bool has_analytic_partials() const { return static_cast<bool>(jet_); }
  const FiniteDifference& fd() const { return fd_; }

  Mat value(const Vec& x) const { return value_(x); }
  // Analytic jets when available, finite differences otherwise.
  MatX<Jet> jet(const Vec& x) const;
  // Always finite differences (used to cross-check analytic partials).
  MatX<Jet> fd_jet(const Vec& x) const;

  // Drops analytic partials so every consumer falls back to differences.
  TensorField without_partials() const;

  TensorField scaled(double s) const;
  // a + s * b, jets combined entrywise.
  static TensorField combine(const TensorField& a, double s,
                             const TensorField& b);

 private:
  int dim_ = 0;
  ValueFn value_;
  JetFn jet_;
  FiniteDifference fd_;
};

// Scalar field with the same partial-derivative contract as TensorField.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(TensorField field) : field_(std::move(field)) {}

  // `f` is a generic callable: f(const VecX<S>&) -> S.
  template <typename F>
  static ScalarField from_generic(int dim, F f, FiniteDifference fd = {}) {
    auto shared = std::make_shared<F>(std::move(f));
    return ScalarField(TensorField(
        dim,
        [shared](const Vec& x) -> Mat {
          Mat m(1, 1);
          m(0, 0) = (*shared)(x);
          return m;
        },
        [shared](const Vec& x) -> MatX<Jet> {
          MatX<Jet> m(1, 1);
          m(0, 0) = (*shared)(seed_jets(x));
          return m;
        },
        fd));
  }

  static ScalarField from_values(int dim, std::function<double(const Vec&)> f,
                                 FiniteDifference fd = {});

  int dim() const { return field_.dim(); }
  double value(const Vec& x) const { return field_.value(x)(0, 0); }
  Jet jet(const Vec& x) const { return densify(field_.jet(x)(0, 0), dim()); }
  bool has_analytic_partials() const { return field_.has_analytic_partials(); }
  const TensorField& field() const { return field_; }

 private:
  TensorField field_;
};

// A Riemannian metric on a chart domain. Positive-definiteness is checked
// where the metric is inverted, not globally.
class ChartMetric {
 public:
  ChartMetric() = default;
  ChartMetric(std::string name, Domain domain, TensorField field);

  const std::string& name() const { return name_; }
  int dim() const { return field_.dim(); }
  const Domain& domain() const { return domain_; }
  const TensorField& field() const { return field_; }
  bool has_analytic_partials() const { return field_.has_analytic_partials(); }

  // Throws DomainError outside the domain.
  Mat value(const Vec& x) const;
  MatX<Jet> jet(const Vec& x) const;
  // Without domain checks; used by integrators that handle exits themselves.
  Mat value_unchecked(const Vec& x) const { return field_.value(x); }

  ChartMetric with_domain(Domain domain) const;
  ChartMetric renamed(std::string name) const;
  ChartMetric without_partials() const;

  void require_inside(const Vec& x) const;

 private:
  std::string name_;
  Domain domain_;
  TensorField field_;
};

// Unpacks a jet matrix into value, first partials d[k] and second partials
// dd[k * n + l].
struct Partials {
  Mat value;
  std::vector<Mat> d;
  std::vector<Mat> dd;
};

Partials unpack(const MatX<Jet>& jets, int dim);

// Assemble a jet matrix from explicit value and partial matrices.
MatX<Jet> pack(const Partials& p);

}  // namespace beltrami
