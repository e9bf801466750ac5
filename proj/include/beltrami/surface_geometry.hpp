#pragma once

// Surfaces (u, v) ↦ x in a 3-D chart seen from two ambient metrics ḡ and
// g̃̄: fundamental forms, shape operators, the normal split Ñ = φN + Ñᵗ,
// the difference tensor X̄ and the identities relating them.
//
// Shape operator sign: A(V) = −∇̄_V N, so the unit sphere with outward normal
// has A = −id and H = ½ trace A = −1.

#include "beltrami/chart_metric.hpp"
#include "beltrami/geodesic.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace beltrami {

inline constexpr double kSurfaceMeshStep = 1e-3;
inline constexpr double kUmbilicTol = 1e-9;
inline constexpr double kMinGramDeterminant = 1e-10;

struct SurfaceJet {
  Vec x;
  Vec xu, xv;
  Vec xuu, xuv, xvv;

  Mat tangent() const;  // columns xu, xv
};

class SurfacePatch {
 public:
  using ValueFn = std::function<Vec(const Vec&)>;
  using JetFn = std::function<VecX<Jet>(const VecX<Jet>&)>;

  SurfacePatch() = default;
  // Value-only immersion; partials by five-point differences with `step`.
  SurfacePatch(std::string name, Domain param, ValueFn value,
               double step = kSurfaceMeshStep);

  // `f` is generic: f(const VecX<S>& uv) -> VecX<S> with three entries.
  template <typename F>
  static SurfacePatch from_generic(std::string name, Domain param, F f) {
    auto shared = std::make_shared<F>(std::move(f));
    SurfacePatch s(std::move(name), std::move(param),
                   [shared](const Vec& uv) -> Vec { return (*shared)(uv); });
    s.jet_ = [shared](const VecX<Jet>& uv) -> VecX<Jet> { return (*shared)(uv); };
    return s;
  }

  const std::string& name() const { return name_; }
  const Domain& param() const { return param_; }
  bool analytic() const { return static_cast<bool>(jet_); }
  double step() const { return step_; }
  // Set when a requested patch had to be shrunk to stay in the chart.
  bool truncated = false;

  Vec point(const Vec& uv) const { return value_(uv); }
  SurfaceJet jet(const Vec& uv) const;

 private:
  std::string name_;
  Domain param_;
  ValueFn value_;
  JetFn jet_;
  double step_ = kSurfaceMeshStep;
};

struct ShapeData {
  SurfaceJet jet;
  Mat first_form;   // I in the (xu, xv) basis
  Vec N;            // ḡ-unit normal along ḡ⁻¹(xu × xv)
  Mat second_form;  // II(x_a, x_b) = ḡ(∇̄_{x_a} x_b, N)
  Mat A;            // shape operator in the (xu, xv) basis, I⁻¹ II
  double H = 0.0;
  double lambda1 = 0.0;  // λ1 ≥ λ2
  double lambda2 = 0.0;
  Vec e1, e2;            // ḡ-unit principal directions
  bool umbilic = false;
  // max |ḡ(∇̄_{x_a} x_b, N) + ḡ(∇̄_{x_a} N, x_b)|, with ∂N differenced
  // on the mesh; NaN where the mesh does not fit in the parameter domain.
  double gauss_residual = 0.0;
};

// Throws MetricError at irregular points (Gram determinant below
// kMinGramDeterminant).
ShapeData shape_data(const SurfacePatch& surface, const ChartMetric& ambient,
                     const Vec& uv);

struct TwoMetricSplit {
  Mat sigma;               // g̃̄ = σ⌟ḡ
  Vec sigma_eigenvalues;   // ascending
  Mat s;                   // ḡ-orthonormal eigenvectors (columns)
  Vec N;
  Vec Ntilde;
  double phi = 0.0;        // Ñ = φN + Ñᵗ
  Vec Nt;
  std::vector<Mat> Xbar;   // Xbar[k](i, j) = Γ̃̄^k_ij − Γ̄^k_ij
  // |Ñ − g̃̄-unit normal| and |g̃̄(Ñ, Ñ) − 1|.
  double normal_residual = 0.0;
  double unit_residual = 0.0;

  Vec xbar(const Vec& v, const Vec& w) const;
};

TwoMetricSplit two_metric_split(const SurfacePatch& surface,
                                const ChartMetric& g_bar,
                                const ChartMetric& g_tilde_bar, const Vec& uv);

// div(Ñᵗ) on (M, g) from the mesh.
double divergence_Nt(const SurfacePatch& surface, const ChartMetric& g_bar,
                     const ChartMetric& g_tilde_bar, const Vec& uv,
                     double mesh = kSurfaceMeshStep);

struct HHtildeReport {
  double residual = 0.0;  // |2H̃ − 2φH + div(Ñᵗ) + trace{V ↦ X̄(V,Ñ)ᵗ}|
  double H = 0.0;
  double H_tilde = 0.0;
  double phi = 0.0;
  double div_Nt = 0.0;
  double trace_X = 0.0;
};

HHtildeReport hhtilde_residual(const SurfacePatch& surface,
                               const ChartMetric& g_bar,
                               const ChartMetric& g_tilde_bar, const Vec& uv);

struct DivNEigenframe {
  double div_numeric = 0.0;  // mesh divergence of Ñᵗ at p
  double rhs = 0.0;          // nabla_sigma_term + lambda_term
  double nabla_sigma_term = 0.0;
  double lambda_term = 0.0;  // Σ √σ3 (1/σ3 − 1/σi) λi
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Vec sigma;                 // (σ1, σ2, σ3) along (e1, e2, N)
  double coefficient = 0.0;  // √σ3 (1/σ2 − 1/σ1)
  double alignment = 0.0;    // worst eigenvector residual of e1, e2, N
};

inline constexpr double kAlignmentTol = 1e-6;

// Evaluates both sides of the divergence formula at a point where the
// principal frame (e1, e2, N) diagonalises σ. Throws PreconditionError
// otherwise.
DivNEigenframe divN_eigenframe(const SurfacePatch& surface,
                               const ChartMetric& g_bar,
                               const ChartMetric& g_tilde_bar, const Vec& uv);

struct LambdaCoefficient {
  double extracted = 0.0;  // slope of div(Ñᵗ)(p) in ℓ between the two surfaces
  double predicted = 0.0;  // √σ3 (1/σ2 − 1/σ1)
  double intercept = 0.0;  // div(Ñᵗ)(p) extrapolated to ℓ = 0
  Vec sigma;               // (σ1, σ2, σ3) along (v1, v2, v3)
};

// Measures the ℓ-dependence of div(Ñᵗ) at p on two lemma surfaces with
// principal curvatures (ℓ, −ℓ) along (v1, v2), ℓ ∈ {ell_a, ell_b}.
LambdaCoefficient lambda1_coefficient(const ChartMetric& g_bar,
                                      const ChartMetric& g_tilde_bar,
                                      const Vec& p, const Vec& v1,
                                      const Vec& v2, double ell_a = 1.0,
                                      double ell_b = 0.5);

// exp_p of the graph (a, b) ↦ a v1 + b v2 + (ℓ/2)(a² − b²) v3 in (T_p, ḡ_p),
// v3 the unit normal with (v1, v2, v3) positively oriented. The patch is
// halved (and flagged truncated) until its corners stay in the chart.
SurfacePatch lemma_comin2_surface(const ChartMetric& ambient, const Vec& p,
                                  const Vec& v1, const Vec& v2, double ell,
                                  double half_width = 0.05,
                                  double step = kDefaultStep);

}  // namespace beltrami
