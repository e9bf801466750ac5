#pragma once

// Infinitesimal deformations g⁽ᵗ⁾ = g + t δg + O(t²): the variation X of the
// Levi-Civita connection, the two equivalent cogeodesicity criteria, the
// L-construction of an exactly cogeodesical family, δK and the 2-D sphere
// identities.

#include "beltrami/chart_diffeo.hpp"
#include "beltrami/family.hpp"
#include "beltrami/metric_core.hpp"
#include "beltrami/rng.hpp"

#include <array>
#include <string>
#include <vector>

namespace beltrami {

// X at one point, X[k](i, j) = X^k_ij, from
//   2g(X(V,W),Z) = g((∇_Vσ)W,Z) + g((∇_Wσ)V,Z) − g((∇_Zσ)V,W).
struct ConnectionVariation {
  Vec x;
  Mat g;
  VariationSlice slice;
  std::vector<Mat> X;

  int dim() const { return static_cast<int>(X.size()); }
  Vec apply(const Vec& v, const Vec& w) const;
  // trace of W ↦ X(V,W); equals ½V[trace σ].
  double trace(const Vec& v) const;
  // Largest mismatch of the Koszul relation over coordinate triples.
  double koszul_residual() const;
};

ConnectionVariation connection_variation(const DeformationFamily& family,
                                         const Vec& x);
Vec connection_variation(const DeformationFamily& family, const Vec& x,
                         const Vec& v, const Vec& w);

inline constexpr double kCriterionTol = 1e-6;

// Residuals are maxima over samples of g-orthonormal frame components.
// `relative` divides by the largest frame component of ∇σ seen, which is
// what `accepted` compares against the tolerance.
struct CriterionReport {
  double residual = 0.0;
  double scale = 0.0;
  double relative = 0.0;
  bool accepted = false;
  double tol = kCriterionTol;
  int samples = 0;
  Vec worst_point;
};

// ‖X(V,W) − (V[trσ]W + W[trσ]V)/(2(n+1))‖_g.
CriterionReport infinitesimal_cogeodesic_test(const DeformationFamily& family,
                                              const std::vector<Vec>& samples,
                                              double tol = kCriterionTol);

// g((∇_Zα)V,W) − ½V[trα]g(Z,W) − ½W[trα]g(Z,V).
CriterionReport alpha_criterion_test(const DeformationFamily& family,
                                     const std::vector<Vec>& samples,
                                     double tol = kCriterionTol);

// α = σ − (trσ/(n+1)) id, L⁽ᵗ⁾ = id − tα and
// g̃⁽ᵗ⁾(V,W) = g(L⁻¹V, W)/det L.
class AlphaTensor {
 public:
  explicit AlphaTensor(DeformationFamily family);

  const DeformationFamily& family() const { return family_; }
  int dim() const { return family_.dim(); }

  Mat alpha(const Vec& x) const;
  MatX<Jet> alpha_jets(const Vec& x) const;
  double trace_alpha(const Vec& x) const;
  Mat L(double t, const Vec& x) const;

  // Throws RangeError where L⁽ᵗ⁾ is not positive-definite.
  Mat gtilde_value(double t, const Vec& x) const;
  MatX<Jet> gtilde_jets(double t, const Vec& x) const;
  ChartMetric gtilde(double t) const;

  // 1/max ρ(α) over the samples: L⁽ᵗ⁾ stays positive-definite below it.
  double t_limit(const std::vector<Vec>& samples) const;

 private:
  DeformationFamily family_;
};

AlphaTensor build_projective_family(const DeformationFamily& family);

struct TangentPlane {
  Vec x;
  Vec u;
  Vec v;
};

// Uniform points in the domain shrunk about its centre by `shrink`.
std::vector<Vec> sample_domain(const Domain& domain, SplitMix64& rng,
                               int count, double shrink = 0.9);
std::vector<TangentPlane> random_planes(const Domain& domain, SplitMix64& rng,
                                        int count, double shrink = 0.9);

struct DeltaCurvature {
  std::vector<double> delta_k;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double spread = 0.0;
  // max |δK − D(t/2)|, the size of the Richardson correction.
  double richardson_correction = 0.0;
  // Richardson correction plus the rounding error of the differences.
  double noise_floor = 0.0;
  double t_step = 0.0;
};

inline constexpr double kDeltaCurvatureStep = 1e-3;

// δK(Π) from central differences D(h) = (K⁽ʰ⁾ − K⁽⁻ʰ⁾)/(2h) at h = t and
// t/2, combined as (4D(t/2) − D(t))/3.
DeltaCurvature delta_curvature(const DeformationFamily& family,
                               const std::vector<TangentPlane>& planes,
                               double t_step = kDeltaCurvatureStep);

// The unit sphere du² + cos²u dv² with δg = [[δE, δF], [δF, δG]].
inline constexpr double kSphereBandLimit = 1.5;

// Closed-form X^k_ij of the sphere chart, X[k](i, j).
std::vector<Mat> sphere2d_table(const MatX<Jet>& delta_g, double u);

struct Sphere2dReport {
  double table_residual = 0.0;   // table vs connection_variation
  std::array<double, 4> tsja{};  // the four cogeodesicity conditions
  double tsja_residual = 0.0;
  double odedeltaF_residual = 0.0;
  // δF − (½∂₂X¹₁₁ − ∂₁X²₂₂ − ½tan u X²₂₂) and
  // δF − (½∂₁X²₂₂ − ∂₂X¹₁₁ − ½tan u X²₂₂).
  std::array<double, 2> delta_k_ij{};
  // δK = −½∂₁X¹₁₁ − δE per sample.
  std::vector<double> delta_k;
  bool identities_evaluated = false;
  int samples = 0;
};

// Throws DomainError for |u| > kSphereBandLimit.
Sphere2dReport sphere2d_identities(const TensorField& delta_g,
                                   const std::vector<Vec>& samples,
                                   bool assert_tsja = true);

// Families.

// Drops the full curve so that at(t) = g + tδg.
DeformationFamily linearized_family(const DeformationFamily& family);

// Ψ* of every member of `target`.
DeformationFamily pullback_family(const std::string& name,
                                  const ChartDiffeo& psi,
                                  const DeformationFamily& target,
                                  const Domain& source);

DeformationFamily zero_family(int n);
// g⁽ᵗ⁾ = (1 + 2ct) δ.
DeformationFamily homothety_family(int n, double c);
// δg = x₁ dx₂⊗dx₂ on the Euclidean plane.
DeformationFamily shear_family();
// g⁽ᵗ⁾ = e^{2t x₁} δ.
DeformationFamily conformal_family();
// Pullbacks of δ by x ↦ x/(1 + t a·x).
DeformationFamily projective_family(const Vec& a);
// The gnomonic family around the unit sphere pulled back to the C = 1
// Riemannian-form chart.
DeformationFamily sphere_pullback_family();
// The same family transferred to the (u, v) chart of du² + cos²u dv².
DeformationFamily sphere_uv_gnomonic_family();

struct DeformationFixture {
  DeformationFamily family;
  bool cogeodesic = false;
};

std::vector<DeformationFixture> deformation_fixtures();
// Throws InputError for unknown names.
DeformationFixture deformation_fixture(const std::string& name);

}  // namespace beltrami
