#pragma once

// Tests classifying a chart map against geodesic, circle and sphere
// preservation, plus the conformal-factor machinery behind them.

#include "beltrami/chart_diffeo.hpp"
#include "beltrami/geodesic.hpp"
#include "beltrami/rng.hpp"
#include "beltrami/space_forms.hpp"

#include <vector>

namespace beltrami {

// g2 = e^{2φ} g tested pointwise through the eigenvalues of g⁻¹g2.
struct ConformalFactor {
  bool conformal = false;
  std::vector<double> phi;    // ½ log(mean eigenvalue) per sample
  double residual = 0.0;      // worst (λmax − λmin)/mean eigenvalue
  double anisotropy = 1.0;    // worst λmax/λmin
  Vec worst_point;
};

ConformalFactor conformal_test(const ChartMetric& g, const ChartMetric& g2,
                               const std::vector<Vec>& sample,
                               double tol = 1e-8);

// Common result of the trial-based tests.
struct TrialReport {
  double residual = 0.0;   // headline residual (max over trials)
  double secondary = 0.0;  // test-specific second residual
  int trials = 0;
  int rejected = 0;        // truncated paths or degenerate fits
  std::vector<double> per_trial;
  int worst_trial = -1;
};

struct GeodesicTrial {
  Vec p;
  Vec v;
  double length = 1.0;
};

// residual = max g-Frenet k1 along g2-geodesics, secondary = max relative
// speed drift of those geodesics.
TrialReport cogeodesic_test(const ChartMetric& g, const ChartMetric& g2,
                            const std::vector<GeodesicTrial>& trials,
                            double step = kDefaultStep);

struct CircleTrial {
  Vec p;
  Vec t0;  // g-unit tangent
  Vec e0;  // g-unit normal, g-orthogonal to t0
  double k1 = 1.0;
  double length = 1.0;
};

// Random geodesic-circle trials with centres in a box, tangent frames drawn
// uniformly and k1 in [k1_lo, k1_hi].
std::vector<CircleTrial> random_circle_trials(const ChartMetric& g,
                                              SplitMix64& rng, int count,
                                              const Vec& lo, const Vec& hi,
                                              double k1_lo, double k1_hi,
                                              double arc = 1.0);

// residual = max stdev(k1) of the image curves under target, secondary =
// max |k2|.
TrialReport concircular_test(const ChartMetric& g, const ChartDiffeo& psi,
                             const ChartMetric& target,
                             const std::vector<CircleTrial>& trials,
                             double step = kDefaultStep, int stride = 10);

struct SphereFit {
  Vec center;
  double radius = 0.0;
  double rms_residual = 0.0;
  bool ok = false;
};

// Algebraic least-squares sphere |y|² − 2c·y + (c·c − ρ²) = 0.
SphereFit fit_sphere(const std::vector<Vec>& points);

// Deterministic direction sets: equally spaced angles in 2-D, an antipodally
// symmetric Fibonacci set in 3-D, seeded Gaussian directions (with their
// antipodes) otherwise. `count` is rounded up to an even number.
std::vector<Vec> unit_directions(int n, int count);

struct SphereTrial {
  Vec p;
  double r = 0.5;
};

// residual = max rms of Euclidean sphere fits in the target chart to Ψ-images
// of g-geodesic spheres.
TrialReport cospherical_test(const ChartMetric& g, const ChartDiffeo& psi,
                             const SpaceFormModel& target,
                             const std::vector<SphereTrial>& trials,
                             int directions = 32, double step = kDefaultStep);

struct HessianCondition {
  // Spread of the eigenvalues of g⁻¹(Hess_φ − dφ⊗dφ): zero iff
  // Hess_φ = μg + dφ⊗dφ for some μ.
  double residual1 = 0.0;
  // Spread of the eigenvalues of g⁻¹ Hess_h with h = e^{−φ}.
  double residual2 = 0.0;
  // Operator norm of the traceless part of g⁻¹(Hess_φ − dφ⊗dφ).
  double traceless_norm = 0.0;
  std::vector<double> mu;  // (Δφ − |grad φ|²)/n per sample
  Vec worst_point;
};

HessianCondition hessian_condition_test(const ScalarField& phi,
                                        const ChartMetric& g,
                                        const std::vector<Vec>& sample);

struct CenterDrift {
  Vec b2;           // extrapolated estimate
  Vec grad_phi;     // grad φ(p)
  double error = 0.0;  // |b2 + grad φ(p)|
  std::vector<double> t;
  std::vector<Vec> centers;
  std::vector<double> rms;
};

// Fits Euclidean spheres to e^{2φ}δ geodesic spheres of radius t e^{φ(p)}
// about p and extrapolates b(t) = 2(center(t) − p)/t² to t = 0 in powers of
// t².
CenterDrift sphere_center_drift(const ScalarField& phi, const Domain& domain,
                                const Vec& p, const std::vector<double>& t_list,
                                int directions = 64, double step = 1e-4);

}  // namespace beltrami
