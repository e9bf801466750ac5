#pragma once

// Geodesics, exponential map, Frenet curvatures, geodesic circles, Jacobi
// fields and the deviation distance of a metric family.

#include "beltrami/chart_diffeo.hpp"
#include "beltrami/family.hpp"
#include "beltrami/metric_core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace beltrami {

inline constexpr double kDefaultStep = 1e-3;

struct GeodesicSample {
  double s = 0.0;
  Vec x;
  Vec v;  // x′(s)
};

// Fixed-step RK4 solution of x″ + Γ(x′, x′) = 0.
struct GeodesicPath {
  std::string metric_name;
  double step = 0.0;
  std::vector<GeodesicSample> samples;
  bool truncated = false;  // left the domain before reaching the requested length

  const GeodesicSample& back() const { return samples.back(); }
  // Largest relative deviation of √g(x′, x′) from its initial value.
  double speed_drift(const ChartMetric& metric) const;
};

GeodesicPath integrate_geodesic(const ChartMetric& metric, const Vec& p,
                                const Vec& v, double length,
                                double step = kDefaultStep);

// exp_p(v); throws DomainError when the geodesic leaves the chart.
Vec exp_map(const ChartMetric& metric, const Vec& p, const Vec& v,
            double step = kDefaultStep);

struct SphereSample {
  std::vector<Vec> points;
  std::vector<Vec> directions;  // g-unit directions that produced `points`
  std::vector<int> omitted;     // indices of directions whose ray left the chart
};

// exp_p(r u) for every direction, each normalised to g_p-unit length first.
SphereSample geodesic_sphere_sample(const ChartMetric& metric, const Vec& p,
                                    double r, const std::vector<Vec>& directions,
                                    double step = kDefaultStep);

// Position and first three derivatives of a curve in an arbitrary parameter.
struct CurveJet {
  Vec x, d1, d2, d3;
};

CurveJet curve_jet(const VecX<Taylor3>& c);
VecX<Taylor3> taylor_curve(const CurveJet& c);

struct FrenetPoint {
  double k1 = 0.0;
  double k2 = 0.0;
  bool k2_defined = false;
};

inline constexpr double kFrenetEpsilon = 1e-9;

FrenetPoint frenet_at(const LocalGeometry& geo, const CurveJet& c);
FrenetPoint frenet_at(const ChartMetric& metric, const CurveJet& c);

struct FrenetProfile {
  std::vector<double> k1;
  std::vector<double> k2;  // NaN where undefined (k1 below threshold)
  double k1_mean = 0.0;
  double k1_stdev = 0.0;
  double k1_max = 0.0;
  double k2_max_abs = 0.0;  // over points where k2 is defined
};

FrenetProfile frenet_curvatures(const ChartMetric& metric,
                                const std::vector<CurveJet>& curve);
// Positions at uniform parameter spacing `dtau`; jets from five-point
// differences, so the first and last two samples are dropped.
FrenetProfile frenet_curvatures(const ChartMetric& metric,
                                const std::vector<Vec>& samples, double dtau);
// Exact jets of a path integrated under `path_metric`, evaluated under
// `metric`.
FrenetProfile frenet_curvatures(const ChartMetric& metric,
                                const ChartMetric& path_metric,
                                const GeodesicPath& path);

// Third-order jet of the geodesic through (x, v) for `metric`.
CurveJet geodesic_jet(const LocalGeometry& geo, const Vec& v);

// Curve with constant first curvature k1 and vanishing second curvature,
// started at p with g-orthonormal (t0, e0). Returns unit-speed jets at every
// `stride`-th step and at the end; stops early when the curve leaves the chart.
std::vector<CurveJet> integrate_geodesic_circle(const ChartMetric& metric,
                                                const Vec& p, const Vec& t0,
                                                const Vec& e0, double k1,
                                                double length,
                                                double step = kDefaultStep,
                                                int stride = 1);

struct JacobiSolution {
  std::vector<double> s;
  std::vector<Vec> v;       // V(s)
  std::vector<Vec> dv;      // D_s V
  std::vector<Vec> frame;   // components of V in a parallel frame
  std::vector<double> normal_norm;  // ‖V⊥‖_g
  bool truncated = false;
};

// V″ + R(γ′, V)γ′ = 0 along the geodesic starting at path.samples[0],
// integrated with the path's step.
JacobiSolution integrate_jacobi(const ChartMetric& metric,
                                const GeodesicPath& path, const Vec& v0,
                                const Vec& dv0);

struct DeviationResult {
  double phi = 0.0;
  double s_min = 0.0;  // g-arclength along γ of the closest point
  bool boundary = false;  // minimiser at the end of the search range
  Vec target;             // exp⁽ᵗ⁾_p(v)
};

// Distance from exp⁽ᵗ⁾_p(v) to the g-geodesic γ with γ(0) = p, γ′(0) = v,
// measured in the chart-local norm of g at the foot point. The search runs
// over g-arclength s ∈ [0, 2‖v‖_g].
DeviationResult deviation_phi(const DeformationFamily& family, const Vec& p,
                              const Vec& v, double t,
                              double step = kDefaultStep);

struct DeviationOrder {
  double phi_t = 0.0;
  double phi_half = 0.0;
  double order = 0.0;  // log2(φ(t)/φ(t/2))
  double slope = 0.0;  // Richardson limit of φ(t)/t
  bool boundary = false;
};

DeviationOrder deviation_order(const DeformationFamily& family, const Vec& p,
                               const Vec& v, double t,
                               double step = kDefaultStep);

}  // namespace beltrami
