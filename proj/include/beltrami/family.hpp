#pragma once

#include "beltrami/chart_metric.hpp"

#include <functional>
#include <string>

namespace beltrami {

// A metric g with a variation δg and, when known, the finite curve t ↦ g⁽ᵗ⁾.
struct DeformationFamily {
  std::string name;
  ChartMetric base;
  TensorField delta_g;
  std::function<ChartMetric(double)> full_curve;
  double t_max = 1.0;  // the curve is admissible for |t| < t_max

  int dim() const { return base.dim(); }
  bool has_full_curve() const { return static_cast<bool>(full_curve); }

  // g⁽ᵗ⁾ from the full curve, or g + t δg when none is attached.
  ChartMetric at(double t) const;
  ChartMetric linearized(double t) const;
};

}  // namespace beltrami
