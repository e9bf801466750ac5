#include "beltrami/family.hpp"

#include <sstream>

namespace beltrami {

ChartMetric DeformationFamily::linearized(double t) const {
  std::ostringstream os;
  os << name << "[lin t=" << t << "]";
  return ChartMetric(os.str(), base.domain(),
                     TensorField::combine(base.field(), t, delta_g));
}

ChartMetric DeformationFamily::at(double t) const {
  if (!(std::abs(t) < t_max)) {
    std::ostringstream os;
    os << "family '" << name << "': t = " << t << " outside |t| < " << t_max;
    throw RangeError(os.str());
  }
  if (full_curve) return full_curve(t);
  return linearized(t);
}

}  // namespace beltrami
