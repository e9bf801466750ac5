#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace beltrami {

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = VecX<double>;
using Mat = MatX<double>;

// Error hierarchy. Every numerical precondition violation surfaces as one of
// these; verification "failures" are results, never exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class DegeneratePlaneError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Axis-aligned box, optionally intersected with a centred ball. The ball is
// what the space-form charts actually need (|x| < 2/sqrt(-C) and friends).
struct Domain {
  Vec lower;
  Vec upper;
  double ball_radius = 0.0;  // <= 0 means no ball constraint

  static Domain box(int dim, double half_width);
  static Domain box(const Vec& lower, const Vec& upper);

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vec& x) const;
  // Distance from x to the complement of the domain (0 if outside).
  double margin(const Vec& x) const;
  Domain with_ball(double radius) const;
};

}  // namespace beltrami
