#pragma once

#include <Eigen/Core>

namespace mespec {

// Probability vector with explicit construction policy: strict rejects data
// whose sum is off by more than 1e-9 or with components below -1e-12,
// normalized rescales by the sum, raw stores integrator output as measured so
// that drift stays observable.
class ProbabilityVector {
 public:
  static constexpr double kSumTolerance = 1e-9;
  static constexpr double kNegativeFloor = -1e-12;

  static ProbabilityVector strict(Eigen::VectorXd components);
  static ProbabilityVector normalized(Eigen::VectorXd components);
  static ProbabilityVector raw(Eigen::VectorXd components);

  const Eigen::VectorXd& components() const { return components_; }
  double sum() const { return sum_; }
  int size() const { return static_cast<int>(components_.size()); }
  double min_component() const { return components_.minCoeff(); }

 private:
  ProbabilityVector(Eigen::VectorXd components, double sum);

  Eigen::VectorXd components_;
  double sum_;
};

}  // namespace mespec
