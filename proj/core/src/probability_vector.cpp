#include "mespec/probability_vector.hpp"

#include <cmath>
#include <span>
#include <string>

#include "mespec/compensated.hpp"
#include "mespec/errors.hpp"

namespace mespec {

namespace {

double component_sum(const Eigen::VectorXd& v) {
  return sum_from_tail(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

}  // namespace

ProbabilityVector::ProbabilityVector(Eigen::VectorXd components, double sum)
    : components_(std::move(components)), sum_(sum) {}

ProbabilityVector ProbabilityVector::strict(Eigen::VectorXd components) {
  if (components.size() == 0) {
    throw ValidationError("probability vector must not be empty");
  }
  const double s = component_sum(components);
  if (std::abs(s - 1.0) > kSumTolerance) {
    throw ValidationError("probability vector sum " + std::to_string(s) +
                          " deviates from 1 beyond tolerance");
  }
  const double lo = components.minCoeff();
  if (lo < kNegativeFloor) {
    throw ValidationError("probability vector has component " + std::to_string(lo) +
                          " below the negativity floor");
  }
  return ProbabilityVector(std::move(components), s);
}

ProbabilityVector ProbabilityVector::normalized(Eigen::VectorXd components) {
  if (components.size() == 0) {
    throw ValidationError("probability vector must not be empty");
  }
  const double lo = components.minCoeff();
  if (lo < kNegativeFloor) {
    throw ValidationError("probability vector has component " + std::to_string(lo) +
                          " below the negativity floor");
  }
  const double s = component_sum(components);
  if (!(s > 0.0)) {
    throw ValidationError("probability vector sum must be positive to normalize");
  }
  components /= s;
  return ProbabilityVector(std::move(components), component_sum(components));
}

ProbabilityVector ProbabilityVector::raw(Eigen::VectorXd components) {
  const double s = component_sum(components);
  return ProbabilityVector(std::move(components), s);
}

}  // namespace mespec
