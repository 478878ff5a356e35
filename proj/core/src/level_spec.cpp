#include "mespec/level_spec.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mespec/errors.hpp"

namespace mespec {

LevelSpec LevelSpec::affine(double omega, double offset, double alpha, double theta,
                            double gap_constant) {
  LevelSpec s;
  s.kind = LevelKind::Affine;
  s.omega = omega;
  s.offset = offset;
  s.alpha = alpha;
  s.theta = theta;
  s.gap_constant = gap_constant;
  s.validate();
  return s;
}

LevelSpec LevelSpec::explicit_levels(std::vector<double> values, double alpha, double theta,
                                     double gap_constant) {
  LevelSpec s;
  s.kind = LevelKind::Explicit;
  s.values = std::move(values);
  s.alpha = alpha;
  s.theta = theta;
  s.gap_constant = gap_constant;
  s.validate();
  return s;
}

void LevelSpec::validate() const {
  if (kind == LevelKind::Affine) {
    if (!(omega > 0.0)) {
      throw ValidationError("omega must be positive for affine levels");
    }
    if (!std::isfinite(omega) || !std::isfinite(offset)) {
      throw ValidationError("affine level parameters must be finite");
    }
  } else {
    if (values.empty()) {
      throw ValidationError("explicit levels require at least one value");
    }
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      if (!(values[i] < values[i + 1])) {
        throw ValidationError("explicit levels must be strictly increasing (violated at index " +
                              std::to_string(i + 1) + ")");
      }
    }
  }
  if (!(alpha > 1.0)) {
    throw ValidationError("alpha must exceed 1");
  }
  if (!(theta >= 0.0)) {
    throw ValidationError("theta must be nonnegative");
  }
  if (!(gap_constant > 0.0)) {
    throw ValidationError("gap_constant must be positive");
  }
}

double LevelSpec::lambda(int m) const {
  if (m < 1 || m > max_levels()) {
    throw std::out_of_range("level index " + std::to_string(m) + " out of range");
  }
  if (kind == LevelKind::Affine) {
    return offset + omega * static_cast<double>(m);
  }
  return values[static_cast<std::size_t>(m) - 1];
}

int LevelSpec::max_levels() const {
  return kind == LevelKind::Affine ? std::numeric_limits<int>::max()
                                   : static_cast<int>(values.size());
}

bool LevelSpec::within_theorem3_hypotheses() const {
  return alpha > 1.0 && alpha < 3.0 && theta > 0.0 && theta < 0.5 * (3.0 - alpha);
}

GapConditionReport gap_condition_check(const LevelSpec& spec, int upto) {
  if (upto < 2) {
    throw ValidationError("gap condition check needs upto >= 2");
  }
  GapConditionReport report;
  report.within_theorem3 = spec.within_theorem3_hypotheses();
  report.min_margin = std::numeric_limits<double>::infinity();
  const int last = std::min(upto, spec.max_levels());
  for (int m = 1; m + 1 <= last; ++m) {
    const double gap = spec.lambda(m + 1) - spec.lambda(m);
    const double bound = spec.gap_constant * std::exp(-spec.theta * spec.lambda(m));
    report.min_margin = std::min(report.min_margin, gap / bound);
    if (gap < bound && !report.first_violation) {
      report.satisfied = false;
      report.first_violation = m;
    }
  }
  return report;
}

TailBound tail_bound(const LevelSpec& spec, int n, double beta) {
  if (!(beta > 0.0)) {
    throw std::domain_error("tail bound requires beta > 0");
  }
  if (spec.kind == LevelKind::Explicit) {
    return TailBound{0.0, true};
  }
  // sum_{m>n} e^{-beta lambda_m} <= e^{-beta lambda_{n+1}} / (1 - e^{-beta omega})
  const double head = std::exp(-beta * spec.lambda(n + 1));
  const double denom = -std::expm1(-beta * spec.omega);
  return TailBound{head / denom, false};
}

}  // namespace mespec
