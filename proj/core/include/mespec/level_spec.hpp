#pragma once

#include <optional>
#include <vector>

namespace mespec {

enum class LevelKind { Affine, Explicit };

// Level sequence plus the rate and gap parameters of the model. Affine means
// lambda_m = offset + omega * m; explicit enumerates a finite strictly
// increasing sequence. alpha > 1 is required everywhere; alpha in (1,3) and
// theta in (0,(3-alpha)/2) are only needed for the basis diagnostics and are
// flagged, not enforced.
struct LevelSpec {
  LevelKind kind = LevelKind::Affine;
  double omega = 0.0;
  double offset = 0.0;
  std::vector<double> values;
  double alpha = 0.0;
  double theta = 0.0;
  double gap_constant = 0.0;

  static LevelSpec affine(double omega, double offset, double alpha, double theta,
                          double gap_constant);
  static LevelSpec explicit_levels(std::vector<double> values, double alpha, double theta,
                                   double gap_constant);

  // Throws ValidationError naming the offending field.
  void validate() const;

  // 1-based level index.
  double lambda(int m) const;

  // Largest admissible truncation dimension.
  int max_levels() const;

  bool within_theorem3_hypotheses() const;
};

struct GapConditionReport {
  bool satisfied = true;
  std::optional<int> first_violation;
  double min_margin = 0.0;  // min over m of gap / (c e^{-theta lambda_m})
  bool within_theorem3 = true;
};

// Checks lambda_{m+1} - lambda_m >= c e^{-theta lambda_m} for m < upto.
// Violations are report content, never errors.
GapConditionReport gap_condition_check(const LevelSpec& spec, int upto);

struct TailBound {
  double value = 0.0;
  bool finite_model = false;
};

// Upper bound on sum_{m>n} e^{-beta lambda_m}. Geometric for affine levels,
// exactly zero (finite_model marker) for explicit ones.
TailBound tail_bound(const LevelSpec& spec, int n, double beta);

}  // namespace mespec
