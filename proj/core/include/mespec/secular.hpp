#pragma once

#include <Eigen/Core>
#include <vector>

#include "mespec/truncated_model.hpp"

namespace mespec {

struct SolverOptions {
  double bisect_tol = 1e-3;     // bisection stops at this fraction of the bracket width
  double residual_tol = 1e-11;  // target for |f(nu) - 1|
  int newton_max_iter = 100;
};

// Data of the secular function f(nu) = sum_m weights_m / (nu + poles_m).
// alt_weights are the right-eigenvector numerators; by the truncated identity
// f(nu) - 1 = -(nu / Z) * sum_m alt_weights_m / (nu + poles_m)
// their sum-zero form locates the same nonzero roots without cancellation
// against 1 and is what the solver actually polishes.
class SecularContext {
 public:
  SecularContext(Eigen::VectorXd weights, Eigen::VectorXd poles, Eigen::VectorXd alt_weights);

  static SecularContext for_view(const GeneratorView& view);

  int size() const { return static_cast<int>(poles_.size()); }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& poles() const { return poles_; }
  const Eigen::VectorXd& alt_weights() const { return alt_weights_; }

 private:
  Eigen::VectorXd weights_;
  Eigen::VectorXd poles_;
  Eigen::VectorXd alt_weights_;
};

// One solved eigenvalue. Eigenvalues are ordered increasingly: nu_1 = 0 and
// nu_k in the open bracket (-b_{k-1}, -b_k) for k >= 2. The root can sit
// within one ulp of -b_k (tail eigenvalues approach their pole like
// e^{-(alpha+1)lambda_k/2}), so `offset` = nu + b_k carries the position at
// full relative precision; `nu` is its rounded sum with -b_k.
struct EigenvalueRecord {
  int k = 1;
  double nu = 0.0;
  double offset = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double secular_residual = 0.0;  // |f(nu) - 1| measured at the root
  double fprime = 0.0;            // f'(nu), strictly negative
  double alt_residual = 0.0;      // normalized alt-characterization defect, k >= 2
  bool newton_fallback = false;
};

struct Spectrum {
  std::vector<EigenvalueRecord> records;  // index k-1 holds eigenvalue k
  double trace_check = 0.0;               // sum of nu_k minus Tr A

  int size() const { return static_cast<int>(records.size()); }
  const EigenvalueRecord& record(int k) const;  // 1-based
  double nu(int k) const { return record(k).nu; }
  // Smallest-magnitude nonzero eigenvalue (the last record); the reference
  // rate for decay fits.
  const EigenvalueRecord& slowest() const;
};

// Evaluation at a general point; rejects nu within one ulp of a pole.
double secular_eval(const SecularContext& ctx, double nu);
double secular_derivative(const SecularContext& ctx, double nu);

// Evaluation at nu = -poles_k + delta without ever forming nu, preserving the
// offset's relative precision near the pole. k is 1-based.
double secular_eval_at_offset(const SecularContext& ctx, int k, double delta);
double secular_derivative_at_offset(const SecularContext& ctx, int k, double delta);

// Normalized |sum_m alt_m/(nu_k + b_m)|; the relation characterizes only the
// nonzero eigenvalues, so k = 1 is a domain error.
double alt_characterization_residual(const SecularContext& ctx, const EigenvalueRecord& rec);

EigenvalueRecord solve_eigenvalue(const SecularContext& ctx, int k,
                                  const SolverOptions& options = {});
Spectrum solve_spectrum(const SecularContext& ctx, const SolverOptions& options = {});

struct Lemma1Report {
  bool holds = true;
  double min_ratio = 0.0;  // min over m of (b_m - b_{m+1}) / (c_alpha e^{-((alpha-1)/2+theta) lambda_m})
  double constant = 0.0;   // c_alpha = Z_{(alpha+1)/2} (1 + 2/(c (alpha-1)))^{-1}
};
Lemma1Report lemma1_check(const TruncatedModel& model);

// sup over k >= 2 of |nu_k + b_k| e^{(alpha+1) lambda_k / 2}; finite by the
// localization estimates and evaluated through the stored offsets.
double lemma2_supremum(const SecularContext& ctx, const Spectrum& spectrum);

}  // namespace mespec
