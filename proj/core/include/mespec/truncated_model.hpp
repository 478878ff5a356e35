#pragma once

#include <Eigen/Core>

#include "mespec/level_spec.hpp"
#include "mespec/probability_vector.hpp"

namespace mespec {

// Dense data shared by every generator-based routine: the two exponential
// rate profiles (rates = u v^T entrywise), the truncated column sums b, and
// the assembled generator. Both the truncated model and the finite
// decreasing-level system expose this view.
struct GeneratorView {
  const Eigen::VectorXd& lambdas;
  const Eigen::VectorXd& u;  // right profile, numerators of right eigenvectors
  const Eigen::VectorXd& v;  // left profile, numerators of left eigenvectors
  const Eigen::VectorXd& b;  // column sums of the rate matrix, strictly decreasing
  const Eigen::MatrixXd& rates;
  const Eigen::MatrixXd& generator;
};

// Self-consistent truncation of the master-equation model: partition sums,
// column sums and every finite identity (trace, detailed balance, secular
// pin) use levels 1..n only. Convergence to the infinite model is tracked
// solely through the tail bound.
class TruncatedModel {
 public:
  TruncatedModel(LevelSpec spec, int n);

  int n() const { return n_; }
  const LevelSpec& spec() const { return spec_; }

  double lambda(int m) const;   // 1-based
  double rate(int m, int k) const;  // 1-based; e^{-(alpha+1)lambda_m/2 - (alpha-1)lambda_k/2}
  double b(int m) const;        // 1-based

  const Eigen::VectorXd& lambdas() const { return lambdas_; }
  const Eigen::VectorXd& u_profile() const { return u_; }
  const Eigen::VectorXd& v_profile() const { return v_; }
  const Eigen::VectorXd& b_values() const { return b_; }
  const Eigen::MatrixXd& rate_matrix() const { return rates_; }
  const Eigen::MatrixXd& generator() const { return generator_; }
  GeneratorView view() const;

  // Z_beta^{(N)}, compensated and accumulated from the tail.
  double partition_sum(double beta) const;
  ProbabilityVector gibbs_vector(double beta) const;

  // Smallest exponent appearing in the spectral identities and the tail
  // bound evaluated there.
  double smallest_beta() const;
  TailBound tail() const;

  double trace() const;
  double trace_identity_residual() const;
  double detailed_balance_residual() const;

  // Construction identity: the diagonal is the negated compensated sum of
  // its own column, so re-accumulating in the same order gives exactly zero.
  double column_sum_defect() const;

  // max relative |r_mn r_ji - r_mi r_jn| over sampled index pairs; the rate
  // matrix is a rank-one outer product.
  double rank_one_defect() const;

 private:
  LevelSpec spec_;
  int n_;
  Eigen::VectorXd lambdas_;
  Eigen::VectorXd u_;
  Eigen::VectorXd v_;
  Eigen::VectorXd b_;
  Eigen::MatrixXd rates_;
  Eigen::MatrixXd generator_;
};

// Shared assembly for any model of the form rates = u v^T with column sums b
// and zero-column-sum generator. Returns {rates, b, generator}.
struct GeneratorParts {
  Eigen::MatrixXd rates;
  Eigen::VectorXd b;
  Eigen::MatrixXd generator;
};
GeneratorParts assemble_generator(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

}  // namespace mespec
