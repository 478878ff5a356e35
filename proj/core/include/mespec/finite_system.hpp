#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "mespec/probability_vector.hpp"
#include "mespec/secular.hpp"
#include "mespec/spectral_basis.hpp"
#include "mespec/truncated_model.hpp"

namespace mespec {

// Finite master system over strictly decreasing levels with alpha-free rates
// r_mn = e^{-(lambda_m - lambda_n)/2}. Shares the secular kernel with the
// truncated model (weights identically 1); the decreasing-level convention is
// kept as is rather than remapped.
class FiniteSystem {
 public:
  explicit FiniteSystem(std::vector<double> decreasing_levels,
                        std::optional<double> rho = std::nullopt);

  int n() const { return static_cast<int>(lambdas_.size()); }
  double lambda(int m) const;  // 1-based
  double rho() const { return rho_; }

  const Eigen::VectorXd& lambdas() const { return lambdas_; }
  const Eigen::VectorXd& b_values() const { return b_; }
  const Eigen::MatrixXd& rate_matrix() const { return rates_; }
  const Eigen::MatrixXd& generator() const { return generator_; }
  GeneratorView view() const;

  double partition_sum(double beta) const;
  ProbabilityVector gibbs_vector(double beta = 1.0) const;

  // max_m of the column loss R_m = sum_{k != m} r_km; rho must dominate it.
  double max_column_loss() const;

  // B = A + rho I, entrywise positive with columns summing to rho.
  Eigen::MatrixXd shifted_positive() const;
  double shifted_column_sum_defect() const;

  double trace() const;

 private:
  Eigen::VectorXd lambdas_;
  Eigen::VectorXd u_;
  Eigen::VectorXd v_;
  Eigen::VectorXd b_;
  Eigen::MatrixXd rates_;
  Eigen::MatrixXd generator_;
  double rho_ = 0.0;
};

// All eigenvalues via the shared secular kernel: sum_m 1/(nu + b_m) = 1 with
// b_m = Z_{1/2} e^{lambda_m / 2}.
Spectrum finite_spectrum(const FiniteSystem& system, const SolverOptions& options = {});

struct PerronResult {
  double radius = 0.0;
  Eigen::VectorXd vector;  // normalized to unit mass, entrywise positive
  int iterations = 0;
  bool converged = true;   // false flags the spectral-gap warning
};

// Power iteration on the shifted positive matrix from the uniform vector,
// stopping when successive Rayleigh quotients differ by less than tol.
PerronResult perron_radius(const FiniteSystem& system, double tol);

struct FiniteDecayReport {
  double gamma = 1.0;              // spectral mass coefficient, must be 1
  double envelope_constant = 0.0;  // explicit c_N from the coefficients
  bool envelope_holds = true;
  double max_excess = 0.0;
  double decay_rate = 0.0;         // |nu_N|, the slowest nonzero rate
};

// Verifies |p_m(tau) - gamma gibbs_m| <= c_N e^{-|nu_N| tau} on the grid and
// that conservation forces gamma = 1.
FiniteDecayReport finite_decay_check(const FiniteSystem& system, const ProbabilityVector& p0,
                                     const std::vector<double>& taus);

}  // namespace mespec
