#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "mespec/probability_vector.hpp"
#include "mespec/spectral_basis.hpp"

namespace mespec {

enum class PropagationMethod { Spectral, Ode };

struct Trajectory {
  std::vector<double> taus;              // strictly increasing from 0
  std::vector<Eigen::VectorXd> states;   // raw, never renormalized
  PropagationMethod method = PropagationMethod::Spectral;
  Eigen::VectorXd coefficients;          // c_k = (p0, q~_k), spectral runs only
};

// p(tau) = sum_k (p0, q~_k) e^{tau nu_k} p_k.
Trajectory spectral_propagate(const BiorthogonalSystem& system, const Spectrum& spectrum,
                              const ProbabilityVector& p0, std::vector<double> taus);

// Classical RK4 with step halving; local error per unit step bounded by tol.
// Conservation is enforced only by the arithmetic, drift stays measurable.
Trajectory ode_propagate(const Eigen::MatrixXd& generator, const ProbabilityVector& p0,
                         std::vector<double> taus, double tol);

// sup over the grid of the l2 distance between the spectral and RK4 states.
double cross_validate(const Eigen::MatrixXd& generator, const BiorthogonalSystem& system,
                      const Spectrum& spectrum, const ProbabilityVector& p0,
                      const std::vector<double>& taus, double tol);

struct DecayReport {
  double fitted_rate = 0.0;
  double expected_rate = 0.0;  // smallest-magnitude nonzero eigenvalue
  double relative_gap = 0.0;
  bool already_converged = false;
  // The same reference rate under both orderings used in the literature:
  // increasing (it is nu_N there) and by magnitude (nu_2 there).
  int expected_index_increasing = 0;
  int expected_index_by_magnitude = 2;
  double final_distance = 0.0;
};

// Least-squares slope of ln ||p(tau) - c_1 gibbs||_2 over the last half of
// the samples.
DecayReport decay_fit(const Trajectory& trajectory, const BiorthogonalSystem& system,
                      const Spectrum& spectrum);

struct TrajectoryCheck {
  bool pass = true;
  double max_sum_error = 0.0;
  double min_component = 0.0;
  std::vector<std::pair<double, std::string>> violations;
};

// min component >= -1e-12 and |sum - 1| <= 1e-9 at every sample.
TrajectoryCheck positivity_conservation_check(const Trajectory& trajectory);

struct LyapunovReport {
  double exponent = 0.0;          // max_k nu_k, zero by construction
  double diagnostic_trend = 0.0;  // max over test taus of |ln(||p(tau)||/||p0||)/tau| for Gibbs
};
LyapunovReport lyapunov_estimate(const Spectrum& spectrum, const BiorthogonalSystem& system);

// Largest k whose positivity-feasible single-mode perturbation of Gibbs
// reaches the amplitude floor; used by the single-mode decay check.
struct ModePerturbation {
  int k = 0;
  double eps = 0.0;
  double amplitude = 0.0;  // eps * ||p_k||_2
  ProbabilityVector p0;
};
std::optional<ModePerturbation> feasible_mode_perturbation(const BiorthogonalSystem& system,
                                                           double amplitude_floor);

struct EnvelopeReport {
  bool holds = true;
  double constant = 0.0;           // sum_{k=2..K} |c_k| ||p_k||_2
  double max_excess = 0.0;         // worst ratio distance / envelope
  double membership_defect = 0.0;  // max |c_k| for k > K
};

// Explicit-constant decay envelope for p0 in span{p_1..p_K}:
// ||p(tau) - c_1 gibbs||_2 <= (sum_{k=2}^K |c_k| ||p_k||) e^{nu_K tau}.
EnvelopeReport decay_envelope_check(const BiorthogonalSystem& system, const Spectrum& spectrum,
                                    const Trajectory& trajectory, int upto_k);

std::vector<double> uniform_grid(double tau_max, int samples);

}  // namespace mespec
