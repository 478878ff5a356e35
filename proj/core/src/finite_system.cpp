#include "mespec/finite_system.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mespec/compensated.hpp"
#include "mespec/errors.hpp"
#include "mespec/evolution.hpp"

namespace mespec {

FiniteSystem::FiniteSystem(std::vector<double> decreasing_levels, std::optional<double> rho) {
  if (decreasing_levels.size() < 2) {
    throw ValidationError("finite system needs at least two levels");
  }
  for (std::size_t i = 0; i + 1 < decreasing_levels.size(); ++i) {
    if (!(decreasing_levels[i] > decreasing_levels[i + 1])) {
      throw ValidationError("finite system levels must be strictly decreasing (violated at index " +
                            std::to_string(i + 1) + ")");
    }
  }
  lambdas_ = Eigen::Map<const Eigen::VectorXd>(decreasing_levels.data(),
                                               static_cast<Eigen::Index>(decreasing_levels.size()));
  u_ = (-0.5 * lambdas_.array()).exp();
  v_ = (0.5 * lambdas_.array()).exp();
  GeneratorParts parts = assemble_generator(u_, v_);
  rates_ = std::move(parts.rates);
  b_ = std::move(parts.b);
  generator_ = std::move(parts.generator);

  const double dominance = max_column_loss();
  if (rho) {
    if (!(*rho > dominance)) {
      throw ValidationError("rho must strictly dominate the largest column loss " +
                            std::to_string(dominance));
    }
    rho_ = *rho;
  } else {
    // Margin above strict dominance without shrinking the power-iteration gap.
    rho_ = 1.125 * dominance;
  }
}

double FiniteSystem::lambda(int m) const {
  if (m < 1 || m > n()) {
    throw std::out_of_range("level index " + std::to_string(m) + " out of range");
  }
  return lambdas_(m - 1);
}

GeneratorView FiniteSystem::view() const {
  return GeneratorView{lambdas_, u_, v_, b_, rates_, generator_};
}

double FiniteSystem::partition_sum(double beta) const {
  if (!(beta > 0.0)) {
    throw std::domain_error("partition sum requires beta > 0");
  }
  // Levels decrease, so the smallest term comes first.
  CompensatedSum acc;
  for (Eigen::Index m = 0; m < lambdas_.size(); ++m) {
    acc += std::exp(-beta * lambdas_(m));
  }
  return acc.value();
}

ProbabilityVector FiniteSystem::gibbs_vector(double beta) const {
  const double z = partition_sum(beta);
  Eigen::VectorXd p = (-beta * lambdas_.array()).exp() / z;
  return ProbabilityVector::raw(std::move(p));
}

double FiniteSystem::max_column_loss() const {
  double worst = 0.0;
  for (Eigen::Index m = 0; m < lambdas_.size(); ++m) {
    worst = std::max(worst, b_(m) - rates_(m, m));
  }
  return worst;
}

Eigen::MatrixXd FiniteSystem::shifted_positive() const {
  Eigen::MatrixXd shifted = generator_;
  shifted.diagonal().array() += rho_;
  return shifted;
}

double FiniteSystem::shifted_column_sum_defect() const {
  const Eigen::MatrixXd shifted = shifted_positive();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < shifted.cols(); ++j) {
    CompensatedSum acc;
    for (Eigen::Index i = shifted.rows(); i-- > 0;) {
      acc += shifted(i, j);
    }
    worst = std::max(worst, std::abs(acc.value() - rho_));
  }
  return worst;
}

double FiniteSystem::trace() const {
  CompensatedSum acc;
  for (Eigen::Index m = lambdas_.size(); m-- > 0;) {
    acc += generator_(m, m);
  }
  return acc.value();
}

Spectrum finite_spectrum(const FiniteSystem& system, const SolverOptions& options) {
  return solve_spectrum(SecularContext::for_view(system.view()), options);
}

PerronResult perron_radius(const FiniteSystem& system, double tol) {
  if (!(tol > 0.0)) {
    throw ValidationError("perron iteration tolerance must be positive");
  }
  const Eigen::MatrixXd shifted = system.shifted_positive();
  const Eigen::Index n = shifted.rows();
  PerronResult result;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double previous = 0.0;
  constexpr int kMaxIterations = 100000;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const Eigen::VectorXd y = shifted * x;
    const double rayleigh = x.dot(y) / x.dot(x);
    x = y / y.norm();
    result.iterations = it;
    if (it > 1 && std::abs(rayleigh - previous) < tol) {
      result.radius = rayleigh;
      result.vector = x / x.sum();
      return result;
    }
    previous = rayleigh;
  }
  result.converged = false;  // spectral-gap warning for near-degenerate input
  result.radius = previous;
  result.vector = x / x.sum();
  return result;
}

FiniteDecayReport finite_decay_check(const FiniteSystem& system, const ProbabilityVector& p0,
                                     const std::vector<double>& taus) {
  const Spectrum spectrum = finite_spectrum(system);
  const BiorthogonalSystem basis = BiorthogonalSystem::build(system.view(), spectrum);
  const Trajectory trajectory = spectral_propagate(basis, spectrum, p0, taus);

  FiniteDecayReport report;
  report.gamma = trajectory.coefficients(0);
  report.decay_rate = std::abs(spectrum.slowest().nu);

  CompensatedSum constant;
  for (int k = system.n(); k >= 2; --k) {
    constant += std::abs(trajectory.coefficients(k - 1)) *
                basis.right(k).components.cwiseAbs().maxCoeff();
  }
  report.envelope_constant = constant.value();

  const Eigen::VectorXd limit = report.gamma * basis.gibbs();
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double distance = (trajectory.states[i] - limit).cwiseAbs().maxCoeff();
    const double envelope =
        report.envelope_constant * std::exp(-report.decay_rate * taus[i]) + 1e-12;
    report.max_excess = std::max(report.max_excess, distance / envelope);
  }
  report.envelope_holds = report.max_excess <= 1.0;
  return report;
}

}  // namespace mespec
