#include "mespec/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mespec/compensated.hpp"
#include "mespec/errors.hpp"

namespace mespec {

namespace {

void require_grid(const std::vector<double>& taus) {
  if (taus.empty()) {
    throw ValidationError("trajectory needs at least one sample time");
  }
  if (taus.front() < 0.0) {
    throw ValidationError("sample times must be nonnegative");
  }
  for (std::size_t i = 0; i + 1 < taus.size(); ++i) {
    if (!(taus[i] < taus[i + 1])) {
      throw ValidationError("sample times must be strictly increasing");
    }
  }
}

Eigen::VectorXd rk4_step(const Eigen::MatrixXd& a, const Eigen::VectorXd& y, double h) {
  const Eigen::VectorXd k1 = a * y;
  const Eigen::VectorXd k2 = a * (y + 0.5 * h * k1);
  const Eigen::VectorXd k3 = a * (y + 0.5 * h * k2);
  const Eigen::VectorXd k4 = a * (y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

std::vector<double> uniform_grid(double tau_max, int samples) {
  if (!(tau_max > 0.0) || samples < 2) {
    throw ValidationError("uniform grid needs tau_max > 0 and at least 2 samples");
  }
  std::vector<double> taus(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    taus[static_cast<std::size_t>(i)] = tau_max * static_cast<double>(i) /
                                        static_cast<double>(samples - 1);
  }
  return taus;
}

Trajectory spectral_propagate(const BiorthogonalSystem& system, const Spectrum& spectrum,
                              const ProbabilityVector& p0, std::vector<double> taus) {
  require_grid(taus);
  Trajectory trajectory;
  trajectory.method = PropagationMethod::Spectral;
  trajectory.coefficients = system.coefficients(p0.components());
  const int n = system.size();
  trajectory.states.reserve(taus.size());
  for (double tau : taus) {
    Eigen::VectorXd weighted(n);
    for (int k = 1; k <= n; ++k) {
      weighted(k - 1) = trajectory.coefficients(k - 1) * std::exp(tau * spectrum.nu(k));
    }
    trajectory.states.push_back(system.reconstruct(weighted));
  }
  trajectory.taus = std::move(taus);
  return trajectory;
}

Trajectory ode_propagate(const Eigen::MatrixXd& generator, const ProbabilityVector& p0,
                         std::vector<double> taus, double tol) {
  require_grid(taus);
  if (!(tol > 0.0)) {
    throw ValidationError("ode tolerance must be positive");
  }
  const double tau_max = taus.back();
  Trajectory trajectory;
  trajectory.method = PropagationMethod::Ode;
  trajectory.states.reserve(taus.size());

  Eigen::VectorXd y = p0.components();
  double t = 0.0;
  double h = tau_max > 0.0 ? std::min(0.1, tau_max) : 0.1;
  const double snap = 4.0 * std::numeric_limits<double>::epsilon();

  for (double target : taus) {
    while (target - t > snap * std::max(target, 1.0)) {
      const double step = std::min(h, target - t);
      const Eigen::VectorXd full = rk4_step(generator, y, step);
      const Eigen::VectorXd half = rk4_step(generator, rk4_step(generator, y, 0.5 * step),
                                            0.5 * step);
      const double err = (half - full).norm() / 15.0;
      // The rounding allowance keeps endpoint-landing steps acceptable once
      // the truncation error sits below the arithmetic noise floor.
      const double allowance = 32.0 * std::numeric_limits<double>::epsilon() * y.norm();
      const double acceptable = tol * step + allowance;
      if (err <= acceptable) {
        t += step;
        y = half;
        if (err < acceptable / 64.0) {
          h = std::min(2.0 * step, 0.5);
        } else {
          h = step;
        }
      } else {
        h = 0.5 * step;
        if (h < 1e-14 * tau_max) {
          throw SolverError("ode step underflow at tau = " + std::to_string(t) +
                            " (stiffness)");
        }
      }
    }
    trajectory.states.push_back(y);
  }
  trajectory.taus = std::move(taus);
  return trajectory;
}

double cross_validate(const Eigen::MatrixXd& generator, const BiorthogonalSystem& system,
                      const Spectrum& spectrum, const ProbabilityVector& p0,
                      const std::vector<double>& taus, double tol) {
  const Trajectory spectral = spectral_propagate(system, spectrum, p0, taus);
  const Trajectory ode = ode_propagate(generator, p0, taus, tol);
  double worst = 0.0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    worst = std::max(worst, (spectral.states[i] - ode.states[i]).norm());
  }
  return worst;
}

DecayReport decay_fit(const Trajectory& trajectory, const BiorthogonalSystem& system,
                      const Spectrum& spectrum) {
  if (trajectory.taus.size() < 8) {
    throw ValidationError("decay fit needs at least 8 samples");
  }
  DecayReport report;
  const EigenvalueRecord& slowest = spectrum.slowest();
  report.expected_rate = slowest.nu;
  report.expected_index_increasing = slowest.k;
  report.expected_index_by_magnitude = 2;

  // c_1 = (p0, all-ones) = total mass of the initial state.
  CompensatedSum mass;
  const Eigen::VectorXd& first = trajectory.states.front();
  for (Eigen::Index m = first.size(); m-- > 0;) {
    mass += first(m);
  }
  const double c1 = mass.value();
  const Eigen::VectorXd limit = c1 * system.gibbs();

  std::vector<double> distances(trajectory.taus.size());
  for (std::size_t i = 0; i < trajectory.taus.size(); ++i) {
    distances[i] = (trajectory.states[i] - limit).norm();
  }
  report.final_distance = distances.back();
  if (distances.back() < 1e-14) {
    report.already_converged = true;
    report.fitted_rate = 0.0;
    report.relative_gap = std::numeric_limits<double>::quiet_NaN();
    return report;
  }

  // Least-squares slope of ln distance over the last half of the samples.
  const std::size_t start = trajectory.taus.size() / 2;
  CompensatedSum sx, sy, sxx, sxy;
  std::size_t count = 0;
  for (std::size_t i = start; i < trajectory.taus.size(); ++i) {
    if (distances[i] <= 0.0) {
      continue;
    }
    const double x = trajectory.taus[i];
    const double y = std::log(distances[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) {
    throw SolverError("decay fit window has fewer than 2 usable samples");
  }
  const double nn = static_cast<double>(count);
  report.fitted_rate =
      (nn * sxy.value() - sx.value() * sy.value()) / (nn * sxx.value() - sx.value() * sx.value());
  report.relative_gap =
      std::abs(report.fitted_rate - report.expected_rate) / std::abs(report.expected_rate);
  return report;
}

TrajectoryCheck positivity_conservation_check(const Trajectory& trajectory) {
  TrajectoryCheck check;
  check.min_component = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trajectory.taus.size(); ++i) {
    const Eigen::VectorXd& state = trajectory.states[i];
    CompensatedSum acc;
    for (Eigen::Index m = state.size(); m-- > 0;) {
      acc += state(m);
    }
    const double sum_error = std::abs(acc.value() - 1.0);
    const double lo = state.minCoeff();
    check.max_sum_error = std::max(check.max_sum_error, sum_error);
    check.min_component = std::min(check.min_component, lo);
    if (sum_error > 1e-9) {
      check.pass = false;
      check.violations.emplace_back(trajectory.taus[i],
                                    "mass error " + std::to_string(sum_error));
    }
    if (lo < -1e-12) {
      check.pass = false;
      check.violations.emplace_back(trajectory.taus[i],
                                    "negative component " + std::to_string(lo));
    }
  }
  return check;
}

LyapunovReport lyapunov_estimate(const Spectrum& spectrum, const BiorthogonalSystem& system) {
  LyapunovReport report;
  double top = -std::numeric_limits<double>::infinity();
  for (const EigenvalueRecord& rec : spectrum.records) {
    top = std::max(top, rec.nu);
  }
  report.exponent = top;

  // The Gibbs direction is a fixed point, so the norm growth rate vanishes
  // identically along it.
  const ProbabilityVector gibbs = ProbabilityVector::raw(system.gibbs());
  const std::vector<double> taus{0.1, 1.0, 10.0};
  const Trajectory trajectory = spectral_propagate(system, spectrum, gibbs, taus);
  const double base = system.gibbs().norm();
  double worst = 0.0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    worst = std::max(worst,
                     std::abs(std::log(trajectory.states[i].norm() / base) / taus[i]));
  }
  report.diagnostic_trend = worst;
  return report;
}

std::optional<ModePerturbation> feasible_mode_perturbation(const BiorthogonalSystem& system,
                                                           double amplitude_floor) {
  const Eigen::VectorXd& gibbs = system.gibbs();
  for (int k = system.size(); k >= 2; --k) {
    const Eigen::VectorXd& pk = system.right(k).components;
    double eps_max = std::numeric_limits<double>::infinity();
    for (Eigen::Index m = 0; m < pk.size(); ++m) {
      if (pk(m) < 0.0) {
        eps_max = std::min(eps_max, gibbs(m) / (-pk(m)));
      }
    }
    const double eps = 0.9 * eps_max;
    if (!std::isfinite(eps)) {
      continue;
    }
    const double amplitude = eps * pk.norm();
    if (amplitude >= amplitude_floor) {
      // Mode sums vanish for k >= 2, so the perturbed vector keeps unit mass.
      ModePerturbation result{k, eps, amplitude,
                              ProbabilityVector::strict(gibbs + eps * pk)};
      return result;
    }
  }
  return std::nullopt;
}

EnvelopeReport decay_envelope_check(const BiorthogonalSystem& system, const Spectrum& spectrum,
                                    const Trajectory& trajectory, int upto_k) {
  if (upto_k < 2 || upto_k > system.size()) {
    throw std::out_of_range("envelope check needs 2 <= K <= N");
  }
  EnvelopeReport report;
  const Eigen::VectorXd coef = trajectory.method == PropagationMethod::Spectral
                                   ? trajectory.coefficients
                                   : system.coefficients(trajectory.states.front());
  for (int k = upto_k + 1; k <= system.size(); ++k) {
    report.membership_defect = std::max(report.membership_defect, std::abs(coef(k - 1)));
  }
  CompensatedSum constant;
  for (int k = upto_k; k >= 2; --k) {
    constant += std::abs(coef(k - 1)) * system.right(k).components.norm();
  }
  report.constant = constant.value();
  const double rate = spectrum.nu(upto_k);
  const Eigen::VectorXd limit = coef(0) * system.gibbs();
  for (std::size_t i = 0; i < trajectory.taus.size(); ++i) {
    const double distance = (trajectory.states[i] - limit).norm();
    const double envelope = report.constant * std::exp(rate * trajectory.taus[i]) + 1e-12;
    report.max_excess = std::max(report.max_excess, distance / envelope);
  }
  report.holds = report.max_excess <= 1.0;
  return report;
}

}  // namespace mespec
