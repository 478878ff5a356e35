#include "mespec/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mespec/errors.hpp"
#include "mespec/evolution.hpp"
#include "mespec/finite_system.hpp"
#include "mespec/numeric_text.hpp"
#include "mespec/spectral_basis.hpp"

namespace mespec {

namespace {

CheckResult below(const std::string& name, double measured, double threshold,
                  std::string note = {}) {
  return CheckResult{name, measured, threshold, measured <= threshold, false, std::move(note)};
}

// The finite decreasing-level demo runs on two fixed levels; it exercises the
// alpha-free rates, the Perron shift and the spectral decay in one place.
void finite_suite(std::vector<CheckResult>& checks) {
  const FiniteSystem system({1.0, 0.0});
  const Spectrum spectrum = finite_spectrum(system);

  const double expected_nu2 = -(std::exp(0.5) + std::exp(-0.5));
  checks.push_back(below("finite_nu2_closed_form", std::abs(spectrum.nu(2) - expected_nu2), 1e-9,
                         "nu_2 = " + format_double(spectrum.nu(2))));
  checks.push_back(below("finite_secular_pin", spectrum.record(1).secular_residual, 1e-12));
  checks.push_back(below("finite_trace_check",
                         std::abs(spectrum.trace_check) / std::abs(system.trace()), 1e-12));
  checks.push_back(below("finite_shifted_column_sums", system.shifted_column_sum_defect(),
                         1e-14, "columns of A + rho I must sum to rho"));

  // No eigenvalue may fall in [-b_N, 0); the offsets are negative exactly
  // when each nu_k stays below its upper bracket end.
  double worst_offset = -std::numeric_limits<double>::infinity();
  for (int k = 2; k <= spectrum.size(); ++k) {
    worst_offset = std::max(worst_offset, spectrum.record(k).offset);
  }
  checks.push_back(CheckResult{"finite_no_eigenvalue_above_last_pole", worst_offset, 0.0,
                               worst_offset < 0.0, false, ""});

  const double tol = 1e-9;
  const PerronResult perron = perron_radius(system, tol);
  checks.push_back(below("finite_perron_radius", std::abs(perron.radius - system.rho()),
                         10.0 * tol, "power iteration, " + std::to_string(perron.iterations) +
                                         " iterations"));
  const Eigen::VectorXd gibbs = system.gibbs_vector().components();
  checks.push_back(below("finite_perron_vector", (perron.vector - gibbs).norm(), 1e-6,
                         "Perron direction must reproduce Gibbs"));
  checks.push_back(CheckResult{"finite_perron_converged",
                               static_cast<double>(perron.iterations), 1e5, perron.converged,
                               false, ""});

  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(system.n());
  e1(0) = 1.0;
  const std::vector<double> taus =
      uniform_grid(5.0 / std::abs(spectrum.slowest().nu), 32);
  const FiniteDecayReport decay =
      finite_decay_check(system, ProbabilityVector::strict(e1), taus);
  checks.push_back(below("finite_gamma", std::abs(decay.gamma - 1.0), 1e-8,
                         "conservation forces gamma = 1"));
  checks.push_back(CheckResult{"finite_decay_envelope", decay.max_excess, 1.0,
                               decay.envelope_holds, false,
                               "rate " + format_double(decay.decay_rate)});
}

}  // namespace

VerificationReport run_verification(const RunConfig& config) {
  config.validate_for(Command::Verify);

  VerificationReport report;
  const LevelSpec spec = config.level_spec();
  report.model = ModelEcho::from(spec, config.n);
  std::vector<CheckResult>& checks = report.checks;

  const TruncatedModel model(spec, config.n);

  // Truncation quality gate: not a pass/fail identity, but part of the echo.
  const TailBound tail = model.tail();
  checks.push_back(below("tail_bound", tail.value, config.tail_tol,
                         tail.finite_model ? "finite model" : "at beta = " +
                             format_double(model.smallest_beta())));

  checks.push_back(below("trace_identity_model",
                         std::abs(model.trace_identity_residual()) / std::abs(model.trace()),
                         1e-12));
  checks.push_back(below("detailed_balance", model.detailed_balance_residual(), 1e-15));

  const GapConditionReport gap = gap_condition_check(spec, config.n);
  checks.push_back(CheckResult{"gap_condition", gap.min_margin, 1.0, gap.satisfied, false,
                               gap.first_violation
                                   ? "first violation at m = " + std::to_string(*gap.first_violation)
                                   : ""});
  checks.push_back(CheckResult{"theorem3_hypotheses", spec.theta, 0.5 * (3.0 - spec.alpha),
                               gap.within_theorem3, true,
                               gap.within_theorem3 ? "" : "outside Theorem 3 hypotheses"});

  checks.push_back(below("generator_column_sums", model.column_sum_defect(), 0.0,
                         "diagonal is the negated compensated column sum"));
  checks.push_back(below("rate_rank_one", model.rank_one_defect(), 1e-14));

  const SecularContext ctx = SecularContext::for_view(model.view());
  const Spectrum spectrum = solve_spectrum(ctx, config.solver);

  int interlacing_violations = 0;
  double worst_fprime = -std::numeric_limits<double>::infinity();
  double worst_secular = 0.0;
  double worst_alt = 0.0;
  bool any_fallback = false;
  for (int k = 2; k <= spectrum.size(); ++k) {
    const EigenvalueRecord& rec = spectrum.record(k);
    const double width = model.b(k - 1) - model.b(k);
    if (!(rec.offset > -width && rec.offset < 0.0)) {
      ++interlacing_violations;
    }
    worst_fprime = std::max(worst_fprime, rec.fprime);
    worst_secular = std::max(worst_secular, rec.secular_residual);
    worst_alt = std::max(worst_alt, rec.alt_residual);
    any_fallback = any_fallback || rec.newton_fallback;
  }
  checks.push_back(CheckResult{"interlacing", static_cast<double>(interlacing_violations), 0.0,
                               interlacing_violations == 0, false, ""});
  checks.push_back(below("secular_pin_zero", spectrum.record(1).secular_residual, 1e-12));
  checks.push_back(below("secular_residuals", worst_secular, config.solver.residual_tol,
                         any_fallback ? "bisection fallback used" : ""));
  checks.push_back(CheckResult{"fprime_negative", worst_fprime, 0.0,
                               spectrum.size() < 2 || worst_fprime < 0.0, false,
                               "root simplicity surrogate"});
  checks.push_back(below("alt_characterization", worst_alt, 1e-9));
  checks.push_back(below("trace_identity_spectrum",
                         std::abs(spectrum.trace_check) / std::abs(model.trace()), 1e-10));

  const BiorthogonalSystem system = BiorthogonalSystem::build(model.view(), spectrum);
  checks.push_back(below("eigen_residual_right", system.max_right_residual(), 1e-9));
  checks.push_back(below("eigen_residual_left", system.max_left_residual(), 1e-9));
  checks.push_back(below("sum_zero", sum_zero_defect(system), 1e-10));
  checks.push_back(below("biorthogonality", biorthogonality_defect(system, 40), 1e-6,
                         "indices up to 40"));
  checks.push_back(below("pairing_closed_form", closed_form_pairing_defect(system), 1e-8,
                         "(p_k, q_k) = -f'(nu_k)"));

  double worst_projection = 0.0;
  for (int j = 1; j <= system.size(); ++j) {
    worst_projection = std::max(worst_projection, projection_crosscheck(system, j));
  }
  checks.push_back(below("projection_crosscheck", worst_projection, 1e-6));
  checks.push_back(below("factorization", factorization_residual(model.view()), 1e-14,
                         "A = H(I+S)"));

  const GramReport gram = gram_diagnostic(model.view(), system, 2);
  checks.push_back(CheckResult{"gram_diagnostic", static_cast<double>(gram.smallest_n_star),
                               static_cast<double>(config.n),
                               gram.smallest_n_star > 0 && gram.nonincreasing, false,
                               "G(2) = " + format_double(gram.g_value)});

  const Lemma1Report lemma1 = lemma1_check(model);
  checks.push_back(CheckResult{"lemma1_gap_bound", lemma1.min_ratio, 1.0, lemma1.holds, false,
                               "constant " + format_double(lemma1.constant)});

  {
    // Lemma 2 boundedness: the supremum converges as the truncation grows;
    // require nonincreasing increments and at most 1% total growth.
    std::string note;
    bool pass = true;
    double measured = 0.0;
    if (config.n >= 16) {
      std::vector<double> sups;
      for (int scale = 4; scale >= 1; scale /= 2) {
        const int nn = config.n / scale;
        const TruncatedModel scaled(spec, nn);
        const SecularContext scaled_ctx = SecularContext::for_view(scaled.view());
        const Spectrum scaled_spectrum = solve_spectrum(scaled_ctx, config.solver);
        sups.push_back(lemma2_supremum(scaled_ctx, scaled_spectrum));
        note += (note.empty() ? "sup(" : ", sup(") + std::to_string(nn) +
                ") = " + format_double(sups.back());
      }
      const double inc1 = sups[1] - sups[0];
      const double inc2 = sups[2] - sups[1];
      measured = sups[2] / sups[0] - 1.0;
      pass = inc2 <= inc1 + 1e-12 && measured <= 0.01;
    } else {
      const double sup = lemma2_supremum(ctx, spectrum);
      measured = 0.0;
      note = "sup(" + std::to_string(config.n) + ") = " + format_double(sup);
    }
    checks.push_back(CheckResult{"lemma2_bounded", measured, 0.01, pass, false, note});
  }

  // Evolution battery on the canonical interval [0, 10].
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(config.n);
  e1(0) = 1.0;
  const ProbabilityVector p0 = ProbabilityVector::strict(e1);
  const std::vector<double> taus = uniform_grid(10.0, 21);
  const double ode_tol = config.evolve.present ? config.evolve.ode_tol : 1e-10;

  const Trajectory spectral = spectral_propagate(system, spectrum, p0, taus);
  const Trajectory ode = ode_propagate(model.generator(), p0, taus, ode_tol);
  double divergence = 0.0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    divergence = std::max(divergence, (spectral.states[i] - ode.states[i]).norm());
  }
  checks.push_back(below("oracle_agreement", divergence, 1e-6,
                         "spectral vs RK4, tau <= 10"));

  const TrajectoryCheck spectral_check = positivity_conservation_check(spectral);
  checks.push_back(CheckResult{"conservation_positivity_spectral",
                               std::max(spectral_check.max_sum_error,
                                        std::max(0.0, -spectral_check.min_component)),
                               1e-9, spectral_check.pass, false, ""});
  const TrajectoryCheck ode_check = positivity_conservation_check(ode);
  checks.push_back(CheckResult{"conservation_positivity_ode",
                               std::max(ode_check.max_sum_error,
                                        std::max(0.0, -ode_check.min_component)),
                               1e-9, ode_check.pass, false, ""});

  {
    const ProbabilityVector gibbs = model.gibbs_vector(1.0);
    const Trajectory fixed = spectral_propagate(system, spectrum, gibbs, {0.1, 1.0, 10.0});
    double drift = 0.0;
    for (const Eigen::VectorXd& state : fixed.states) {
      drift = std::max(drift, (state - gibbs.components()).norm());
    }
    checks.push_back(below("gibbs_stationarity", drift, 1e-12));
  }

  {
    const LyapunovReport lyapunov = lyapunov_estimate(spectrum, system);
    checks.push_back(CheckResult{"lyapunov_exponent", lyapunov.exponent, 0.0,
                                 lyapunov.exponent == 0.0, false, ""});
    checks.push_back(below("lyapunov_trend", lyapunov.diagnostic_trend, 1e-12));
  }

  if (config.n >= 2) {
    // Single-mode decay: perturb Gibbs along the slowest mode that admits a
    // perturbation of amplitude at least 1e-3 while staying positive.
    const auto perturbation = feasible_mode_perturbation(system, 1e-3);
    if (perturbation) {
      const double rate = spectrum.nu(perturbation->k);
      const std::vector<double> grid = uniform_grid(5.0 / std::abs(rate), 64);
      const Trajectory trajectory =
          spectral_propagate(system, spectrum, perturbation->p0, grid);
      const DecayReport decay = decay_fit(trajectory, system, spectrum);
      const double gap = std::abs(decay.fitted_rate - rate) / std::abs(rate);
      checks.push_back(below("decay_single_mode", gap, 0.01,
                             "mode k = " + std::to_string(perturbation->k) +
                                 ", fitted " + format_double(decay.fitted_rate)));
    } else {
      checks.push_back(CheckResult{"decay_single_mode", 0.0, 0.01, false, false,
                                   "no feasible mode perturbation"});
    }
  }

  finite_suite(checks);
  return report;
}

}  // namespace mespec
