// Command line front end: spectrum / evolve / verify / finite subcommands
// over a shared structured-text configuration.
#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "mespec/errors.hpp"
#include "mespec/evolution.hpp"
#include "mespec/finite_system.hpp"
#include "mespec/numeric_text.hpp"
#include "mespec/run_config.hpp"
#include "mespec/secular.hpp"
#include "mespec/serialization.hpp"
#include "mespec/spectral_basis.hpp"
#include "mespec/structured_text.hpp"
#include "mespec/verification.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;
constexpr int kExitVerification = 3;

namespace fs = std::filesystem;

struct CommandArgs {
  std::string config_path;
  std::string out_dir;  // overrides output.dir when nonempty
  bool strict = false;
};

fs::path resolve_out_dir(const mespec::RunConfig& config, const CommandArgs& args) {
  const fs::path dir = args.out_dir.empty() ? fs::path(config.output.dir)
                                            : fs::path(args.out_dir);
  fs::create_directories(dir);
  return dir;
}

mespec::ProbabilityVector initial_state(const mespec::RunConfig& config,
                                        const mespec::TruncatedModel& model,
                                        const mespec::BiorthogonalSystem& system) {
  using mespec::InitKind;
  switch (config.evolve.init) {
    case InitKind::Gibbs:
      return model.gibbs_vector(1.0);
    case InitKind::BasisState: {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(model.n());
      e(config.evolve.basis_index - 1) = 1.0;
      return mespec::ProbabilityVector::strict(std::move(e));
    }
    case InitKind::File: {
      const std::string text = mespec::read_file(config.evolve.init_file);
      std::vector<double> entries;
      for (const std::string& token : mespec::split_list(text, '\n')) {
        if (token.empty()) {
          continue;
        }
        for (const std::string& item : mespec::split_list(token, ',')) {
          if (!item.empty()) {
            entries.push_back(mespec::parse_double(item));
          }
        }
      }
      if (static_cast<int>(entries.size()) != model.n()) {
        throw mespec::ValidationError("initial state file has " +
                                      std::to_string(entries.size()) + " entries, expected " +
                                      std::to_string(model.n()));
      }
      Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(
          entries.data(), static_cast<Eigen::Index>(entries.size()));
      return mespec::ProbabilityVector::strict(std::move(v));
    }
    case InitKind::GibbsPlusMode: {
      const Eigen::VectorXd p0 = system.gibbs() + config.evolve.mode_eps *
                                     system.right(config.evolve.mode_k).components;
      return mespec::ProbabilityVector::strict(p0);
    }
  }
  throw mespec::ValidationError("unhandled init kind");
}

int cmd_spectrum(const CommandArgs& args) {
  const mespec::RunConfig config = mespec::load_config(args.config_path);
  config.validate_for(mespec::Command::Spectrum);
  const mespec::TruncatedModel model(config.level_spec(), config.n);
  const mespec::SecularContext ctx = mespec::SecularContext::for_view(model.view());
  const mespec::Spectrum spectrum = mespec::solve_spectrum(ctx, config.solver);

  mespec::SpectrumFile file;
  file.model = mespec::ModelEcho::from(model.spec(), model.n());
  file.trace = model.trace();
  file.trace_check = spectrum.trace_check;
  const mespec::TailBound tail = model.tail();
  file.tail_bound = tail.value;
  file.finite_model = tail.finite_model;
  file.records = spectrum.records;

  const fs::path dir = resolve_out_dir(config, args);
  if (config.output.text) {
    const fs::path path = dir / "spectrum.txt";
    mespec::write_file(path, mespec::write_spectrum_text(file, config.output.header));
    std::cout << "wrote " << path.string() << " (" << spectrum.size() << " eigenvalues)\n";
  } else {
    std::cout << "text output disabled; nothing written\n";
  }
  return kExitOk;
}

int cmd_evolve(const CommandArgs& args) {
  const mespec::RunConfig config = mespec::load_config(args.config_path);
  config.validate_for(mespec::Command::Evolve);
  const mespec::TruncatedModel model(config.level_spec(), config.n);
  const mespec::SecularContext ctx = mespec::SecularContext::for_view(model.view());
  const mespec::Spectrum spectrum = mespec::solve_spectrum(ctx, config.solver);
  const mespec::BiorthogonalSystem system =
      mespec::BiorthogonalSystem::build(model.view(), spectrum);

  const mespec::ProbabilityVector p0 = initial_state(config, model, system);
  const std::vector<double> taus =
      mespec::uniform_grid(config.evolve.tau_max, config.evolve.samples);
  const fs::path dir = resolve_out_dir(config, args);

  const bool spectral_run = config.evolve.method != mespec::EvolveMethod::Ode;
  const bool ode_run = config.evolve.method != mespec::EvolveMethod::Spectral;
  mespec::Trajectory spectral;
  mespec::Trajectory ode;
  if (spectral_run) {
    spectral = mespec::spectral_propagate(system, spectrum, p0, taus);
    if (config.output.csv) {
      const fs::path path = dir / "trajectory_spectral.csv";
      mespec::write_file(path, mespec::write_trajectory_csv(spectral, config.output.header));
      std::cout << "wrote " << path.string() << "\n";
    }
  }
  if (ode_run) {
    ode = mespec::ode_propagate(model.generator(), p0, taus, config.evolve.ode_tol);
    if (config.output.csv) {
      const fs::path path = dir / "trajectory_ode.csv";
      mespec::write_file(path, mespec::write_trajectory_csv(ode, config.output.header));
      std::cout << "wrote " << path.string() << "\n";
    }
  }
  if (spectral_run && ode_run && config.output.csv) {
    std::vector<double> diffs(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
      diffs[i] = (spectral.states[i] - ode.states[i]).norm();
    }
    const fs::path path = dir / "divergence.csv";
    mespec::write_file(path,
                       mespec::write_divergence_csv(taus, diffs, config.output.header));
    std::cout << "wrote " << path.string() << "\n";
  }
  return kExitOk;
}

int cmd_verify(const CommandArgs& args) {
  const mespec::RunConfig config = mespec::load_config(args.config_path);
  const mespec::VerificationReport report = mespec::run_verification(config);

  const fs::path dir = resolve_out_dir(config, args);
  fs::path path;
  if (config.output.text) {
    path = dir / "verify_report.txt";
    mespec::write_file(path, mespec::write_report_text(report, config.output.header));
  }

  for (const mespec::CheckResult& check : report.checks) {
    const char* status = check.pass ? "PASS" : (check.warning_only ? "WARN" : "FAIL");
    std::cout << status << " " << check.name
              << " measured=" << mespec::format_double(check.measured)
              << " threshold=" << mespec::format_double(check.threshold);
    if (!check.note.empty()) {
      std::cout << " (" << check.note << ")";
    }
    std::cout << "\n";
  }
  if (!path.empty()) {
    std::cout << "report: " << path.string() << "\n";
  }
  const bool ok = args.strict ? report.strict_pass() : report.all_pass();
  return ok ? kExitOk : kExitVerification;
}

int cmd_finite(const CommandArgs& args) {
  const mespec::RunConfig config = mespec::load_config(args.config_path);
  config.validate_for(mespec::Command::Finite);
  const mespec::FiniteSystem system(config.decreasing_levels(), config.rho);
  const mespec::Spectrum spectrum = mespec::finite_spectrum(system, config.solver);

  mespec::SpectrumFile file;
  file.model.kind = mespec::LevelKind::Explicit;
  file.model.values = config.decreasing_levels();
  file.model.n = system.n();
  file.trace = system.trace();
  file.trace_check = spectrum.trace_check;
  file.tail_bound = 0.0;
  file.finite_model = true;
  file.records = spectrum.records;

  const fs::path dir = resolve_out_dir(config, args);
  const fs::path spectrum_path = dir / "finite_spectrum.txt";
  mespec::write_file(spectrum_path, mespec::write_spectrum_text(file, config.output.header));

  const mespec::PerronResult perron = mespec::perron_radius(system, 1e-9);
  mespec::VerificationReport report;
  report.model = file.model;
  report.checks.push_back(mespec::CheckResult{
      "perron_radius_matches_shift", std::abs(perron.radius - system.rho()), 1e-8,
      std::abs(perron.radius - system.rho()) <= 1e-8 && perron.converged, false,
      std::to_string(perron.iterations) + " iterations"});
  const Eigen::VectorXd gibbs = system.gibbs_vector().components();
  const double vector_gap = (perron.vector - gibbs).norm();
  report.checks.push_back(mespec::CheckResult{"perron_vector_matches_gibbs", vector_gap, 1e-6,
                                              vector_gap <= 1e-6, false, ""});

  if (config.evolve.present) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(system.n());
    e(config.evolve.init == mespec::InitKind::BasisState ? config.evolve.basis_index - 1 : 0) =
        1.0;
    const mespec::FiniteDecayReport decay = mespec::finite_decay_check(
        system, mespec::ProbabilityVector::strict(e),
        mespec::uniform_grid(config.evolve.tau_max, config.evolve.samples));
    report.checks.push_back(mespec::CheckResult{"finite_gamma", std::abs(decay.gamma - 1.0),
                                                1e-8, std::abs(decay.gamma - 1.0) <= 1e-8,
                                                false, ""});
    report.checks.push_back(mespec::CheckResult{"finite_decay_envelope", decay.max_excess, 1.0,
                                                decay.envelope_holds, false,
                                                "rate " +
                                                    mespec::format_double(decay.decay_rate)});
  }

  const fs::path report_path = dir / "finite_report.txt";
  mespec::write_file(report_path, mespec::write_report_text(report, config.output.header));
  std::cout << "wrote " << spectrum_path.string() << "\n";
  std::cout << "wrote " << report_path.string() << "\n";
  return report.all_pass() ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral toolkit for detailed-balance master equation generators"};
  app.require_subcommand(1);

  CommandArgs args;
  const auto add_common = [&args](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "structured-text configuration file")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory (overrides output.dir)");
  };

  CLI::App* spectrum = app.add_subcommand("spectrum", "solve and write the full spectrum");
  add_common(spectrum);
  CLI::App* evolve = app.add_subcommand("evolve", "propagate an initial state");
  add_common(evolve);
  CLI::App* verify = app.add_subcommand("verify", "run every identity check");
  add_common(verify);
  verify->add_flag("--strict", args.strict, "treat hypothesis warnings as failures");
  CLI::App* finite = app.add_subcommand("finite", "decreasing-level finite system mode");
  add_common(finite);

  CLI11_PARSE(app, argc, argv);

  try {
    if (spectrum->parsed()) {
      return cmd_spectrum(args);
    }
    if (evolve->parsed()) {
      return cmd_evolve(args);
    }
    if (verify->parsed()) {
      return cmd_verify(args);
    }
    if (finite->parsed()) {
      return cmd_finite(args);
    }
  } catch (const mespec::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const mespec::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const mespec::ConsistencyError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitValidation;
}
