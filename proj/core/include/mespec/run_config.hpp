#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mespec/level_spec.hpp"
#include "mespec/secular.hpp"

namespace mespec {

enum class Command { Spectrum, Evolve, Verify, Finite };

enum class InitKind { Gibbs, BasisState, File, GibbsPlusMode };

enum class EvolveMethod { Spectral, Ode, Both };

struct EvolveConfig {
  InitKind init = InitKind::Gibbs;
  int basis_index = 1;       // basis_state:<m>
  std::string init_file;     // file:<path>
  int mode_k = 0;            // gibbs_plus_mode:<k,eps>
  double mode_eps = 0.0;
  double tau_max = 0.0;
  int samples = 0;
  EvolveMethod method = EvolveMethod::Both;
  double ode_tol = 1e-10;
  bool present = false;
};

struct OutputConfig {
  std::string dir = ".";
  bool text = true;   // structured-text artifacts (spectrum, reports)
  bool csv = true;    // trajectory artifacts
  bool header = false;  // optional fixed header comment in output files
};

// Parsed, schema-checked configuration. Physics parameters have no
// defaults; only tolerances do. Unknown sections or keys are rejected with
// the offending name.
struct RunConfig {
  LevelSpec model;
  std::vector<double> raw_values;  // unvalidated explicit levels (direction is per command)
  bool has_alpha = false;
  bool has_theta = false;
  bool has_gap = false;
  std::optional<double> rho;

  int n = 0;
  double tail_tol = 1e-9;

  SolverOptions solver;
  EvolveConfig evolve;
  OutputConfig output;

  // Throws ValidationError when a field required by the command is missing
  // or violates a module precondition.
  void validate_for(Command command) const;

  LevelSpec level_spec() const;                  // increasing convention
  std::vector<double> decreasing_levels() const; // finite-system convention
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace mespec
