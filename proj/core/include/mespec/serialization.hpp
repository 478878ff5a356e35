#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "mespec/evolution.hpp"
#include "mespec/run_config.hpp"
#include "mespec/secular.hpp"
#include "mespec/truncated_model.hpp"

namespace mespec {

// Echo of the model parameters placed at the top of every artifact so a file
// is self-describing.
struct ModelEcho {
  LevelKind kind = LevelKind::Affine;
  double omega = 0.0;
  double offset = 0.0;
  std::vector<double> values;
  double alpha = 0.0;
  double theta = 0.0;
  double gap_constant = 0.0;
  int n = 0;

  static ModelEcho from(const LevelSpec& spec, int n);
};

struct SpectrumFile {
  ModelEcho model;
  double trace = 0.0;
  double trace_check = 0.0;
  double tail_bound = 0.0;
  bool finite_model = false;
  std::vector<EigenvalueRecord> records;
};

// Structured text, shortest round-trip decimals, LF endings. parse(write(x))
// reproduces every numeric field bit-identically.
std::string write_spectrum_text(const SpectrumFile& file, bool header);
SpectrumFile parse_spectrum_text(const std::string& text);

std::string write_trajectory_csv(const Trajectory& trajectory, bool header);
std::string write_divergence_csv(const std::vector<double>& taus,
                                 const std::vector<double>& l2_diff, bool header);

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = true;
  bool warning_only = false;  // hypothesis flags; fail the run only under --strict
  std::string note;
};

struct VerificationReport {
  ModelEcho model;
  std::vector<CheckResult> checks;

  bool all_pass() const;     // ignores warning-only entries
  bool strict_pass() const;  // warnings count as failures
  int failures() const;
  int warnings() const;
};

std::string write_report_text(const VerificationReport& report, bool header);

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace mespec
