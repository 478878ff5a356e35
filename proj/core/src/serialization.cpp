#include "mespec/serialization.hpp"

#include <fstream>
#include <sstream>

#include "mespec/errors.hpp"
#include "mespec/numeric_text.hpp"
#include "mespec/structured_text.hpp"

namespace mespec {

namespace {

const char* kind_name(LevelKind kind) {
  return kind == LevelKind::Affine ? "affine" : "explicit";
}

void write_model_echo(std::ostream& out, const ModelEcho& model) {
  out << "[model]\n";
  out << "kind = " << kind_name(model.kind) << "\n";
  if (model.kind == LevelKind::Affine) {
    out << "omega = " << format_double(model.omega) << "\n";
    out << "offset = " << format_double(model.offset) << "\n";
  } else {
    out << "values = ";
    for (std::size_t i = 0; i < model.values.size(); ++i) {
      if (i > 0) {
        out << ", ";
      }
      out << format_double(model.values[i]);
    }
    out << "\n";
  }
  out << "alpha = " << format_double(model.alpha) << "\n";
  out << "theta = " << format_double(model.theta) << "\n";
  out << "gap_constant = " << format_double(model.gap_constant) << "\n";
  out << "n = " << model.n << "\n";
}

ModelEcho parse_model_echo(const SectionMap& sections) {
  const auto it = sections.find("model");
  if (it == sections.end()) {
    throw ValidationError("spectrum file lacks a [model] section");
  }
  const auto& kv = it->second;
  const auto need = [&](const std::string& key) {
    const auto entry = kv.find(key);
    if (entry == kv.end()) {
      throw ValidationError("spectrum file lacks model." + key);
    }
    return entry->second;
  };
  ModelEcho model;
  const std::string kind = need("kind");
  if (kind == "affine") {
    model.kind = LevelKind::Affine;
    model.omega = parse_double(need("omega"));
    model.offset = parse_double(need("offset"));
  } else if (kind == "explicit") {
    model.kind = LevelKind::Explicit;
    for (const std::string& item : split_list(need("values"), ',')) {
      model.values.push_back(parse_double(item));
    }
  } else {
    throw ValidationError("unknown model kind '" + kind + "' in spectrum file");
  }
  model.alpha = parse_double(need("alpha"));
  model.theta = parse_double(need("theta"));
  model.gap_constant = parse_double(need("gap_constant"));
  model.n = static_cast<int>(parse_integer(need("n")));
  return model;
}

}  // namespace

ModelEcho ModelEcho::from(const LevelSpec& spec, int n) {
  ModelEcho model;
  model.kind = spec.kind;
  model.omega = spec.omega;
  model.offset = spec.offset;
  model.values = spec.values;
  model.alpha = spec.alpha;
  model.theta = spec.theta;
  model.gap_constant = spec.gap_constant;
  model.n = n;
  return model;
}

std::string write_spectrum_text(const SpectrumFile& file, bool header) {
  std::ostringstream out;
  if (header) {
    out << "# mespec spectrum\n";
  }
  write_model_echo(out, file.model);
  out << "\n[summary]\n";
  out << "trace = " << format_double(file.trace) << "\n";
  out << "trace_check = " << format_double(file.trace_check) << "\n";
  out << "tail_bound = " << format_double(file.tail_bound) << "\n";
  out << "finite_model = " << (file.finite_model ? "true" : "false") << "\n";
  out << "eigenvalues = " << file.records.size() << "\n";
  for (const EigenvalueRecord& rec : file.records) {
    out << "\n[eigenvalue " << rec.k << "]\n";
    out << "nu = " << format_double(rec.nu) << "\n";
    out << "offset = " << format_double(rec.offset) << "\n";
    out << "bracket_lo = " << format_double(rec.bracket_lo) << "\n";
    out << "bracket_hi = " << format_double(rec.bracket_hi) << "\n";
    out << "secular_residual = " << format_double(rec.secular_residual) << "\n";
    out << "fprime = " << format_double(rec.fprime) << "\n";
    out << "alt_residual = " << format_double(rec.alt_residual) << "\n";
    out << "newton_fallback = " << (rec.newton_fallback ? "true" : "false") << "\n";
  }
  return out.str();
}

SpectrumFile parse_spectrum_text(const std::string& text) {
  const SectionMap sections = parse_structured_text(text);
  SpectrumFile file;
  file.model = parse_model_echo(sections);

  const auto summary = sections.find("summary");
  if (summary == sections.end()) {
    throw ValidationError("spectrum file lacks a [summary] section");
  }
  const auto need = [](const auto& kv, const std::string& key) {
    const auto entry = kv.find(key);
    if (entry == kv.end()) {
      throw ValidationError("spectrum file lacks key '" + key + "'");
    }
    return entry->second;
  };
  file.trace = parse_double(need(summary->second, "trace"));
  file.trace_check = parse_double(need(summary->second, "trace_check"));
  file.tail_bound = parse_double(need(summary->second, "tail_bound"));
  file.finite_model = parse_bool(need(summary->second, "finite_model"));
  const long count = parse_integer(need(summary->second, "eigenvalues"));

  for (long k = 1; k <= count; ++k) {
    const auto section = sections.find("eigenvalue " + std::to_string(k));
    if (section == sections.end()) {
      throw ValidationError("spectrum file lacks [eigenvalue " + std::to_string(k) + "]");
    }
    const auto& kv = section->second;
    EigenvalueRecord rec;
    rec.k = static_cast<int>(k);
    rec.nu = parse_double(need(kv, "nu"));
    rec.offset = parse_double(need(kv, "offset"));
    rec.bracket_lo = parse_double(need(kv, "bracket_lo"));
    rec.bracket_hi = parse_double(need(kv, "bracket_hi"));
    rec.secular_residual = parse_double(need(kv, "secular_residual"));
    rec.fprime = parse_double(need(kv, "fprime"));
    rec.alt_residual = parse_double(need(kv, "alt_residual"));
    rec.newton_fallback = parse_bool(need(kv, "newton_fallback"));
    file.records.push_back(rec);
  }
  return file;
}

std::string write_trajectory_csv(const Trajectory& trajectory, bool header) {
  std::ostringstream out;
  if (header) {
    out << "# mespec trajectory\n";
  }
  const Eigen::Index n = trajectory.states.empty() ? 0 : trajectory.states.front().size();
  out << "tau";
  for (Eigen::Index m = 1; m <= n; ++m) {
    out << ",p_" << m;
  }
  out << "\n";
  for (std::size_t i = 0; i < trajectory.taus.size(); ++i) {
    out << format_double(trajectory.taus[i]);
    const Eigen::VectorXd& state = trajectory.states[i];
    for (Eigen::Index m = 0; m < state.size(); ++m) {
      out << "," << format_double(state(m));
    }
    out << "\n";
  }
  return out.str();
}

std::string write_divergence_csv(const std::vector<double>& taus,
                                 const std::vector<double>& l2_diff, bool header) {
  std::ostringstream out;
  if (header) {
    out << "# mespec divergence\n";
  }
  out << "tau,l2_diff\n";
  for (std::size_t i = 0; i < taus.size(); ++i) {
    out << format_double(taus[i]) << "," << format_double(l2_diff[i]) << "\n";
  }
  return out.str();
}

bool VerificationReport::all_pass() const {
  for (const CheckResult& check : checks) {
    if (!check.pass && !check.warning_only) {
      return false;
    }
  }
  return true;
}

bool VerificationReport::strict_pass() const {
  for (const CheckResult& check : checks) {
    if (!check.pass) {
      return false;
    }
  }
  return true;
}

int VerificationReport::failures() const {
  int count = 0;
  for (const CheckResult& check : checks) {
    if (!check.pass && !check.warning_only) {
      ++count;
    }
  }
  return count;
}

int VerificationReport::warnings() const {
  int count = 0;
  for (const CheckResult& check : checks) {
    if (!check.pass && check.warning_only) {
      ++count;
    }
  }
  return count;
}

std::string write_report_text(const VerificationReport& report, bool header) {
  std::ostringstream out;
  if (header) {
    out << "# mespec verification report\n";
  }
  write_model_echo(out, report.model);
  int index = 0;
  for (const CheckResult& check : report.checks) {
    ++index;
    out << "\n[check " << index << "]\n";
    out << "name = " << check.name << "\n";
    out << "measured = " << format_double(check.measured) << "\n";
    out << "threshold = " << format_double(check.threshold) << "\n";
    out << "pass = " << (check.pass ? "true" : "false") << "\n";
    if (check.warning_only) {
      out << "warning_only = true\n";
    }
    if (!check.note.empty()) {
      out << "note = " << check.note << "\n";
    }
  }
  out << "\n[summary]\n";
  out << "checks = " << report.checks.size() << "\n";
  out << "failed = " << report.failures() << "\n";
  out << "warnings = " << report.warnings() << "\n";
  out << "all_pass = " << (report.all_pass() ? "true" : "false") << "\n";
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write file '" + path.string() + "'");
  }
  out << content;
  if (!out) {
    throw ValidationError("failed while writing '" + path.string() + "'");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open file '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace mespec
