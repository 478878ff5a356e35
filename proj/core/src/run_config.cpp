#include "mespec/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mespec/errors.hpp"
#include "mespec/numeric_text.hpp"
#include "mespec/structured_text.hpp"

namespace mespec {

namespace {

class SectionReader {
 public:
  SectionReader(const SectionMap& sections, const std::string& name) : name_(name) {
    const auto it = sections.find(name);
    if (it != sections.end()) {
      entries_ = &it->second;
    }
  }

  bool present() const { return entries_ != nullptr; }

  std::optional<std::string> get(const std::string& key) {
    if (entries_ == nullptr) {
      return std::nullopt;
    }
    const auto it = entries_->find(key);
    if (it == entries_->end()) {
      return std::nullopt;
    }
    consumed_.insert(key);
    return it->second;
  }

  std::string require(const std::string& key) {
    auto value = get(key);
    if (!value) {
      throw ValidationError("missing required key '" + name_ + "." + key + "'");
    }
    return *value;
  }

  void reject_unknown() const {
    if (entries_ == nullptr) {
      return;
    }
    for (const auto& [key, value] : *entries_) {
      if (!consumed_.contains(key)) {
        throw ValidationError("unknown key '" + name_ + "." + key + "'");
      }
    }
  }

 private:
  const std::map<std::string, std::string>* entries_ = nullptr;
  std::set<std::string> consumed_;
  std::string name_;
};

void parse_init(const std::string& text, EvolveConfig& evolve) {
  if (text == "gibbs") {
    evolve.init = InitKind::Gibbs;
    return;
  }
  if (text.starts_with("basis_state:")) {
    evolve.init = InitKind::BasisState;
    evolve.basis_index = static_cast<int>(parse_integer(text.substr(12)));
    return;
  }
  if (text.starts_with("file:")) {
    evolve.init = InitKind::File;
    evolve.init_file = text.substr(5);
    if (evolve.init_file.empty()) {
      throw ValidationError("init file path must not be empty");
    }
    return;
  }
  if (text.starts_with("gibbs_plus_mode:")) {
    evolve.init = InitKind::GibbsPlusMode;
    const auto parts = split_list(text.substr(16), ',');
    if (parts.size() != 2) {
      throw ValidationError("gibbs_plus_mode expects <k,eps>");
    }
    evolve.mode_k = static_cast<int>(parse_integer(parts[0]));
    evolve.mode_eps = parse_double(parts[1]);
    return;
  }
  throw ValidationError("unknown evolve.init '" + text + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  const SectionMap sections = parse_structured_text(text);
  for (const auto& [name, kv] : sections) {
    if (name != "model" && name != "truncation" && name != "solver" && name != "evolve" &&
        name != "output") {
      throw ValidationError("unknown section '" + name + "'");
    }
  }

  RunConfig config;

  SectionReader model(sections, "model");
  if (!model.present()) {
    throw ValidationError("missing [model] section");
  }
  const std::string kind = model.require("kind");
  if (kind == "affine") {
    config.model.kind = LevelKind::Affine;
    config.model.omega = parse_double(model.require("omega"));
    config.model.offset = parse_double(model.require("offset"));
  } else if (kind == "explicit") {
    config.model.kind = LevelKind::Explicit;
    for (const std::string& item : split_list(model.require("values"), ',')) {
      if (item.empty()) {
        throw ValidationError("empty entry in model.values");
      }
      config.raw_values.push_back(parse_double(item));
    }
    config.model.values = config.raw_values;
  } else {
    throw ValidationError("model.kind must be 'affine' or 'explicit'");
  }
  if (auto alpha = model.get("alpha")) {
    config.model.alpha = parse_double(*alpha);
    config.has_alpha = true;
  }
  if (auto theta = model.get("theta")) {
    config.model.theta = parse_double(*theta);
    config.has_theta = true;
  }
  if (auto gap = model.get("gap_constant")) {
    config.model.gap_constant = parse_double(*gap);
    config.has_gap = true;
  }
  if (auto rho = model.get("rho")) {
    config.rho = parse_double(*rho);
  }
  model.reject_unknown();

  SectionReader truncation(sections, "truncation");
  if (!truncation.present()) {
    throw ValidationError("missing [truncation] section");
  }
  config.n = static_cast<int>(parse_integer(truncation.require("n")));
  if (auto tail = truncation.get("tail_tol")) {
    config.tail_tol = parse_double(*tail);
  }
  truncation.reject_unknown();

  SectionReader solver(sections, "solver");
  if (auto v = solver.get("bisect_tol")) {
    config.solver.bisect_tol = parse_double(*v);
  }
  if (auto v = solver.get("residual_tol")) {
    config.solver.residual_tol = parse_double(*v);
  }
  if (auto v = solver.get("newton_max_iter")) {
    config.solver.newton_max_iter = static_cast<int>(parse_integer(*v));
  }
  solver.reject_unknown();

  SectionReader evolve(sections, "evolve");
  if (evolve.present()) {
    config.evolve.present = true;
    parse_init(evolve.require("init"), config.evolve);
    config.evolve.tau_max = parse_double(evolve.require("tau_max"));
    config.evolve.samples = static_cast<int>(parse_integer(evolve.require("samples")));
    const std::string method = evolve.require("method");
    if (method == "spectral") {
      config.evolve.method = EvolveMethod::Spectral;
    } else if (method == "ode") {
      config.evolve.method = EvolveMethod::Ode;
    } else if (method == "both") {
      config.evolve.method = EvolveMethod::Both;
    } else {
      throw ValidationError("evolve.method must be spectral, ode or both");
    }
    if (auto v = evolve.get("ode_tol")) {
      config.evolve.ode_tol = parse_double(*v);
    }
  }
  evolve.reject_unknown();

  SectionReader output(sections, "output");
  if (output.present()) {
    if (auto v = output.get("dir")) {
      config.output.dir = *v;
    }
    if (auto v = output.get("formats")) {
      config.output.text = false;
      config.output.csv = false;
      for (const std::string& fmt : split_list(*v, ',')) {
        if (fmt == "text") {
          config.output.text = true;
        } else if (fmt == "csv") {
          config.output.csv = true;
        } else {
          throw ValidationError("unknown output format '" + fmt + "'");
        }
      }
    }
    if (auto v = output.get("header")) {
      config.output.header = parse_bool(*v);
    }
  }
  output.reject_unknown();

  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream stream(path);
  if (!stream) {
    throw ValidationError("cannot open config file '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return parse_config_text(buffer.str());
}

void RunConfig::validate_for(Command command) const {
  if (n < 1) {
    throw ValidationError("truncation.n must be at least 1");
  }
  if (!(tail_tol > 0.0)) {
    throw ValidationError("truncation.tail_tol must be positive");
  }
  if (!(solver.bisect_tol > 0.0) || solver.bisect_tol >= 1.0) {
    throw ValidationError("solver.bisect_tol must lie in (0,1)");
  }
  if (!(solver.residual_tol > 0.0)) {
    throw ValidationError("solver.residual_tol must be positive");
  }
  if (solver.newton_max_iter < 1) {
    throw ValidationError("solver.newton_max_iter must be at least 1");
  }

  if (command == Command::Finite) {
    if (model.kind != LevelKind::Explicit) {
      throw ValidationError("finite mode requires explicit levels");
    }
    if (n < 2) {
      throw ValidationError("finite mode requires n >= 2");
    }
    if (static_cast<std::size_t>(n) > raw_values.size()) {
      throw ValidationError("truncation.n exceeds the number of explicit levels");
    }
    for (std::size_t i = 0; i + 1 < static_cast<std::size_t>(n); ++i) {
      if (!(raw_values[i] > raw_values[i + 1])) {
        throw ValidationError("finite mode levels must be strictly decreasing");
      }
    }
    return;
  }

  // Increasing-convention commands need the full rate parameters.
  if (!has_alpha) {
    throw ValidationError("missing required key 'model.alpha'");
  }
  if (!(model.alpha > 1.0)) {
    throw ValidationError("alpha must exceed 1");
  }
  if (!has_theta) {
    throw ValidationError("missing required key 'model.theta'");
  }
  if (!has_gap) {
    throw ValidationError("missing required key 'model.gap_constant'");
  }
  level_spec();  // full LevelSpec validation

  if (model.kind == LevelKind::Explicit &&
      static_cast<std::size_t>(n) > raw_values.size()) {
    throw ValidationError("truncation.n exceeds the number of explicit levels");
  }

  if (command == Command::Evolve) {
    if (!evolve.present) {
      throw ValidationError("missing [evolve] section");
    }
    if (!(evolve.tau_max > 0.0)) {
      throw ValidationError("evolve.tau_max must be positive");
    }
    if (evolve.samples < 2) {
      throw ValidationError("evolve.samples must be at least 2");
    }
    if (!(evolve.ode_tol > 0.0)) {
      throw ValidationError("evolve.ode_tol must be positive");
    }
    if (evolve.init == InitKind::BasisState &&
        (evolve.basis_index < 1 || evolve.basis_index > n)) {
      throw ValidationError("evolve basis state index out of range");
    }
    if (evolve.init == InitKind::GibbsPlusMode &&
        (evolve.mode_k < 2 || evolve.mode_k > n)) {
      throw ValidationError("evolve mode index must lie in [2, n]");
    }
  }
}

LevelSpec RunConfig::level_spec() const {
  LevelSpec spec = model;
  spec.validate();
  return spec;
}

std::vector<double> RunConfig::decreasing_levels() const {
  return std::vector<double>(raw_values.begin(), raw_values.begin() + n);
}

}  // namespace mespec
