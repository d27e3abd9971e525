#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cqed/errors.hpp"
#include "cqed/fockspace.hpp"
#include "cqed/model.hpp"

namespace cqed {

namespace {

using nlohmann::json;

// Line of the first occurrence of a quoted key, for error messages only.
int line_of_key(std::string_view text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string_view::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

class Reader {
public:
  explicit Reader(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::string& field, const std::string& message) const {
    const auto dot = field.find_last_of('.');
    const auto leaf = field.substr(dot == std::string::npos ? 0 : dot + 1);
    const auto bracket = leaf.find('[');
    throw ParseError(field, line_of_key(text_, leaf.substr(0, bracket)), message);
  }

  void require_object(const json& node, const std::string& path) const {
    if (!node.is_object()) fail(path, "expected an object");
  }

  void reject_unknown(const json& node, const std::string& path,
                      std::initializer_list<const char*> allowed) const {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : node.items()) {
      if (!ok.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
    }
  }

  double number(const json& node, const std::string& path, const char* key,
                std::optional<double> fallback) const {
    if (!node.contains(key)) {
      if (fallback) return *fallback;
      fail(path + "." + key, "missing required field");
    }
    const auto& v = node.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
  }

  int integer(const json& node, const std::string& path, const char* key, int fallback) const {
    if (!node.contains(key)) return fallback;
    const auto& v = node.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<int>();
  }

  std::string string(const json& node, const std::string& path, const char* key,
                     const std::string& fallback) const {
    if (!node.contains(key)) return fallback;
    const auto& v = node.at(key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
  }

private:
  std::string_view text_;
};

RawSystemParams read_system(const Reader& r, const json& node) {
  r.require_object(node, "system");
  r.reject_unknown(node, "system",
                   {"omega_q_MHz", "omega_c_MHz", "alpha_MHz", "kerr_c_MHz", "chi_MHz",
                    "kappa_q_MHz", "kappa_c_MHz", "kappa_d_MHz"});
  RawSystemParams p;
  p.omega_q = r.number(node, "system", "omega_q_MHz", std::nullopt);
  p.omega_c = r.number(node, "system", "omega_c_MHz", std::nullopt);
  p.alpha = r.number(node, "system", "alpha_MHz", std::nullopt);
  p.kerr_c = r.number(node, "system", "kerr_c_MHz", std::nullopt);
  p.chi = r.number(node, "system", "chi_MHz", std::nullopt);
  p.kappa_q = r.number(node, "system", "kappa_q_MHz", 0.0);
  p.kappa_c = r.number(node, "system", "kappa_c_MHz", 0.0);
  p.kappa_d = r.number(node, "system", "kappa_d_MHz", 0.0);
  return p;
}

std::vector<RawDriveTone> read_drives(const Reader& r, const json& node) {
  if (!node.is_array()) r.fail("drives", "expected an array");
  std::vector<RawDriveTone> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const auto path = "drives[" + std::to_string(i) + "]";
    const auto& d = node[i];
    r.require_object(d, path);
    r.reject_unknown(d, path, {"target", "epsilon_MHz", "detuning_MHz", "phase_rad"});
    RawDriveTone t;
    const auto target = r.string(d, path, "target", "");
    if (target.empty()) r.fail(path + ".target", "missing required field");
    try {
      t.target = parse_mode(target);
    } catch (const ValidationError& e) {
      r.fail(path + ".target", e.what());
    }
    t.epsilon = r.number(d, path, "epsilon_MHz", std::nullopt);
    t.detuning = r.number(d, path, "detuning_MHz", std::nullopt);
    t.phase = r.number(d, path, "phase_rad", 0.0);
    out.push_back(t);
  }
  return out;
}

HilbertSpec read_hilbert(const Reader& r, const json& node) {
  r.require_object(node, "hilbert");
  r.reject_unknown(node, "hilbert", {"n_q", "n_c"});
  HilbertSpec h;
  h.n_q = r.integer(node, "hilbert", "n_q", h.n_q);
  h.n_c = r.integer(node, "hilbert", "n_c", h.n_c);
  return h;
}

SolverSettings read_solver(const Reader& r, const json& node) {
  r.require_object(node, "solver");
  r.reject_unknown(node, "solver", {"rtol", "atol", "max_step_ns", "propagator"});
  SolverSettings s;
  s.rtol = r.number(node, "solver", "rtol", s.rtol);
  s.atol = r.number(node, "solver", "atol", s.atol);
  s.max_step_ns = r.number(node, "solver", "max_step_ns", s.max_step_ns);
  s.propagator = r.string(node, "solver", "propagator", s.propagator);
  return s;
}

SweepAxis read_axis(const Reader& r, const json& node, const std::string& path) {
  r.require_object(node, path);
  r.reject_unknown(node, path, {"name", "values", "start", "stop", "count"});
  SweepAxis axis;
  axis.name = r.string(node, path, "name", "");
  if (axis.name.empty()) r.fail(path + ".name", "missing required field");
  if (node.contains("values")) {
    if (node.contains("start") || node.contains("stop") || node.contains("count"))
      r.fail(path, "give either 'values' or 'start'/'stop'/'count', not both");
    const auto& v = node.at("values");
    if (!v.is_array()) r.fail(path + ".values", "expected an array of numbers");
    for (const auto& x : v) {
      if (!x.is_number()) r.fail(path + ".values", "expected an array of numbers");
      axis.values.push_back(x.get<double>());
    }
  } else {
    const double start = r.number(node, path, "start", std::nullopt);
    const double stop = r.number(node, path, "stop", std::nullopt);
    const int count = r.integer(node, path, "count", 0);
    if (count < 1) r.fail(path + ".count", "must be >= 1");
    axis.values = linspace(start, stop, count);
  }
  return axis;
}

ExperimentBlock read_experiment(const Reader& r, const json& node) {
  r.require_object(node, "experiment");
  r.reject_unknown(node, "experiment",
                   {"axes", "gate_time_us", "initial_state", "photon_index", "nu_corr_MHz",
                    "early_rwa_cutoff_MHz", "models"});
  ExperimentBlock e;
  if (node.contains("axes")) {
    const auto& axes = node.at("axes");
    if (!axes.is_array()) r.fail("experiment.axes", "expected an array");
    e.axes.clear();
    for (std::size_t i = 0; i < axes.size(); ++i)
      e.axes.push_back(read_axis(r, axes[i], "experiment.axes[" + std::to_string(i) + "]"));
  }
  e.gate_time_us = r.number(node, "experiment", "gate_time_us", e.gate_time_us);
  e.initial_state = r.string(node, "experiment", "initial_state", e.initial_state);
  e.photon_index = r.integer(node, "experiment", "photon_index", e.photon_index);
  if (node.contains("nu_corr_MHz") && !node.at("nu_corr_MHz").is_null())
    e.nu_corr_MHz = r.number(node, "experiment", "nu_corr_MHz", std::nullopt);
  e.early_rwa_cutoff_MHz =
      r.number(node, "experiment", "early_rwa_cutoff_MHz", e.early_rwa_cutoff_MHz);
  if (node.contains("models")) {
    const auto& m = node.at("models");
    if (!m.is_array()) r.fail("experiment.models", "expected an array of strings");
    e.models.clear();
    for (const auto& x : m) {
      if (!x.is_string()) r.fail("experiment.models", "expected an array of strings");
      e.models.push_back(x.get<std::string>());
    }
  }
  return e;
}

bool strictly_monotone(const std::vector<double>& v) {
  if (v.size() < 2) return true;
  const bool up = v[1] > v[0];
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (up ? !(v[i] > v[i - 1]) : !(v[i] < v[i - 1])) return false;
  }
  return true;
}

void validate_experiment(const ExperimentBlock& e) {
  if (e.axes.empty()) throw ValidationError("experiment.axes", "at least one sweep axis is required");
  for (const auto& a : e.axes) {
    if (a.values.empty()) throw ValidationError("experiment.axes." + a.name, "axis has no values");
    if (!strictly_monotone(a.values))
      throw ValidationError("experiment.axes." + a.name, "axis values must be strictly monotone");
  }
  if (!(e.gate_time_us > 0.0)) throw ValidationError("experiment.gate_time_us", "must be > 0");
  if (e.photon_index < 0) throw ValidationError("experiment.photon_index", "must be >= 0");
  if (e.early_rwa_cutoff_MHz < 0.0)
    throw ValidationError("experiment.early_rwa_cutoff_MHz", "must be >= 0");
  parse_label(e.initial_state);
  for (const auto& m : e.models) {
    if (m != "late" && m != "late_no_h2" && m != "early")
      throw ValidationError("experiment.models", "unknown model '" + m + "'");
  }
}

void validate_solver(const SolverSettings& s) {
  if (!(s.rtol > 0.0)) throw ValidationError("solver.rtol", "must be > 0");
  if (!(s.atol > 0.0)) throw ValidationError("solver.atol", "must be > 0");
  if (!(s.max_step_ns > 0.0)) throw ValidationError("solver.max_step_ns", "must be > 0");
  if (s.propagator != "auto" && s.propagator != "dopri5")
    throw ValidationError("solver.propagator", "must be \"auto\" or \"dopri5\"");
}

} // namespace

ExperimentConfig load_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ParseError("", line, e.what());
  }

  const Reader r(text);
  r.require_object(root, "");
  r.reject_unknown(root, "", {"system", "drives", "hilbert", "solver", "experiment"});
  if (!root.contains("system")) r.fail("system", "missing required block");

  ExperimentConfig cfg;
  cfg.system = read_system(r, root.at("system"));
  if (root.contains("drives")) cfg.drives = read_drives(r, root.at("drives"));
  if (root.contains("hilbert")) cfg.hilbert = read_hilbert(r, root.at("hilbert"));
  if (root.contains("solver")) cfg.solver = read_solver(r, root.at("solver"));
  if (root.contains("experiment")) cfg.experiment = read_experiment(r, root.at("experiment"));

  const auto params = validate_params(cfg.system).params;
  for (std::size_t i = 0; i < cfg.drives.size(); ++i) {
    try {
      validate_tone(cfg.drives[i], params);
    } catch (const ValidationError& e) {
      throw ValidationError("drives[" + std::to_string(i) + "]." + e.field(), e.what());
    }
  }
  validate_hilbert(cfg.hilbert);
  validate_solver(cfg.solver);
  validate_experiment(cfg.experiment);
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json root;
  const auto& s = cfg.system;
  root["system"] = {{"omega_q_MHz", s.omega_q}, {"omega_c_MHz", s.omega_c},
                    {"alpha_MHz", s.alpha},     {"kerr_c_MHz", s.kerr_c},
                    {"chi_MHz", s.chi},         {"kappa_q_MHz", s.kappa_q},
                    {"kappa_c_MHz", s.kappa_c}, {"kappa_d_MHz", s.kappa_d}};
  root["drives"] = json::array();
  for (const auto& d : cfg.drives) {
    root["drives"].push_back({{"target", std::string(to_string(d.target))},
                              {"epsilon_MHz", d.epsilon},
                              {"detuning_MHz", d.detuning},
                              {"phase_rad", d.phase}});
  }
  root["hilbert"] = {{"n_q", cfg.hilbert.n_q}, {"n_c", cfg.hilbert.n_c}};
  root["solver"] = {{"rtol", cfg.solver.rtol},
                    {"atol", cfg.solver.atol},
                    {"max_step_ns", cfg.solver.max_step_ns},
                    {"propagator", cfg.solver.propagator}};
  const auto& e = cfg.experiment;
  json axes = json::array();
  for (const auto& a : e.axes) axes.push_back({{"name", a.name}, {"values", a.values}});
  root["experiment"] = {{"axes", axes},
                        {"gate_time_us", e.gate_time_us},
                        {"initial_state", e.initial_state},
                        {"photon_index", e.photon_index},
                        {"early_rwa_cutoff_MHz", e.early_rwa_cutoff_MHz},
                        {"models", e.models}};
  root["experiment"]["nu_corr_MHz"] = e.nu_corr_MHz ? json(*e.nu_corr_MHz) : json(nullptr);
  return root.dump(2) + "\n";
}

} // namespace cqed
