#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cqed/units.hpp"

namespace cqed {

enum class Mode { qubit, cavity };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view text);

/// System constants as written in a config file: ordinary frequencies in MHz.
struct RawSystemParams {
  double omega_q = 0.0;
  double omega_c = 0.0;
  double alpha = 0.0;
  double kerr_c = 0.0;
  double chi = 0.0;
  double kappa_q = 0.0;
  double kappa_c = 0.0;
  double kappa_d = 0.0;

  friend bool operator==(const RawSystemParams&, const RawSystemParams&) = default;
};

/// Validated system constants in angular units. alpha, kerr_c and chi are the
/// magnitudes of -(alpha/2) b+^2 b^2, -(K_c/2) a+^2 a^2 and -chi b+b a+a.
struct SystemParams {
  Frequency omega_q;
  Frequency omega_c;
  Frequency alpha;
  Frequency kerr_c;
  Frequency chi;
  Frequency kappa_q;
  Frequency kappa_c;
  Frequency kappa_d;

  Frequency mode_frequency(Mode m) const { return m == Mode::qubit ? omega_q : omega_c; }
  Frequency decay_rate(Mode m) const { return m == Mode::qubit ? kappa_q : kappa_c; }
};

struct ValidatedParams {
  SystemParams params;
  std::vector<std::string> warnings;
};

/// Checks the sign and regime constraints and converts MHz to rad/us.
/// Throws ValidationError naming the first offending field.
ValidatedParams validate_params(const RawSystemParams& raw);

/// Back to MHz; inverse of the conversion done in validate_params.
RawSystemParams to_raw(const SystemParams& params);

/// Table S1 device constants (MHz), kappas zero.
RawSystemParams table_s1_params();

struct RawDriveTone {
  Mode target = Mode::qubit;
  double epsilon = 0.0;   // MHz
  double detuning = 0.0;  // MHz, relative to the target mode frequency
  double phase = 0.0;     // rad

  friend bool operator==(const RawDriveTone&, const RawDriveTone&) = default;
};

/// One cosine drive eps*cos(omega_d t + theta) on the target mode, with
/// omega_d = omega_mode + detuning.
struct DriveTone {
  Mode target = Mode::qubit;
  Frequency epsilon;
  Frequency detuning;
  double phase = 0.0;

  static DriveTone qubit(double epsilon_MHz, double detuning_MHz, double phase = 0.0);
  static DriveTone cavity(double epsilon_MHz, double detuning_MHz, double phase = 0.0);
};

DriveTone validate_tone(const RawDriveTone& raw, const SystemParams& params);

struct HilbertSpec {
  int n_q = 4;
  int n_c = 12;

  int dim() const { return n_q * n_c; }
  friend bool operator==(const HilbertSpec&, const HilbertSpec&) = default;
};

void validate_hilbert(const HilbertSpec& h);

struct SolverSettings {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step_ns = 5.0;
  /// "auto": experiments use the exact propagator of the static drive-frame
  /// Hamiltonian when one exists; "dopri5": always integrate H(t).
  std::string propagator = "auto";

  friend bool operator==(const SolverSettings&, const SolverSettings&) = default;
};

struct SweepAxis {
  std::string name;
  std::vector<double> values;

  friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

/// Evenly spaced values start..stop inclusive.
std::vector<double> linspace(double start, double stop, int count);

struct ExperimentBlock {
  std::vector<SweepAxis> axes{{"epsilon_MHz", linspace(0.0, 15.0, 31)}};
  double gate_time_us = 4.2;
  std::string initial_state = "g0";
  int photon_index = 0;
  std::optional<double> nu_corr_MHz;
  double early_rwa_cutoff_MHz = 0.0;
  std::vector<std::string> models{"late", "late_no_h2", "early"};

  friend bool operator==(const ExperimentBlock&, const ExperimentBlock&) = default;
};

struct ExperimentConfig {
  RawSystemParams system;
  std::vector<RawDriveTone> drives;
  HilbertSpec hilbert;
  SolverSettings solver;
  ExperimentBlock experiment;

  SystemParams params() const;
  std::vector<DriveTone> tones() const;
  /// First configured tone on the given mode, if any.
  std::optional<RawDriveTone> first_tone(Mode m) const;
  const SweepAxis* axis(std::string_view name) const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses the JSON config schema (see docs/config.md). Unknown keys are
/// rejected; optional fields get their documented defaults.
ExperimentConfig load_config(std::string_view text);
ExperimentConfig load_config_file(const std::string& path);

/// Inverse of load_config; axes are always written as explicit value lists.
std::string serialize_config(const ExperimentConfig& cfg);

} // namespace cqed
