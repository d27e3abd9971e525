#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqed/hamiltonian.hpp"
#include "cqed/model.hpp"

namespace cqed {

/// Tabular sweep output. Cells enumerate the outer product of the axes in
/// row-major order (last axis fastest); `values[cell][column]`.
struct SweepResult {
  std::string experiment;
  std::vector<SweepAxis> axes;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;
  std::vector<std::string> errors;  // empty string for a good cell
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t cell_count() const;
  /// Axis coordinates of one cell.
  std::vector<double> coordinates(std::size_t cell) const;
  int column(std::string_view name) const;  // -1 if absent
  double at(std::size_t cell, std::string_view name) const;
};

/// Worker count: CQEDSIM_THREADS if set and positive, else the hardware count.
int worker_count();

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

/// Short machine-readable code for an exception raised while computing a cell.
std::string error_code(const std::exception& e);

/// Called after each completed sweep row with (rows done, rows total).
using Progress = std::function<void(std::size_t, std::size_t)>;

std::vector<Model> selected_models(const ExperimentConfig& cfg);

/// Stark shift vs drive amplitude on one mode (axis "epsilon_MHz").
SweepResult run_stark_amplitude_sweep(const ExperimentConfig& cfg, Mode target, const Progress& progress = {});

/// Qubit Stark shift vs qubit detuning (axis "detuning_MHz"), tracked along the sweep.
SweepResult run_stark_detuning_sweep(const ExperimentConfig& cfg, const Progress& progress = {});

/// Qubit excited population after the gate time over (epsilon_q_MHz, epsilon_c_MHz).
SweepResult run_tms_chevron(const ExperimentConfig& cfg, const Progress& progress = {});

struct CalibrationResult {
  double nu_corr_MHz = 0.0;
  double peak_transfer = 0.0;
  int evaluations = 0;
};

/// Offset of the cavity tone that maximizes max_t P_e over [0, window_us].
CalibrationResult calibrate_nu_corr(const ExperimentConfig& cfg, double window_us = 0.0);

/// Qubit excited population over (tau_us, delta_omega_MHz) with the cavity tone
/// offset by nu_corr + delta_omega. nu_corr from the config, else calibrated.
SweepResult run_beamsplit_map(const ExperimentConfig& cfg, const Progress& progress = {});

inline constexpr double reference_nu_corr_MHz = -5.02;

/// Qubit Stark shift of one qubit tone from the spectral models and from the
/// phase slope of the time-dependent oracle (driven minus undriven, so the
/// oracle's own static renormalization cancels).
struct OracleComparison {
  double epsilon_q_MHz = 0.0;
  double detuning_q_MHz = 0.0;
  double late_MHz = 0.0;
  double late_no_h2_MHz = 0.0;
  double early_MHz = 0.0;
  double oracle_MHz = 0.0;
  double oracle_driven_MHz = 0.0;    // e0 - g0 phase-slope frequency, driven
  double oracle_undriven_MHz = 0.0;  // same without drive
  double fit_residual = 0.0;         // worst rms phase residual of the two fits
  long oracle_steps = 0;
  double runtime_s = 0.0;

  double relative_gap() const;  // |late - oracle| / |oracle|
};

OracleComparison compare_with_oracle(const ExperimentConfig& cfg, double epsilon_q_MHz, double detuning_q_MHz,
                                     double duration_us = 2.0);

/// Configured drive tones with defaults for a missing qubit/cavity tone.
RawDriveTone tone_or(const ExperimentConfig& cfg, Mode m, double epsilon, double detuning);

} // namespace cqed
