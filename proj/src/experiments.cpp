#include "cqed/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>
#include <tuple>

#include "cqed/dynamics.hpp"
#include "cqed/errors.hpp"
#include "cqed/spectra.hpp"

namespace cqed {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

const std::vector<double>& axis_or(const ExperimentConfig& cfg, std::string_view name, const std::vector<double>& fallback) {
  const SweepAxis* a = cfg.axis(name);
  return a ? a->values : fallback;
}

double qubit_population(const HilbertSpec& h, const Eigen::MatrixXcd& psi, int level, int col = 0) {
  double p = 0.0;
  for (int c = 0; c < h.n_c; ++c) p += std::norm(psi(level * h.n_c + c, col));
  return p;
}

nlohmann::json base_metadata(const ExperimentConfig& cfg, const std::string& experiment) {
  nlohmann::json m;
  m["experiment"] = experiment;
  m["tool_version"] = CQEDSIM_VERSION;
  m["config"] = nlohmann::json::parse(serialize_config(cfg));
  m["units"] = {{"frequency", "MHz"}, {"time", "us"}};
  m["frame_note"] = "populations are reported in the displaced frame";
  return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void finish(SweepResult& r, std::chrono::steady_clock::time_point t0) {
  r.metadata["runtime_s"] = seconds_since(t0);
  std::size_t failed = 0;
  for (const auto& e : r.errors)
    if (!e.empty()) ++failed;
  r.metadata["failed_cells"] = failed;
}

void append_error(std::string& slot, const std::string& code) {
  if (slot.find(code) != std::string::npos) return;
  if (!slot.empty()) slot += ';';
  slot += code;
}

// Row progress for a grid whose cells are processed in arbitrary order.
class RowCounter {
public:
  RowCounter(std::size_t rows, std::size_t per_row, const Progress& progress)
      : per_row_(per_row), rows_(rows), done_(rows, 0), progress_(progress) {}

  void cell_done(std::size_t row) {
    if (!progress_) return;
    std::lock_guard<std::mutex> lock(mu_);
    if (++done_[row] == per_row_) progress_(++rows_done_, rows_);
  }

private:
  std::size_t per_row_, rows_, rows_done_ = 0;
  std::vector<std::size_t> done_;
  Progress progress_;
  std::mutex mu_;
};


// Propagates `psi` over `grid` (from t = 0) with the configured propagator;
// returns accepted integrator steps (0 for the exact path).
long evolve(const HamiltonianSpec& spec, const HilbertSpec& h, const SolverSettings& solver, Eigen::MatrixXcd& psi,
            const std::vector<double>& grid, const BlockObserver& observe = {}) {
  if (solver.propagator == "auto") {
    try {
      propagate_static(spec, h, psi, grid, observe);
      return 0;
    } catch (const FrameError&) {
      // more than one tone on a mode: integrate H(t)
    }
  }
  const CompiledHamiltonian H(spec, h);
  return evolve_block(H, psi, grid, step_control(solver), observe).accepted;
}

} // namespace

std::size_t SweepResult::cell_count() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return axes.empty() ? 0 : n;
}

std::vector<double> SweepResult::coordinates(std::size_t cell) const {
  std::vector<double> out(axes.size());
  for (std::size_t k = axes.size(); k-- > 0;) {
    const auto n = axes[k].values.size();
    out[k] = axes[k].values[cell % n];
    cell /= n;
  }
  return out;
}

int SweepResult::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

double SweepResult::at(std::size_t cell, std::string_view name) const {
  const int c = column(name);
  if (c < 0) throw ValidationError("column", "no column named '" + std::string(name) + "'");
  return values.at(cell).at(static_cast<std::size_t>(c));
}

int worker_count() {
  if (const char* env = std::getenv("CQEDSIM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(std::min(n, 256L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < std::min(threads, n); ++k) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string error_code(const std::exception& e) {
  if (dynamic_cast<const DegenerateDrive*>(&e)) return "degenerate_drive";
  if (dynamic_cast<const FrameError*>(&e)) return "frame_error";
  if (dynamic_cast<const StepSizeUnderflow*>(&e)) return "step_size_underflow";
  if (dynamic_cast<const ToleranceError*>(&e)) return "tolerance_error";
  if (dynamic_cast<const NotHermitian*>(&e)) return "not_hermitian";
  if (dynamic_cast<const DimensionError*>(&e)) return "dimension_error";
  if (dynamic_cast<const PhaseUnwrapError*>(&e)) return "phase_unwrap";
  if (dynamic_cast<const LowOverlap*>(&e)) return "low_overlap";
  if (dynamic_cast<const CalibrationError*>(&e)) return "calibration_error";
  if (dynamic_cast<const InputError*>(&e)) return "invalid_input";
  return "numeric_error";
}

std::vector<Model> selected_models(const ExperimentConfig& cfg) {
  std::vector<Model> out;
  for (const auto& name : cfg.experiment.models) out.push_back(parse_model(name));
  if (out.empty()) throw ValidationError("experiment.models", "no models selected");
  return out;
}

RawDriveTone tone_or(const ExperimentConfig& cfg, Mode m, double epsilon, double detuning) {
  if (auto t = cfg.first_tone(m)) return *t;
  return {m, epsilon, detuning, 0.0};
}

SweepResult run_stark_amplitude_sweep(const ExperimentConfig& cfg, Mode target, const Progress& progress) {
  const auto t0 = std::chrono::steady_clock::now();
  const SystemParams params = cfg.params();
  validate_hilbert(cfg.hilbert);
  const auto models = selected_models(cfg);
  const std::vector<double> default_eps = linspace(0.0, 15.0, 31);
  const auto& eps = axis_or(cfg, "epsilon_MHz", default_eps);

  RawDriveTone swept = tone_or(cfg, target, 0.0, target == Mode::qubit ? -20.0 : 18.5);
  std::vector<RawDriveTone> fixed;
  for (const auto& d : cfg.drives)
    if (d.target != target) fixed.push_back(d);

  SweepResult r;
  r.experiment = target == Mode::qubit ? "stark_amplitude_qubit" : "stark_amplitude_cavity";
  r.axes = {{"epsilon_MHz", eps}};
  for (Model m : models) {
    const std::string s(to_string(m));
    r.columns.push_back("qubit_shift_" + s + "_MHz");
    r.columns.push_back("cavity_shift_" + s + "_MHz");
    r.columns.push_back("tracking_confidence_" + s);
  }
  r.values.assign(eps.size(), std::vector<double>(r.columns.size(), nan));
  r.errors.assign(eps.size(), "");

  StarkOptions opts;
  opts.hilbert = cfg.hilbert;
  opts.early_cutoff = Frequency::from_MHz(cfg.experiment.early_rwa_cutoff_MHz).rad();
  RowCounter rows(eps.size(), 1, progress);
  parallel_for(eps.size(), worker_count(), [&](std::size_t i) {
    std::vector<DriveTone> tones;
    for (const auto& d : fixed) tones.push_back(validate_tone(d, params));
    RawDriveTone t = swept;
    t.epsilon = eps[i];
    for (std::size_t k = 0; k < models.size(); ++k) {
      try {
        auto all = tones;
        all.push_back(validate_tone(t, params));
        const auto s = stark_shift(params, all, models[k], opts);
        r.values[i][3 * k] = s.qubit_MHz;
        r.values[i][3 * k + 1] = s.cavity_MHz;
        r.values[i][3 * k + 2] = s.confidence;
      } catch (const Error& e) {
        append_error(r.errors[i], error_code(e));
      }
    }
    rows.cell_done(i);
  });

  r.metadata = base_metadata(cfg, r.experiment);
  r.metadata["target"] = std::string(to_string(target));
  r.metadata["detuning_MHz"] = swept.detuning;
  finish(r, t0);
  return r;
}

SweepResult run_stark_detuning_sweep(const ExperimentConfig& cfg, const Progress& progress) {
  const auto t0 = std::chrono::steady_clock::now();
  const SystemParams params = cfg.params();
  validate_hilbert(cfg.hilbert);
  const auto models = selected_models(cfg);
  const std::vector<double> default_det = linspace(-400.0, 100.0, 501);
  const auto& det = axis_or(cfg, "detuning_MHz", default_det);
  const RawDriveTone base = tone_or(cfg, Mode::qubit, 7.63, -20.0);
  constexpr double guard_MHz = 2.0;

  SweepResult r;
  r.experiment = "stark_detuning";
  r.axes = {{"detuning_MHz", det}};
  for (Model m : models) {
    const std::string s(to_string(m));
    r.columns.push_back("qubit_shift_" + s + "_MHz");
    r.columns.push_back("tracking_confidence_" + s);
  }
  r.columns.push_back("avoided_crossing");
  r.values.assign(det.size(), std::vector<double>(r.columns.size(), nan));
  r.errors.assign(det.size(), "");

  StarkOptions opts;
  opts.hilbert = cfg.hilbert;
  opts.early_cutoff = Frequency::from_MHz(cfg.experiment.early_rwa_cutoff_MHz).rad();
  std::mutex mu;
  std::vector<std::size_t> done(det.size(), 0);
  std::size_t rows_done = 0;

  // one sequential tracking chain per model
  parallel_for(models.size(), worker_count(), [&](std::size_t k) {
    DressedLevels prev;
    bool have_prev = false;
    for (std::size_t i = 0; i < det.size(); ++i) {
      std::string code;
      try {
        if (std::abs(det[i]) < guard_MHz)
          throw DegenerateDrive("detuning inside the resonance guard band");
        RawDriveTone t = base;
        t.detuning = det[i];
        std::vector<DriveTone> tones{validate_tone(t, params)};
        for (const auto& d : cfg.drives)
          if (d.target == Mode::cavity) tones.push_back(validate_tone(d, params));
        const auto s = stark_shift(params, tones, models[k], opts, have_prev ? &prev : nullptr);
        prev = s.driven;
        have_prev = true;
        r.values[i][2 * k] = s.qubit_MHz;
        r.values[i][2 * k + 1] = s.confidence;
      } catch (const Error& e) {
        code = error_code(e);
        have_prev = false;
      }
      std::lock_guard<std::mutex> lock(mu);
      if (!code.empty()) append_error(r.errors[i], code);
      if (++done[i] == models.size() && progress) progress(++rows_done, det.size());
    }
  });

  const std::size_t flag_col = r.columns.size() - 1;
  for (std::size_t i = 0; i < det.size(); ++i) {
    const double conf = r.values[i][1];
    r.values[i][flag_col] = std::isnan(conf) ? nan : (conf < 0.9 ? 1.0 : 0.0);
  }

  r.metadata = base_metadata(cfg, r.experiment);
  r.metadata["epsilon_q_MHz"] = base.epsilon;
  r.metadata["guard_band_MHz"] = guard_MHz;
  r.metadata["ef_crossing_detuning_MHz"] = -to_raw(params).alpha;
  r.metadata["avoided_crossing_rule"] = "tracking confidence of the first model below 0.9";
  finish(r, t0);
  return r;
}

SweepResult run_tms_chevron(const ExperimentConfig& cfg, const Progress& progress) {
  const auto t0 = std::chrono::steady_clock::now();
  const SystemParams params = cfg.params();
  validate_hilbert(cfg.hilbert);
  const auto models = selected_models(cfg);
  const int n = cfg.experiment.photon_index;
  if (n + 1 >= cfg.hilbert.n_c) throw ValidationError("experiment.photon_index", "photon index exceeds the cavity truncation");
  const std::vector<double> default_q = linspace(0.0, 8.0, 21), default_c = linspace(0.0, 34.0, 21);
  const auto& eq = axis_or(cfg, "epsilon_q_MHz", default_q);
  const auto& ec = axis_or(cfg, "epsilon_c_MHz", default_c);

  const RawDriveTone qtone = tone_or(cfg, Mode::qubit, 0.0, -20.0);
  const double delta = -qtone.detuning;
  const double chi = to_raw(params).chi;
  const double cav_detuning = delta - (n + 1) * chi;
  const double tau = cfg.experiment.gate_time_us;
  const double early_cutoff =
      Frequency::from_MHz(std::max(cfg.experiment.early_rwa_cutoff_MHz, (n + 1) * chi)).rad();

  SweepResult r;
  r.experiment = "tms_chevron";
  r.axes = {{"epsilon_q_MHz", eq}, {"epsilon_c_MHz", ec}};
  for (Model m : models) r.columns.push_back("P_e_" + std::string(to_string(m)));
  const std::size_t cells = eq.size() * ec.size();
  r.values.assign(cells, std::vector<double>(r.columns.size(), nan));
  r.errors.assign(cells, "");

  step_control(cfg.solver);
  const StateVector psi0 = basis_state(cfg.hilbert, {0, n});
  std::atomic<long> steps{0};
  RowCounter rows(eq.size(), ec.size(), progress);
  parallel_for(cells, worker_count(), [&](std::size_t cell) {
    const std::size_t iq = cell / ec.size(), ic = cell % ec.size();
    for (std::size_t k = 0; k < models.size(); ++k) {
      try {
        RawDriveTone q = qtone, c{Mode::cavity, ec[ic], cav_detuning, 0.0};
        q.epsilon = eq[iq];
        const std::vector<DriveTone> tones{validate_tone(q, params), validate_tone(c, params)};
        const auto spec = build_model(models[k], params, tones, early_cutoff);
        Eigen::MatrixXcd psi = psi0;
        steps += evolve(spec, cfg.hilbert, cfg.solver, psi, {0.0, tau});
        r.values[cell][k] = qubit_population(cfg.hilbert, psi, 1);
      } catch (const Error& e) {
        append_error(r.errors[cell], error_code(e));
      }
    }
    rows.cell_done(iq);
  });

  r.metadata = base_metadata(cfg, r.experiment);
  r.metadata["photon_index"] = n;
  r.metadata["delta_MHz"] = delta;
  r.metadata["qubit_detuning_MHz"] = qtone.detuning;
  r.metadata["cavity_detuning_MHz"] = cav_detuning;
  r.metadata["gate_time_us"] = tau;
  r.metadata["early_rwa_cutoff_MHz"] = Frequency::from_rad(early_cutoff).MHz();
  r.metadata["initial_state"] = BasisLabel{0, n}.str();
  r.metadata["accepted_steps"] = steps.load();
  r.metadata["propagator"] = cfg.solver.propagator;
  finish(r, t0);
  return r;
}

namespace {

struct BeamsplitSetup {
  SystemParams params;
  RawDriveTone qubit, cavity;  // cavity detuning before the offset
  Model model = Model::late;
  double early_cutoff = 0.0;
  HilbertSpec hilbert;
  SolverSettings solver;
};

BeamsplitSetup beamsplit_setup(const ExperimentConfig& cfg) {
  BeamsplitSetup s;
  s.params = cfg.params();
  validate_hilbert(cfg.hilbert);
  s.qubit = tone_or(cfg, Mode::qubit, 20.0, -50.0);
  s.cavity = tone_or(cfg, Mode::cavity, 20.0, s.qubit.detuning);
  s.model = selected_models(cfg).front();
  s.early_cutoff = Frequency::from_MHz(cfg.experiment.early_rwa_cutoff_MHz).rad();
  s.hilbert = cfg.hilbert;
  s.solver = cfg.solver;
  step_control(s.solver);
  return s;
}

// P_e on `grid` (starting at 0) for one cavity offset, in MHz.
std::vector<double> beamsplit_trace(const BeamsplitSetup& s, Model model, double offset_MHz,
                                    const std::vector<double>& grid, long* steps = nullptr) {
  RawDriveTone c = s.cavity;
  c.detuning += offset_MHz;
  const std::vector<DriveTone> tones{validate_tone(s.qubit, s.params), validate_tone(c, s.params)};
  const auto spec = build_model(model, s.params, tones, s.early_cutoff);
  Eigen::MatrixXcd psi = basis_state(s.hilbert, {0, 1});
  std::vector<double> out(grid.size(), 0.0);
  const long accepted = evolve(spec, s.hilbert, s.solver, psi, grid, [&](std::size_t i, double, const Eigen::MatrixXcd& y) {
    out[i] = qubit_population(s.hilbert, y, 1);
  });
  if (steps) *steps += accepted;
  return out;
}

std::vector<double> calibration_grid(double window) {
  const int n = std::max(2, static_cast<int>(std::ceil(window / 0.05)) + 1);
  return linspace(0.0, window, n);
}


// Cavity offset (MHz) where the static drive-frame eigenvectors mix g1 and e0 most.
double static_resonance_offset(const BeamsplitSetup& s) {
  const int ig1 = basis_index(s.hilbert, {0, 1}), ie0 = basis_index(s.hilbert, {1, 0});
  double best = -1.0, best_x = 0.0;
  for (double x : linspace(-10.0, 10.0, 401)) {
    RawDriveTone c = s.cavity;
    c.detuning += x;
    const std::vector<DriveTone> tones{validate_tone(s.qubit, s.params), validate_tone(c, s.params)};
    const auto [dq, dc] = tone_detunings(tones);
    const auto spec = to_drive_frame(build_model(s.model, s.params, tones, s.early_cutoff), dq, dc, true);
    const auto eig = eig_herm(evaluate(spec, s.hilbert, 0.0));
    for (int k = 0; k < eig.eigenvectors.cols(); ++k) {
      const double mix = std::min(std::norm(eig.eigenvectors(ig1, k)), std::norm(eig.eigenvectors(ie0, k)));
      if (mix > best) {
        best = mix;
        best_x = x;
      }
    }
  }
  return best_x;
}

} // namespace

CalibrationResult calibrate_nu_corr(const ExperimentConfig& cfg, double window_us) {
  const BeamsplitSetup s = beamsplit_setup(cfg);
  if (s.qubit.epsilon * s.cavity.epsilon == 0.0)
    throw CalibrationError("beam-splitting calibration needs nonzero qubit and cavity drive amplitudes");
  if (window_us <= 0.0) {
    const SweepAxis* tau = cfg.axis("tau_us");
    window_us = tau ? tau->values.back() : 20.0;
  }
  if (!(window_us > 0.0)) throw ValidationError("tau_us", "calibration window must be > 0");
  const auto grid = calibration_grid(window_us);

  CalibrationResult out;
  auto metric = [&](double offset) {
    ++out.evaluations;
    const auto trace = beamsplit_trace(s, s.model, offset, grid);
    return *std::max_element(trace.begin(), trace.end());
  };
  auto zoom = [&](double center, double step, int half_points) {
    std::pair<double, double> best{center, -1.0};
    for (int i = -half_points; i <= half_points; ++i) {
      const double x = center + i * step, y = metric(x);
      if (y > best.second) best = {x, y};
    }
    return best;
  };

  // The resonance is narrower than any affordable time-domain grid, so the
  // scan starts from the static drive-frame spectrum where |g1> and |e0>
  // hybridize most strongly.
  double seed = 0.0, step = 0.1;
  int half_points = 5;
  try {
    seed = static_resonance_offset(s);
  } catch (const FrameError&) {
    step = 0.25;
    half_points = 40;
  }
  auto [x0, y0] = zoom(seed, step, half_points);
  step /= 5.0;
  auto [best_x, best] = zoom(x0, step, 5);
  if (y0 > best) std::tie(best_x, best) = std::pair{x0, y0};

  // parabola through the best point and its neighbours
  const double ym = metric(best_x - step), yp = metric(best_x + step);
  const double denom = ym - 2.0 * best + yp;
  double x = best_x;
  if (denom < 0.0) x = best_x + 0.5 * step * (ym - yp) / denom;
  if (std::abs(x - best_x) > step) x = best_x;
  out.nu_corr_MHz = x;
  out.peak_transfer = std::max(best, metric(x));
  if (!(out.peak_transfer > 0.0)) throw CalibrationError("no transfer signal found in the scan window");
  return out;
}

SweepResult run_beamsplit_map(const ExperimentConfig& cfg, const Progress& progress) {
  const auto t0 = std::chrono::steady_clock::now();
  const BeamsplitSetup s = beamsplit_setup(cfg);
  const auto models = selected_models(cfg);
  const std::vector<double> default_tau = linspace(0.0, 20.0, 81), default_dw = linspace(-1.0, 1.0, 41);
  const auto& tau = axis_or(cfg, "tau_us", default_tau);
  const auto& dw = axis_or(cfg, "delta_omega_MHz", default_dw);
  if (tau.front() < 0.0 || !(tau.back() > tau.front()) ) throw ValidationError("tau_us", "times must be >= 0 and increasing");

  double nu = 0.0;
  nlohmann::json calib;
  if (cfg.experiment.nu_corr_MHz) {
    nu = *cfg.experiment.nu_corr_MHz;
    calib = {{"source", "config"}};
  } else {
    const auto c = calibrate_nu_corr(cfg, tau.back());
    nu = c.nu_corr_MHz;
    calib = {{"source", "calibrated"}, {"peak_transfer", c.peak_transfer}, {"evaluations", c.evaluations}};
  }

  std::vector<double> grid = tau;
  const bool prepend = grid.front() > 0.0;
  if (prepend) grid.insert(grid.begin(), 0.0);

  SweepResult r;
  r.experiment = "beamsplit";
  r.axes = {{"tau_us", tau}, {"delta_omega_MHz", dw}};
  for (Model m : models) r.columns.push_back("P_e_" + std::string(to_string(m)));
  const std::size_t cells = tau.size() * dw.size();
  r.values.assign(cells, std::vector<double>(r.columns.size(), nan));
  r.errors.assign(cells, "");

  std::atomic<long> steps{0};
  std::mutex mu;
  std::size_t cols_done = 0;
  parallel_for(dw.size(), worker_count(), [&](std::size_t j) {
    for (std::size_t k = 0; k < models.size(); ++k) {
      try {
        long local = 0;
        const auto trace = beamsplit_trace(s, models[k], nu + dw[j], grid, &local);
        steps += local;
        for (std::size_t i = 0; i < tau.size(); ++i) r.values[i * dw.size() + j][k] = trace[i + (prepend ? 1 : 0)];
      } catch (const Error& e) {
        for (std::size_t i = 0; i < tau.size(); ++i) append_error(r.errors[i * dw.size() + j], error_code(e));
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    if (progress) progress(++cols_done, dw.size());
  });

  r.metadata = base_metadata(cfg, r.experiment);
  r.metadata["nu_corr_MHz"] = nu;
  r.metadata["nu_corr_reference_MHz"] = reference_nu_corr_MHz;
  r.metadata["calibration"] = calib;
  r.metadata["qubit_detuning_MHz"] = s.qubit.detuning;
  r.metadata["cavity_detuning_MHz"] = s.cavity.detuning;
  r.metadata["initial_state"] = "g1";
  r.metadata["propagator"] = cfg.solver.propagator;
  r.metadata["accepted_steps"] = steps.load();
  finish(r, t0);
  return r;
}

double OracleComparison::relative_gap() const { return std::abs(late_MHz - oracle_MHz) / std::abs(oracle_MHz); }

OracleComparison compare_with_oracle(const ExperimentConfig& cfg, double epsilon_q_MHz, double detuning_q_MHz,
                                     double duration_us) {
  const auto t0 = std::chrono::steady_clock::now();
  const SystemParams params = cfg.params();
  validate_hilbert(cfg.hilbert);
  const std::vector<DriveTone> tones{validate_tone({Mode::qubit, epsilon_q_MHz, detuning_q_MHz, 0.0}, params)};

  OracleComparison out;
  out.epsilon_q_MHz = epsilon_q_MHz;
  out.detuning_q_MHz = detuning_q_MHz;
  StarkOptions so;
  so.hilbert = cfg.hilbert;
  so.early_cutoff = Frequency::from_MHz(cfg.experiment.early_rwa_cutoff_MHz).rad();
  out.late_MHz = stark_shift(params, tones, Model::late, so).qubit_MHz;
  out.late_no_h2_MHz = stark_shift(params, tones, Model::late_no_h2, so).qubit_MHz;
  out.early_MHz = stark_shift(params, tones, Model::early, so).qubit_MHz;

  PhaseSlopeOptions po;
  po.duration = duration_us;
  po.solver = cfg.solver;
  const BasisLabel e0{1, 0}, g0{0, 0};
  std::array<PhaseSlopeResult, 2> runs;
  parallel_for(2, worker_count(), [&](std::size_t k) {
    const auto spec = build_oracle(params, k == 0 ? tones : std::vector<DriveTone>{});
    runs[k] = phase_slope_frequency(spec, cfg.hilbert, e0, g0, po);
  });
  out.oracle_driven_MHz = runs[0].frequency_MHz;
  out.oracle_undriven_MHz = runs[1].frequency_MHz;
  out.oracle_MHz = out.oracle_driven_MHz - out.oracle_undriven_MHz;
  out.fit_residual = std::max(runs[0].fit_residual, runs[1].fit_residual);
  out.oracle_steps = runs[0].stats.accepted + runs[1].stats.accepted;
  out.runtime_s = seconds_since(t0);
  return out;
}

} // namespace cqed
