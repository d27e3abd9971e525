#pragma once

#include <functional>
#include <vector>

#include "cqed/fockspace.hpp"
#include "cqed/hamiltonian.hpp"
#include "cqed/integrator.hpp"
#include "cqed/model.hpp"

namespace cqed {

/// Solver settings (max step given in ns) as integrator controls (us).
StepControl step_control(const SolverSettings& s);

struct Trajectory {
  std::vector<double> times;         // us
  std::vector<StateVector> states;
  SolverStats stats;
  double norm_drift = 0.0;           // max | ||psi(t)|| - 1 |
};

/// Called at every output time with the column block of propagated states.
using BlockObserver = std::function<void(std::size_t, double, const Eigen::MatrixXcd&)>;

/// Propagates the columns of `states` under -i H(t) in place.
SolverStats evolve_block(const CompiledHamiltonian& H, Eigen::MatrixXcd& states, const std::vector<double>& t_grid,
                         const StepControl& ctl, const BlockObserver& observe = {});

/// Exact propagation through the eigenbasis of the drive-frame Hamiltonian.
/// Populations equal those of the mode frame; phases do not. Throws FrameError
/// when the drive frame of `spec` is not static.
void propagate_static(const HamiltonianSpec& spec, const HilbertSpec& h, Eigen::MatrixXcd& states,
                      const std::vector<double>& t_grid, const BlockObserver& observe = {});

Trajectory propagate_schrodinger(const HamiltonianSpec& spec, const HilbertSpec& h, const StateVector& psi0,
                                 const std::vector<double>& t_grid, const SolverSettings& solver = {});

/// Amplitude decay and dephasing rates, rad/us.
struct DecayRates {
  double kappa_q = 0.0;
  double kappa_c = 0.0;
  double kappa_d = 0.0;
};

DecayRates decay_rates(const SystemParams& p);

struct DensityTrajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  SolverStats stats;
  double trace_drift = 0.0;        // max |Tr rho(t) - Tr rho(0)|
  double min_eigenvalue = 0.0;     // over all samples
  bool positivity_warning = false; // min_eigenvalue < -1e-6
};

/// d rho/dt = -i[H, rho] + kappa_c D[a] + kappa_q D[b] + kappa_d D[(b+ - xi_q*)(b - xi_q)],
/// with xi_q(t) the co-rotating qubit displacement of spec.tones in spec's frame.
DensityTrajectory propagate_lindblad(const HamiltonianSpec& spec, const HilbertSpec& h, const DensityMatrix& rho0,
                                     const std::vector<double>& t_grid, const SolverSettings& solver,
                                     const DecayRates& rates);

struct PhaseSlopeOptions {
  double duration = 2.0;     // us
  double dt_max = 5e-6;      // us; further capped at 1/20 of the fastest rotation period
  double sample_dt = 1e-3;   // us between phase samples
  double fit_fraction = 0.8; // fit over the final part of the window
  SolverSettings solver;
};

struct PhaseSlopeResult {
  double frequency_MHz = 0.0;  // E_a - E_b
  double fit_residual = 0.0;   // rms phase residual, rad
  SolverStats stats;
};

/// Propagates the bare states a and b, unwraps arg<label|psi(t)> and returns the
/// difference of the fitted phase slopes as an energy difference (E_a - E_b) / 2 pi.
PhaseSlopeResult phase_slope_frequency(const HamiltonianSpec& spec, const HilbertSpec& h, BasisLabel a,
                                       BasisLabel b, const PhaseSlopeOptions& opts = {});

} // namespace cqed
