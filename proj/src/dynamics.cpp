#include "cqed/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Sparse>

#include "cqed/displacement.hpp"
#include "cqed/errors.hpp"
#include "cqed/spectra.hpp"

namespace cqed {

namespace {

constexpr cplx minus_i{0.0, -1.0};

std::vector<double> uniform_grid(double duration, double dt) {
  const auto n = static_cast<int>(std::ceil(duration / dt - 1e-9));
  return linspace(0.0, duration, std::max(n, 1) + 1);
}

} // namespace

StepControl step_control(const SolverSettings& s) {
  StepControl c;
  c.rtol = s.rtol;
  c.atol = s.atol;
  c.max_step = s.max_step_ns * 1e-3;
  check_step_control(c);
  return c;
}

SolverStats evolve_block(const CompiledHamiltonian& H, Eigen::MatrixXcd& states, const std::vector<double>& t_grid,
                         const StepControl& ctl, const BlockObserver& observe) {
  if (states.rows() != H.dim()) throw DimensionError("state dimension does not match the Hamiltonian");
  auto rhs = [&](double t, const Eigen::MatrixXcd& y, Eigen::MatrixXcd& dy) {
    H.apply(t, y, dy);
    dy *= minus_i;
  };
  auto obs = [&](std::size_t i, double t, const Eigen::MatrixXcd& y) {
    if (observe) observe(i, t, y);
  };
  return integrate_dopri5(rhs, states, t_grid, ctl, obs);
}

void propagate_static(const HamiltonianSpec& spec, const HilbertSpec& h, Eigen::MatrixXcd& states,
                      const std::vector<double>& t_grid, const BlockObserver& observe) {
  if (states.rows() != h.dim()) throw DimensionError("state dimension does not match the Hamiltonian");
  if (t_grid.empty()) return;
  if (t_grid.front() != 0.0) throw ValidationError("t_grid", "static propagation starts at t = 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw ToleranceError("output times must be strictly increasing");
  const auto [dq, dc] = tone_detunings(spec.tones);
  const auto frame = spec.frame == Frame::drive ? spec : to_drive_frame(spec, dq, dc, true);
  const auto eig = eig_herm(evaluate(frame, h, 0.0));
  const Eigen::MatrixXcd c0 = eig.eigenvectors.adjoint() * states;
  Eigen::MatrixXcd c(c0.rows(), c0.cols());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double dt = t_grid[i];
    if (dt == 0.0) {
      // keep the input bit-exact rather than round-tripping through the eigenbasis
      if (observe) observe(i, 0.0, states);
      continue;
    }
    for (Eigen::Index k = 0; k < c0.rows(); ++k) c.row(k) = std::polar(1.0, -eig.eigenvalues(k) * dt) * c0.row(k);
    states.noalias() = eig.eigenvectors * c;
    if (observe) observe(i, t_grid[i], states);
  }
}

Trajectory propagate_schrodinger(const HamiltonianSpec& spec, const HilbertSpec& h, const StateVector& psi0,
                                 const std::vector<double>& t_grid, const SolverSettings& solver) {
  if (psi0.size() != h.dim()) throw DimensionError("initial state dimension does not match");
  if (std::abs(psi0.norm() - 1.0) > 1e-8) throw ValidationError("initial_state", "state is not normalized");
  const CompiledHamiltonian H(spec, h);
  Trajectory out;
  Eigen::MatrixXcd y = psi0;
  out.stats = evolve_block(H, y, t_grid, step_control(solver), [&](std::size_t, double t, const Eigen::MatrixXcd& s) {
    out.times.push_back(t);
    out.states.push_back(s.col(0));
    out.norm_drift = std::max(out.norm_drift, std::abs(s.col(0).norm() - 1.0));
  });
  return out;
}

DecayRates decay_rates(const SystemParams& p) { return {p.kappa_q.rad(), p.kappa_c.rad(), p.kappa_d.rad()}; }

DensityTrajectory propagate_lindblad(const HamiltonianSpec& spec, const HilbertSpec& h, const DensityMatrix& rho0,
                                     const std::vector<double>& t_grid, const SolverSettings& solver,
                                     const DecayRates& rates) {
  if (rates.kappa_q < 0.0 || rates.kappa_c < 0.0 || rates.kappa_d < 0.0)
    throw ValidationError("kappa", "rates must be >= 0");
  if (rho0.rows() != h.dim() || rho0.cols() != h.dim()) throw DimensionError("density matrix dimension does not match");
  if (hermiticity_defect(rho0) > 1e-10) throw ValidationError("initial_state", "density matrix is not Hermitian");
  if (std::abs(rho0.trace() - 1.0) > 1e-8) throw ValidationError("initial_state", "density matrix trace is not 1");

  const CompiledHamiltonian H(spec, h);
  const ModeOps ops = build_mode_ops(h);
  using Sparse = Eigen::SparseMatrix<cplx>;
  const Sparse a = ops.a.sparseView(), b = ops.b.sparseView(), b_dag = ops.b_dag.sparseView();
  const Sparse n_q = ops.n_q.sparseView(), n_c = ops.n_c.sparseView();
  Sparse eye(h.dim(), h.dim());
  eye.setIdentity();

  // co-rotating qubit displacement; in the drive frame its rotation is removed
  XiSet xi = build_xi_set(spec.params, spec.tones);
  if (spec.frame == Frame::drive) {
    const double dq = tone_detunings(spec.tones).first.rad();
    for (auto& c : xi.q_co) c.rotation += dq;
  }

  // rho stays Hermitian, so rho X = (X rho)^dagger for Hermitian X and every
  // product below is sparse * dense
  Operator hr, lr, llr;
  auto dissipate = [&](const Sparse& op, const Sparse& opdop, double kappa, const Operator& rho, Operator& out) {
    if (kappa == 0.0) return;
    lr.noalias() = op * rho;
    llr.noalias() = op * lr.adjoint();
    out.noalias() += kappa * llr.adjoint();
    lr.noalias() = opdop * rho;
    out.noalias() -= 0.5 * kappa * lr;
    out.noalias() -= 0.5 * kappa * lr.adjoint();
  };

  auto rhs = [&](double t, const Operator& rho, Operator& drho) {
    H.apply(t, rho, hr);
    drho.noalias() = minus_i * hr;
    drho.noalias() -= minus_i * hr.adjoint();
    dissipate(a, n_c, rates.kappa_c, rho, drho);
    dissipate(b, n_q, rates.kappa_q, rho, drho);
    if (rates.kappa_d != 0.0) {
      const cplx x = xi_value(xi, Mode::qubit, XiFamily::co, t);
      const Sparse L = n_q - x * b_dag - std::conj(x) * b + std::norm(x) * eye;
      const Sparse LdL = L.adjoint() * L;
      dissipate(L, LdL, rates.kappa_d, rho, drho);
    }
  };

  DensityTrajectory out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  const cplx tr0 = rho0.trace();
  Operator rho = rho0;
  auto observe = [&](std::size_t, double t, const Operator& r) {
    out.times.push_back(t);
    out.states.push_back(r);
    out.trace_drift = std::max(out.trace_drift, std::abs(r.trace() - tr0));
    Eigen::SelfAdjointEigenSolver<Operator> es(r, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = std::min(out.min_eigenvalue, es.eigenvalues().minCoeff());
  };
  auto symmetrize = [](Operator& r) {
    r = (0.5 * (r + r.adjoint())).eval();
    return false;
  };
  out.stats = integrate_dopri5(rhs, rho, t_grid, step_control(solver), observe, symmetrize);
  out.positivity_warning = out.min_eigenvalue < -1e-6;
  return out;
}

PhaseSlopeResult phase_slope_frequency(const HamiltonianSpec& spec, const HilbertSpec& h, BasisLabel a,
                                       BasisLabel b, const PhaseSlopeOptions& opts) {
  if (!(opts.duration > 0.0) || !(opts.sample_dt > 0.0) || !(opts.dt_max > 0.0))
    throw ValidationError("phase_slope", "duration, sample spacing and dt_max must be > 0");
  if (!(opts.fit_fraction > 0.0 && opts.fit_fraction <= 1.0))
    throw ValidationError("phase_slope", "fit fraction must be in (0, 1]");

  const CompiledHamiltonian H(spec, h);
  StepControl ctl = step_control(opts.solver);
  ctl.max_step = opts.dt_max;
  if (const double w = H.max_rotation(); w > 0.0) ctl.max_step = std::min(ctl.max_step, two_pi / w / 20.0);

  const int ia = basis_index(h, a), ib = basis_index(h, b);
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(h.dim(), 2);
  psi(ia, 0) = 1.0;
  psi(ib, 1) = 1.0;

  const auto grid = uniform_grid(opts.duration, opts.sample_dt);
  std::vector<double> phase_a(grid.size()), phase_b(grid.size());
  double prev_a = 0.0, prev_b = 0.0;
  auto unwrap = [](double raw, double prev, const char* which) {
    double d = std::remainder(raw - prev, two_pi);
    if (std::abs(d) > std::numbers::pi / 2)
      throw PhaseUnwrapError(std::string("phase of ") + which + " jumped by more than pi/2 between samples");
    return prev + d;
  };

  PhaseSlopeResult out;
  out.stats = evolve_block(H, psi, grid, ctl, [&](std::size_t i, double, const Eigen::MatrixXcd& s) {
    const cplx amp_a = s(ia, 0), amp_b = s(ib, 1);
    if (std::abs(amp_a) < 0.1 || std::abs(amp_b) < 0.1)
      throw LowOverlap("bare-state overlap fell below 0.1 during phase tracking");
    phase_a[i] = i == 0 ? std::arg(amp_a) : unwrap(std::arg(amp_a), prev_a, "a");
    phase_b[i] = i == 0 ? std::arg(amp_b) : unwrap(std::arg(amp_b), prev_b, "b");
    prev_a = phase_a[i];
    prev_b = phase_b[i];
  });

  // least-squares slope of (phase_a - phase_b) over the fit window
  const std::size_t n = grid.size();
  const auto first = static_cast<std::size_t>(std::floor((1.0 - opts.fit_fraction) * static_cast<double>(n - 1)));
  const std::size_t m = n - first;
  if (m < 3) throw ValidationError("phase_slope", "fit window holds fewer than 3 samples");
  double st = 0.0, sp = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    st += grid[i];
    sp += phase_a[i] - phase_b[i];
  }
  const double mt = st / static_cast<double>(m), mp = sp / static_cast<double>(m);
  double stt = 0.0, stp = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    stt += (grid[i] - mt) * (grid[i] - mt);
    stp += (grid[i] - mt) * (phase_a[i] - phase_b[i] - mp);
  }
  const double slope = stp / stt;
  double ss = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    const double r = phase_a[i] - phase_b[i] - mp - slope * (grid[i] - mt);
    ss += r * r;
  }
  out.fit_residual = std::sqrt(ss / static_cast<double>(m));
  // phase = -E t
  out.frequency_MHz = -slope / two_pi;
  return out;
}

} // namespace cqed
