#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "cqed/errors.hpp"

namespace cqed {

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = 5e-3;   // us
  double min_step = 1e-13;  // us
  long max_steps = 200'000'000;
};

struct SolverStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

/// Rejects tolerances outside [1e-12, 1e-6] (relative) and non-positive steps.
inline void check_step_control(const StepControl& c) {
  if (!(c.rtol >= 1e-12 && c.rtol <= 1e-6)) throw ToleranceError("rtol must lie in [1e-12, 1e-6]");
  if (!(c.atol > 0.0)) throw ToleranceError("atol must be > 0");
  if (!(c.max_step > 0.0)) throw ToleranceError("max step must be > 0");
}

namespace detail {

template <class State>
double error_norm(const State& err, const State& y0, const State& y1, const StepControl& c) {
  double sum = 0.0;
  const auto n = err.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double scale = c.atol + c.rtol * std::max(std::abs(y0.data()[i]), std::abs(y1.data()[i]));
    const double r = std::abs(err.data()[i]) / scale;
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(n));
}

} // namespace detail

/// Dormand-Prince 5(4) with PI step-size control (Hairer's coefficients).
/// `rhs(t, y, dydt)` fills dydt. Integrates y from grid.front() through every
/// grid point, hitting each exactly; `observe(i, t, y)` is called at grid point i
/// (including the start). `after_accept(y)` may project y after every accepted step.
template <class State, class Rhs, class Observe, class AfterAccept>
SolverStats integrate_dopri5(Rhs&& rhs, State& y, const std::vector<double>& grid, const StepControl& ctl,
                             Observe&& observe, AfterAccept&& after_accept) {
  check_step_control(ctl);
  SolverStats stats;
  if (grid.empty()) return stats;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ToleranceError("output times must be strictly increasing");

  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                   a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  double t = grid.front();
  observe(std::size_t{0}, t, static_cast<const State&>(y));
  if (grid.size() == 1) return stats;

  State k1, k2, k3, k4, k5, k6, k7, tmp, y_new, err;
  rhs(t, y, k1);
  ++stats.evaluations;

  // initial step guess from the scaled derivative size
  double h;
  {
    const double d0 = detail::error_norm(y, y, y, ctl);
    const double d1 = detail::error_norm(k1, y, y, ctl);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min({h, ctl.max_step, grid.back() - t});
  }

  double err_prev = 1e-4;
  bool last_rejected = false;
  std::size_t next = 1;
  while (next < grid.size()) {
    if (stats.accepted + stats.rejected >= ctl.max_steps)
      throw StepSizeUnderflow(t, "step budget exhausted");
    const double target = grid[next];
    bool hits = false;
    double step = std::min(h, ctl.max_step);
    if (t + step >= target - 1e-12 * std::max(1.0, std::abs(target))) {
      step = target - t;
      hits = true;
    }

    tmp = y + step * a21 * k1;
    rhs(t + c2 * step, tmp, k2);
    tmp = y + step * (a31 * k1 + a32 * k2);
    rhs(t + c3 * step, tmp, k3);
    tmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * step, tmp, k4);
    tmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * step, tmp, k5);
    tmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + step, tmp, k6);
    y_new = y + step * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(t + step, y_new, k7);
    stats.evaluations += 6;
    err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = detail::error_norm(err, y, y_new, ctl);

    if (en <= 1.0 && std::isfinite(en)) {
      ++stats.accepted;
      t = hits ? target : t + step;
      y.swap(y_new);
      k1.swap(k7);
      if (after_accept(y)) {
        rhs(t, y, k1);
        ++stats.evaluations;
      }
      double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.17) * std::pow(err_prev, 0.04);
      fac = std::clamp(fac, 0.2, 10.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      // keep the controller's step when only clipped to hit the grid
      h = hits ? std::max(h, step * fac) : step * fac;
      err_prev = std::max(en, 1e-4);
      last_rejected = false;
      if (hits) {
        observe(next, t, static_cast<const State&>(y));
        ++next;
      }
    } else {
      ++stats.rejected;
      const double fac = std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.1;
      h = step * fac;
      last_rejected = true;
      if (h < ctl.min_step) throw StepSizeUnderflow(t, "step size fell below the minimum");
    }
  }
  return stats;
}

template <class State, class Rhs, class Observe>
SolverStats integrate_dopri5(Rhs&& rhs, State& y, const std::vector<double>& grid, const StepControl& ctl,
                             Observe&& observe) {
  return integrate_dopri5(std::forward<Rhs>(rhs), y, grid, ctl, std::forward<Observe>(observe),
                          [](State&) { return false; });
}

} // namespace cqed
