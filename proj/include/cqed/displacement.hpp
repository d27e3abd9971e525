#pragma once

#include <vector>

#include "cqed/fockspace.hpp"
#include "cqed/model.hpp"

namespace cqed {

enum class XiFamily { co, counter };

/// One tone's contribution amplitude * exp(i * rotation * t). For the counter
/// family the fast exp(2i omega t) factor is not included.
struct XiComponent {
  cplx amplitude;
  double rotation = 0.0;  // rad/us
  XiFamily family = XiFamily::co;
  Mode target = Mode::qubit;
};

struct XiPair {
  XiComponent co;
  XiComponent counter;
};

/// co = eps e^{-i theta} / (-2 Delta - i kappa), counter = eps e^{i theta} / (4 omega + 2 Delta - i kappa).
/// Throws DegenerateDrive when the co denominator is below 1e-6 * eps.
XiPair xi_components(const DriveTone& tone, Frequency mode_freq, Frequency kappa);

/// All components in tone order, split per mode and family.
struct XiSet {
  std::vector<XiComponent> q_co, q_counter, c_co, c_counter;

  const std::vector<XiComponent>& get(Mode m, XiFamily f) const;
  std::vector<XiComponent>& get(Mode m, XiFamily f);
};

XiSet build_xi_set(const SystemParams& params, const std::vector<DriveTone>& tones);

/// Sum over tones of amplitude * exp(i rotation t).
cplx xi_value(const XiSet& set, Mode m, XiFamily f, double t);

/// Largest magnitude (over both modes) of twice the linear b+/a+ coefficient
/// left after the displacement:
///   i dxi/dt + i kappa xi / 2 + sum_n (eps_n / 2)(e^{-i Delta_n t - i theta_n} + e^{i (2 omega + Delta_n) t + i theta_n})
/// with xi = xi_1 + xi_2 e^{2 i omega t}. Zero (to rounding) for the amplitudes from build_xi_set.
double drive_cancellation_residual(const XiSet& set, const std::vector<DriveTone>& tones,
                                   const SystemParams& params, double t);

} // namespace cqed
