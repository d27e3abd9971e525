#include "cqed/displacement.hpp"

#include <algorithm>
#include <cmath>

#include "cqed/errors.hpp"

namespace cqed {

namespace {
constexpr cplx I{0.0, 1.0};
}

XiPair xi_components(const DriveTone& tone, Frequency mode_freq, Frequency kappa) {
  const double eps = tone.epsilon.rad();
  const double delta = tone.detuning.rad();
  const double k = kappa.rad();
  XiPair out;
  out.co = {cplx{}, -delta, XiFamily::co, tone.target};
  out.counter = {cplx{}, delta, XiFamily::counter, tone.target};
  if (eps == 0.0) return out;

  const cplx co_den{-2.0 * delta, -k};
  if (std::abs(co_den) < 1e-6 * eps)
    throw DegenerateDrive("drive on the " + std::string(to_string(tone.target)) +
                          " is resonant with no decay; the displacement diverges");
  const cplx counter_den{4.0 * mode_freq.rad() + 2.0 * delta, -k};
  out.co.amplitude = eps * std::polar(1.0, -tone.phase) / co_den;
  out.counter.amplitude = eps * std::polar(1.0, tone.phase) / counter_den;
  return out;
}

const std::vector<XiComponent>& XiSet::get(Mode m, XiFamily f) const {
  if (m == Mode::qubit) return f == XiFamily::co ? q_co : q_counter;
  return f == XiFamily::co ? c_co : c_counter;
}

std::vector<XiComponent>& XiSet::get(Mode m, XiFamily f) {
  return const_cast<std::vector<XiComponent>&>(std::as_const(*this).get(m, f));
}

XiSet build_xi_set(const SystemParams& params, const std::vector<DriveTone>& tones) {
  XiSet set;
  for (const auto& tone : tones) {
    const auto pair = xi_components(tone, params.mode_frequency(tone.target), params.decay_rate(tone.target));
    set.get(tone.target, XiFamily::co).push_back(pair.co);
    set.get(tone.target, XiFamily::counter).push_back(pair.counter);
  }
  return set;
}

cplx xi_value(const XiSet& set, Mode m, XiFamily f, double t) {
  cplx sum{};
  for (const auto& c : set.get(m, f)) sum += c.amplitude * std::polar(1.0, c.rotation * t);
  return sum;
}

double drive_cancellation_residual(const XiSet& set, const std::vector<DriveTone>& tones,
                                   const SystemParams& params, double t) {
  double worst = 0.0;
  for (Mode m : {Mode::qubit, Mode::cavity}) {
    const double omega = params.mode_frequency(m).rad();
    const double kappa = params.decay_rate(m).rad();
    const auto& co = set.get(m, XiFamily::co);
    const auto& counter = set.get(m, XiFamily::counter);

    // Terms are grouped by tone so that each tone's displacement and drive share one phase factor.
    std::size_t n = 0;
    cplx coeff{};
    for (const auto& tone : tones) {
      if (tone.target != m) continue;
      if (n >= co.size() || n >= counter.size())
        throw DimensionError("xi set does not match the tone list");
      const double eps = tone.epsilon.rad();
      const double delta = tone.detuning.rad();

      // xi_1 e^{i r t}: i d/dt -> -r
      const double r1 = co[n].rotation;
      const cplx slow = (-r1 + I * kappa / 2.0) * co[n].amplitude + 0.5 * eps * std::polar(1.0, -tone.phase);
      coeff += slow * std::polar(1.0, -delta * t);

      // xi_2 e^{i (r + 2 omega) t}
      const double r2 = counter[n].rotation + 2.0 * omega;
      const cplx fast = (-r2 + I * kappa / 2.0) * counter[n].amplitude + 0.5 * eps * std::polar(1.0, tone.phase);
      coeff += fast * std::polar(1.0, (2.0 * omega + delta) * t);
      ++n;
    }
    if (n != co.size()) throw DimensionError("xi set does not match the tone list");
    worst = std::max(worst, 2.0 * std::abs(coeff));
  }
  return worst;
}

} // namespace cqed
