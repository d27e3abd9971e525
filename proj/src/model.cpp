#include "cqed/model.hpp"

#include <algorithm>
#include <cmath>

#include "cqed/errors.hpp"

namespace cqed {

std::string_view to_string(Mode m) { return m == Mode::qubit ? "qubit" : "cavity"; }

Mode parse_mode(std::string_view text) {
  if (text == "qubit" || text == "q") return Mode::qubit;
  if (text == "cavity" || text == "c") return Mode::cavity;
  throw ValidationError("target", "expected 'qubit' or 'cavity', got '" + std::string(text) + "'");
}

namespace {

void require_finite(const char* field, double v) {
  if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
}

void require_positive(const char* field, double v) {
  require_finite(field, v);
  if (!(v > 0.0)) throw ValidationError(field, "must be > 0");
}

void require_non_negative(const char* field, double v) {
  require_finite(field, v);
  if (v < 0.0) throw ValidationError(field, "must be >= 0");
}

} // namespace

ValidatedParams validate_params(const RawSystemParams& raw) {
  require_positive("omega_q", raw.omega_q);
  require_positive("omega_c", raw.omega_c);
  require_positive("alpha", raw.alpha);
  require_non_negative("kerr_c", raw.kerr_c);
  require_non_negative("chi", raw.chi);
  require_non_negative("kappa_q", raw.kappa_q);
  require_non_negative("kappa_c", raw.kappa_c);
  require_non_negative("kappa_d", raw.kappa_d);

  ValidatedParams out;
  if (raw.chi >= raw.alpha) {
    out.warnings.push_back("chi >= alpha: outside the dispersive regime the quartic expansion is "
                           "not expected to hold");
  }
  auto& p = out.params;
  p.omega_q = Frequency::from_MHz(raw.omega_q);
  p.omega_c = Frequency::from_MHz(raw.omega_c);
  p.alpha = Frequency::from_MHz(raw.alpha);
  p.kerr_c = Frequency::from_MHz(raw.kerr_c);
  p.chi = Frequency::from_MHz(raw.chi);
  p.kappa_q = Frequency::from_MHz(raw.kappa_q);
  p.kappa_c = Frequency::from_MHz(raw.kappa_c);
  p.kappa_d = Frequency::from_MHz(raw.kappa_d);
  return out;
}

RawSystemParams to_raw(const SystemParams& p) {
  return {p.omega_q.MHz(), p.omega_c.MHz(), p.alpha.MHz(), p.kerr_c.MHz(),
          p.chi.MHz(),     p.kappa_q.MHz(), p.kappa_c.MHz(), p.kappa_d.MHz()};
}

RawSystemParams table_s1_params() {
  RawSystemParams p;
  p.omega_q = 5311.0;
  p.omega_c = 3579.0;
  p.chi = 1.923;
  p.kerr_c = 0.0022;
  p.alpha = 229.9;
  return p;
}

DriveTone DriveTone::qubit(double epsilon_MHz, double detuning_MHz, double phase) {
  return {Mode::qubit, Frequency::from_MHz(epsilon_MHz), Frequency::from_MHz(detuning_MHz), phase};
}

DriveTone DriveTone::cavity(double epsilon_MHz, double detuning_MHz, double phase) {
  return {Mode::cavity, Frequency::from_MHz(epsilon_MHz), Frequency::from_MHz(detuning_MHz), phase};
}

DriveTone validate_tone(const RawDriveTone& raw, const SystemParams& params) {
  require_non_negative("epsilon", raw.epsilon);
  require_finite("detuning", raw.detuning);
  require_finite("phase", raw.phase);
  const double limit = std::min(params.omega_q.MHz(), params.omega_c.MHz());
  if (!(std::abs(raw.detuning) < limit))
    throw ValidationError("detuning", "|detuning| must stay below min(omega_q, omega_c)");
  return {raw.target, Frequency::from_MHz(raw.epsilon), Frequency::from_MHz(raw.detuning), raw.phase};
}

void validate_hilbert(const HilbertSpec& h) {
  if (h.n_q < 3) throw ValidationError("n_q", "need at least 3 qubit levels");
  if (h.n_c < 2) throw ValidationError("n_c", "need at least 2 cavity levels");
}

std::vector<double> linspace(double start, double stop, int count) {
  std::vector<double> out;
  if (count <= 0) return out;
  if (count == 1) return {start};
  out.reserve(static_cast<std::size_t>(count));
  const double step = (stop - start) / (count - 1);
  for (int i = 0; i < count; ++i) out.push_back(i == count - 1 ? stop : start + step * i);
  return out;
}

SystemParams ExperimentConfig::params() const { return validate_params(system).params; }

std::vector<DriveTone> ExperimentConfig::tones() const {
  const auto p = params();
  std::vector<DriveTone> out;
  out.reserve(drives.size());
  for (const auto& d : drives) out.push_back(validate_tone(d, p));
  return out;
}

std::optional<RawDriveTone> ExperimentConfig::first_tone(Mode m) const {
  for (const auto& d : drives)
    if (d.target == m) return d;
  return std::nullopt;
}

const SweepAxis* ExperimentConfig::axis(std::string_view name) const {
  for (const auto& a : experiment.axes)
    if (a.name == name) return &a;
  return nullptr;
}

} // namespace cqed
