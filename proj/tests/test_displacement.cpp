#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cqed/displacement.hpp"
#include "cqed/errors.hpp"
#include "support.hpp"

using namespace cqed;

namespace {

std::vector<DriveTone> validated(const std::vector<RawDriveTone>& raw, const SystemParams& p) {
  std::vector<DriveTone> out;
  for (const auto& r : raw) out.push_back(validate_tone(r, p));
  return out;
}

} // namespace

TEST_CASE("qubit drive amplitudes at the reference point", "[displacement]") {
  const auto p = validate_params(table_s1_params()).params;
  const auto x = xi_components(DriveTone::qubit(7.63, -20.0), p.omega_q, p.kappa_q);
  CHECK(std::abs(x.co.amplitude) == Catch::Approx(0.190750).epsilon(1e-12));
  CHECK(x.co.amplitude.real() == Catch::Approx(7.63 / 40.0));
  CHECK(std::abs(x.counter.amplitude) == Catch::Approx(3.5984e-4).epsilon(1e-4));
  CHECK(x.co.rotation == Catch::Approx(two_pi * 20.0));
  CHECK(x.counter.rotation == Catch::Approx(-two_pi * 20.0));
  CHECK(x.co.family == XiFamily::co);
  CHECK(x.counter.family == XiFamily::counter);
}

TEST_CASE("zero amplitude gives zero displacement", "[displacement]") {
  const auto p = validate_params(table_s1_params()).params;
  const auto x = xi_components(DriveTone::cavity(0.0, GENERATE(-50.0, 3.0, 200.0)), p.omega_c, p.kappa_c);
  CHECK(x.co.amplitude == cplx(0.0));
  CHECK(x.counter.amplitude == cplx(0.0));
}

TEST_CASE("resonant undamped drive is degenerate", "[displacement][errors]") {
  const auto p = validate_params(table_s1_params()).params;
  CHECK_THROWS_AS(xi_components(DriveTone::qubit(5.0, 0.0), p.omega_q, p.kappa_q), DegenerateDrive);
  CHECK_NOTHROW(xi_components(DriveTone::qubit(5.0, 0.0), p.omega_q, Frequency::from_MHz(0.5)));
}

TEST_CASE("phase enters as a pure rotation of the amplitudes", "[displacement]") {
  const auto p = validate_params(table_s1_params()).params;
  const double theta = GENERATE(0.3, 1.7, -2.5);
  const auto a = xi_components(DriveTone::cavity(12.0, -35.0), p.omega_c, p.kappa_c);
  const auto b = xi_components(DriveTone::cavity(12.0, -35.0, theta), p.omega_c, p.kappa_c);
  const cplx i{0.0, 1.0};
  CHECK(std::abs(b.co.amplitude - a.co.amplitude * std::exp(-i * theta)) < 1e-15);
  CHECK(std::abs(b.counter.amplitude - a.counter.amplitude * std::exp(i * theta)) < 1e-15);
}

TEST_CASE("displacement cancels the drive for random tone sets", "[displacement][property]") {
  std::mt19937_64 rng(20240611);
  auto raw = table_s1_params();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    raw.kappa_q = u(rng) < 0.5 ? 0.0 : 2.0 * u(rng);
    raw.kappa_c = u(rng) < 0.5 ? 0.0 : 2.0 * u(rng);
    const auto p = validate_params(raw).params;
    const auto tones = validated(gen::tones(rng), p);
    const auto set = build_xi_set(p, tones);
    const double t = 10.0 * u(rng);
    INFO("trial " << trial << " t " << t);
    double scale = 0.0;
    for (const auto& tn : tones) scale = std::max(scale, tn.epsilon.rad());
    CHECK(drive_cancellation_residual(set, tones, p, t) < 1e-12 * scale);
  }
}

TEST_CASE("residual detects a perturbed amplitude", "[displacement]") {
  const auto p = validate_params(table_s1_params()).params;
  const double det = GENERATE(-20.0, 75.0);
  const std::vector<DriveTone> tones{DriveTone::qubit(7.63, det)};
  auto set = build_xi_set(p, tones);
  set.q_co[0].amplitude += 1e-3;
  const double expect = 2.0 * std::abs(two_pi * det) * 1e-3;
  CHECK(drive_cancellation_residual(set, tones, p, 0.37) == Catch::Approx(expect).epsilon(1e-6));
}

TEST_CASE("xi set matches the closed form", "[displacement][property]") {
  std::mt19937_64 rng(7);
  auto raw = table_s1_params();
  raw.kappa_c = 0.8;
  const auto p = validate_params(raw).params;
  const reference::Device d{raw.omega_q, raw.omega_c, raw.alpha, raw.kerr_c, raw.chi, raw.kappa_q, raw.kappa_c};
  for (int trial = 0; trial < 50; ++trial) {
    const auto raw_tones = gen::tones(rng);
    const auto set = build_xi_set(p, validated(raw_tones, p));
    const auto ref = gen::as_reference(raw_tones);
    const double t = 0.1 * trial;
    for (bool q : {true, false}) {
      const Mode m = q ? Mode::qubit : Mode::cavity;
      const auto [co, counter] = reference::displacement(d, ref, q, t);
      CHECK(std::abs(xi_value(set, m, XiFamily::co, t) - co) < 1e-12 * (1.0 + std::abs(co)));
      CHECK(std::abs(xi_value(set, m, XiFamily::counter, t) - counter) < 1e-12);
    }
  }
}

TEST_CASE("two cavity tones beat at their detuning difference", "[displacement]") {
  const auto p = validate_params(table_s1_params()).params;
  const double chi = 1.923;
  const std::vector<DriveTone> tones{DriveTone::cavity(10.0, -20.0), DriveTone::cavity(10.0, -20.0 + chi)};
  const auto set = build_xi_set(p, tones);
  const double period = 1.0 / chi;
  for (double t : {0.0, 0.13, 0.41}) {
    const double n0 = std::norm(xi_value(set, Mode::cavity, XiFamily::co, t));
    const double n1 = std::norm(xi_value(set, Mode::cavity, XiFamily::co, t + period));
    CHECK(n1 == Catch::Approx(n0).epsilon(1e-9));
  }
  // |xi|^2 swings by 4|xi_1||xi_2| over one period
  double lo = 1e9, hi = 0.0;
  for (int k = 0; k < 400; ++k) {
    const double n = std::norm(xi_value(set, Mode::cavity, XiFamily::co, period * k / 400.0));
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  CHECK(hi - lo == Catch::Approx(4.0 * (10.0 / 40.0) * (10.0 / (2.0 * (20.0 - chi)))).epsilon(1e-4));
  CHECK(xi_value(set, Mode::qubit, XiFamily::co, 0.3) == cplx(0.0));
}

TEST_CASE("small decay rate converges to the undamped amplitude", "[displacement]") {
  const auto p = validate_params(table_s1_params()).params;
  const auto tone = DriveTone::cavity(9.0, -30.0);
  const auto undamped = xi_components(tone, p.omega_c, Frequency::from_MHz(0.0));
  double previous = 1.0;
  for (double k : {1.0, 0.1, 0.01, 0.001}) {
    const auto damped = xi_components(tone, p.omega_c, Frequency::from_MHz(k));
    const double gap = std::abs(damped.co.amplitude - undamped.co.amplitude);
    CHECK(gap < previous);
    previous = gap;
  }
  CHECK(previous < 1e-5);
}
