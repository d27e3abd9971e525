#include <catch2/catch_amalgamated.hpp>

#include "cqed/dynamics.hpp"
#include "cqed/errors.hpp"
#include "cqed/spectra.hpp"

using namespace cqed;

namespace {

SystemParams table() { return validate_params(table_s1_params()).params; }

HamiltonianSpec swap_spec(double g) {
  HamiltonianSpec s;
  s.params = table();
  s.terms.push_back({cplx(g), 0.0, Monomial{0, 1, 1, 0}, true});
  return s;
}

double population(const HilbertSpec& h, const StateVector& psi, BasisLabel l) {
  return std::norm(psi(basis_index(h, l)));
}

std::vector<double> grid(double stop, int count) { return linspace(0.0, stop, count); }

} // namespace

TEST_CASE("excitation swap follows sin^2", "[dynamics]") {
  const double g = two_pi * 0.5;
  const HilbertSpec h{3, 3};
  const auto traj = propagate_schrodinger(swap_spec(g), h, basis_state(h, {0, 1}), grid(2.0, 41));
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    worst = std::max(worst, std::abs(population(h, traj.states[i], {1, 0}) - std::pow(std::sin(g * t), 2)));
  }
  CHECK(worst < 1e-6);
  CHECK(traj.norm_drift < 1e-8);
}

TEST_CASE("number operator gives a pure phase", "[dynamics]") {
  HamiltonianSpec s;
  s.params = table();
  const double w = two_pi * 3.0;
  s.terms.push_back({cplx(w), 0.0, ops::n_c, false});
  const HilbertSpec h{3, 4};
  const auto traj = propagate_schrodinger(s, h, basis_state(h, {0, 2}), {0.0, 0.3, 1.0});
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const cplx expect = std::exp(cplx(0.0, -2.0 * w * traj.times[i]));
    CHECK(std::abs(traj.states[i](2) - expect) < 1e-8);
  }
}

TEST_CASE("halving the tolerance changes little", "[dynamics]") {
  const auto p = table();
  const auto spec = build_late_rwa(p, {DriveTone::qubit(4.0, -20.0), DriveTone::cavity(12.0, 18.077)});
  const HilbertSpec h{4, 5};
  SolverSettings a, b;
  a.rtol = 1e-9;
  b.rtol = 5e-10;
  const auto psi0 = basis_state(h, {0, 0});
  const auto ta = propagate_schrodinger(spec, h, psi0, {0.0, 0.5}, a);
  const auto tb = propagate_schrodinger(spec, h, psi0, {0.0, 0.5}, b);
  CHECK((ta.states.back() - tb.states.back()).norm() < 1e-6);
}

TEST_CASE("exact static propagator agrees with time stepping", "[dynamics]") {
  const auto p = table();
  const auto spec = build_late_rwa(p, {DriveTone::qubit(3.2, -20.0), DriveTone::cavity(15.3, 18.077)});
  const HilbertSpec h{4, 6};
  const auto psi0 = basis_state(h, {0, 0});
  const auto g = grid(1.0, 5);
  const auto ref = propagate_schrodinger(spec, h, psi0, g);
  Eigen::MatrixXcd states = psi0;
  std::vector<double> pops;
  propagate_static(spec, h, states, g, [&](std::size_t, double, const Eigen::MatrixXcd& s) {
    double pe = 0.0;
    for (int c = 0; c < h.n_c; ++c) pe += std::norm(s(h.n_c + c, 0));
    pops.push_back(pe);
  });
  REQUIRE(pops.size() == g.size());
  CHECK(pops.front() == 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double pe = 0.0;
    for (int c = 0; c < h.n_c; ++c) pe += std::norm(ref.states[i](h.n_c + c));
    CHECK(std::abs(pops[i] - pe) < 1e-8);
  }
}

TEST_CASE("static propagator preconditions", "[dynamics][errors]") {
  const auto p = table();
  const HilbertSpec h{3, 3};
  Eigen::MatrixXcd psi = basis_state(h, {0, 0});
  const auto two = build_late_rwa(p, {DriveTone::qubit(1.0, -20.0), DriveTone::qubit(1.0, -30.0)});
  CHECK_THROWS_AS(propagate_static(two, h, psi, {0.0, 1.0}), FrameError);
  const auto one = build_late_rwa(p, {DriveTone::qubit(1.0, -20.0)});
  CHECK_THROWS_AS(propagate_static(one, h, psi, {0.5, 1.0}), ValidationError);
  Eigen::MatrixXcd wrong = Eigen::MatrixXcd::Zero(4, 1);
  CHECK_THROWS_AS(propagate_static(one, h, wrong, {0.0, 1.0}), DimensionError);
}

TEST_CASE("Lindblad without decay matches Schrodinger", "[dynamics][lindblad]") {
  const HilbertSpec h{3, 3};
  const auto spec = swap_spec(two_pi * 0.4);
  const auto psi0 = basis_state(h, {0, 1});
  const std::vector<double> g{0.0, 0.4, 0.9};
  const auto pure = propagate_schrodinger(spec, h, psi0, g);
  const auto mixed = propagate_lindblad(spec, h, psi0 * psi0.adjoint(), g, {}, {});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const DensityMatrix expect = pure.states[i] * pure.states[i].adjoint();
    CHECK((mixed.states[i] - expect).cwiseAbs().maxCoeff() < 1e-8);
  }
  CHECK(mixed.trace_drift < 1e-10);
  CHECK_FALSE(mixed.positivity_warning);
}

TEST_CASE("cavity photon decays exponentially", "[dynamics][lindblad]") {
  const auto p = table();
  const HilbertSpec h{3, 4};
  const auto spec = build_late_rwa(p, {});
  const auto psi0 = basis_state(h, {0, 1});
  DecayRates rates;
  rates.kappa_c = two_pi * GENERATE(0.05, 0.5);
  const auto g = grid(2.0, 9);
  const auto traj = propagate_lindblad(spec, h, psi0 * psi0.adjoint(), g, {}, rates);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int k = basis_index(h, {0, 1});
    CHECK(std::abs(traj.states[i](k, k).real() - std::exp(-rates.kappa_c * g[i])) < 1e-8);
  }
  CHECK(traj.trace_drift < 1e-8 * g.back());
  CHECK(traj.min_eigenvalue > -1e-6);
}

TEST_CASE("Lindblad input validation", "[dynamics][errors]") {
  const HilbertSpec h{3, 3};
  const auto spec = swap_spec(1.0);
  const auto psi0 = basis_state(h, {0, 0});
  const DensityMatrix rho = psi0 * psi0.adjoint();
  DecayRates bad;
  bad.kappa_c = -1.0;
  CHECK_THROWS_AS(propagate_lindblad(spec, h, rho, {0.0, 1.0}, {}, bad), ValidationError);
  CHECK_THROWS_AS(propagate_lindblad(spec, h, 2.0 * rho, {0.0, 1.0}, {}, {}), ValidationError);
  CHECK_THROWS_AS(propagate_lindblad(spec, {3, 4}, rho, {0.0, 1.0}, {}, {}), DimensionError);
}

TEST_CASE("phase slope recovers eigenvalue differences", "[dynamics][phase]") {
  const auto p = table();
  const HilbertSpec h{4, 4};
  SECTION("bare levels in a detuned frame") {
    const auto spec = to_drive_frame(build_late_rwa(p, {}), Frequency::from_MHz(-20.0), {}, false);
    PhaseSlopeOptions o;
    o.duration = 0.5;
    const auto r = phase_slope_frequency(spec, h, {1, 0}, {0, 0}, o);
    CHECK(r.frequency_MHz == Catch::Approx(20.0).margin(1e-6));
    CHECK(r.fit_residual < 1e-6);
  }
  SECTION("weakly dressed levels") {
    const std::vector<DriveTone> tones{DriveTone::qubit(2.0, -100.0)};
    const auto [dq, dc] = tone_detunings(tones);
    const auto spec = to_drive_frame(build_late_rwa(p, tones), dq, dc, true);
    const auto levels = dressed_levels(evaluate(spec, h, 0.0), h);
    PhaseSlopeOptions o;
    o.duration = 2.0;
    o.dt_max = 1e-3;
    const auto r = phase_slope_frequency(spec, h, {1, 0}, {0, 0}, o);
    CHECK(std::abs(r.frequency_MHz - (levels.e0 - levels.g0) / two_pi) < 1e-3);
  }
}

TEST_CASE("phase slope reports a lost state", "[dynamics][phase][errors]") {
  const HilbertSpec h{3, 3};
  PhaseSlopeOptions o;
  o.duration = 1.0;
  CHECK_THROWS_AS(phase_slope_frequency(swap_spec(two_pi * 1.0), h, {0, 1}, {0, 0}, o), LowOverlap);
  o.fit_fraction = 0.0;
  CHECK_THROWS_AS(phase_slope_frequency(swap_spec(1.0), h, {0, 1}, {0, 0}, o), ValidationError);
}
