#pragma once

// Dense reference constructions used as independent checks. They build every
// operator from explicit ladder matrices and evaluate the displacement
// amplitudes in closed form at the requested time, sharing no code with the
// term-list machinery under test.

#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cqed/model.hpp"

namespace reference {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline constexpr double tau = 6.283185307179586;

inline Mat lowering(int n) {
  Mat m = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) m(k - 1, k) = std::sqrt(static_cast<double>(k));
  return m;
}

inline Mat kron(const Mat& x, const Mat& y) {
  Mat out(x.rows() * y.rows(), x.cols() * y.cols());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

struct Ladder {
  Mat b, bd, a, ad, id;

  Ladder(int n_q, int n_c) {
    const Mat iq = Mat::Identity(n_q, n_q), ic = Mat::Identity(n_c, n_c);
    b = kron(lowering(n_q), ic);
    a = kron(iq, lowering(n_c));
    bd = b.adjoint();
    ad = a.adjoint();
    id = Mat::Identity(n_q * n_c, n_q * n_c);
  }
};

inline Mat power(const Mat& m, int k) {
  Mat out = Mat::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

/// Device constants in MHz.
struct Device {
  double wq, wc, alpha, kerr, chi, kq = 0.0, kc = 0.0;

  static Device table() {
    const auto p = cqed::table_s1_params();
    return {p.omega_q, p.omega_c, p.alpha, p.kerr_c, p.chi, p.kappa_q, p.kappa_c};
  }
};

struct Tone {
  bool qubit;
  double eps, det, phase;  // MHz, MHz, rad
};

/// Co- and counter-rotating displacement of one mode at time t (us), summed over tones.
inline std::pair<cplx, cplx> displacement(const Device& d, const std::vector<Tone>& tones, bool qubit, double t) {
  cplx co = 0.0, counter = 0.0;
  const cplx i{0.0, 1.0};
  for (const auto& tn : tones) {
    if (tn.qubit != qubit) continue;
    const double w = tau * (qubit ? d.wq : d.wc), k = tau * (qubit ? d.kq : d.kc);
    const double e = tau * tn.eps, D = tau * tn.det;
    co += e * std::exp(-i * tn.phase) / (-2.0 * D - i * k) * std::exp(-i * D * t);
    counter += e * std::exp(i * tn.phase) / (4.0 * w + 2.0 * D - i * k) * std::exp(i * D * t);
  }
  return {co, counter};
}

/// Effective Hamiltonian in the mode-rotating frame at time t (rad/us), written
/// out operator by operator with instantaneous displacements.
inline Mat late(const Device& d, const std::vector<Tone>& tones, int n_q, int n_c, double t, bool with_h2 = true) {
  const Ladder L(n_q, n_c);
  const double al = tau * d.alpha, K = tau * d.kerr, chi = tau * d.chi;
  const auto [x, y] = displacement(d, tones, true, t);
  const auto [z, w] = displacement(d, tones, false, t);
  const double nx = std::norm(x), nz = std::norm(z);
  const Mat nq = L.bd * L.b, nc = L.ad * L.a;

  Mat H = (-2.0 * al * nx - chi * nz) * nq + (-2.0 * K * nz - chi * nx) * nc - al / 2.0 * L.bd * L.bd * L.b * L.b -
          K / 2.0 * L.ad * L.ad * L.a * L.a - chi * nq * nc;

  Mat h1 = -al / 2.0 * x * x * L.bd * L.bd + al * x * L.bd * L.bd * L.b - K / 2.0 * z * z * L.ad * L.ad +
           K * z * L.ad * L.ad * L.a -
           chi * (x * z * L.bd * L.ad + std::conj(x) * z * L.b * L.ad - z * L.bd * L.b * L.ad - x * L.bd * L.ad * L.a) +
           (al * x * nx + chi * x * nz) * L.bd + (K * z * nz + chi * z * nx) * L.ad;
  H += h1 + h1.adjoint();

  if (with_h2) {
    Mat h2 = al * std::conj(y) * L.bd * L.bd * L.b - K * std::conj(w) * L.ad * L.ad * L.a -
             chi / 6.0 * (std::conj(y) * std::conj(w) * L.bd * L.ad + y * std::conj(w) * L.b * L.ad) +
             chi / 6.0 * (std::conj(w) * L.bd * L.b * L.ad + std::conj(y) * L.bd * L.ad * L.a);
    H += h2 + h2.adjoint();
  }
  return H;
}

/// Undisplaced full quartic expansion plus both halves of each cosine drive,
/// in the frame rotating at the bare mode frequencies (rad/us).
inline Mat oracle(const Device& d, const std::vector<Tone>& tones, int n_q, int n_c, double t) {
  const Ladder L(n_q, n_c);
  const cplx i{0.0, 1.0};
  const double wq = tau * d.wq, wc = tau * d.wc;
  const Mat bt = L.b * std::exp(-i * wq * t), at = L.a * std::exp(-i * wc * t);
  const Mat btd = bt.adjoint(), atd = at.adjoint();
  const double al = tau * d.alpha, K = tau * d.kerr, chi = tau * d.chi;
  const double g[5] = {2.0 * K, std::sqrt(2.0 * K * chi), chi, std::sqrt(2.0 * al * chi), 2.0 * al};
  auto choose = [](int n, int k) {
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
  };
  // normal-ordered (X_q)^k (X_c)^(4-k)
  auto normal_power = [&](const Mat& up, const Mat& down, int k) {
    Mat out = Mat::Zero(up.rows(), up.cols());
    for (int p = 0; p <= k; ++p) out += choose(k, p) * power(up, p) * power(down, k - p);
    return out;
  };
  Mat H = Mat::Zero(L.id.rows(), L.id.cols());
  for (int k = 0; k <= 4; ++k)
    H -= choose(4, k) * g[k] / 24.0 * normal_power(btd, bt, k) * normal_power(atd, at, 4 - k);
  for (const auto& tn : tones) {
    const double w = tn.qubit ? wq : wc, D = tau * tn.det, e = tau * tn.eps;
    const Mat& up = tn.qubit ? L.bd : L.ad;
    const cplx c = e / 2.0 * (std::exp(-i * (D * t + tn.phase)) + std::exp(i * ((2.0 * w + D) * t + tn.phase)));
    H += c * up + std::conj(c) * up.adjoint();
  }
  return H;
}

/// Drive-frame Stark shifts (MHz) of the |g0>-|e0> and |g0>-|g1> transitions for
/// at most one tone per mode, by eigendecomposition of the dense effective model.
struct Shifts {
  double qubit, cavity, confidence;
};

inline Shifts stark(const Device& d, const std::vector<Tone>& tones, int n_q, int n_c, bool with_h2 = true) {
  const Ladder L(n_q, n_c);
  double dq = 0.0, dc = 0.0;
  for (const auto& tn : tones) (tn.qubit ? dq : dc) = tau * tn.det;
  const Mat frame = -dq * L.bd * L.b - dc * L.ad * L.a;
  auto levels = [&](const Mat& H, double& conf) {
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    std::array<double, 3> e{};
    const int idx[3] = {0, n_c, 1};  // g0, e0, g1
    conf = 1.0;
    for (int r = 0; r < 3; ++r) {
      int best = 0;
      double ov = -1.0;
      for (int c = 0; c < H.rows(); ++c)
        if (std::norm(es.eigenvectors()(idx[r], c)) > ov) {
          ov = std::norm(es.eigenvectors()(idx[r], c));
          best = c;
        }
      e[r] = es.eigenvalues()(best);
      conf = std::min(conf, ov);
    }
    return e;
  };
  double conf = 1.0, unused = 1.0;
  const auto drv = levels(late(d, tones, n_q, n_c, 0.0, with_h2) + frame, conf);
  const auto bare = levels(late(d, {}, n_q, n_c, 0.0) + frame, unused);
  return {((drv[1] - drv[0]) - (bare[1] - bare[0])) / tau, ((drv[2] - drv[0]) - (bare[2] - bare[0])) / tau, conf};
}

} // namespace reference

namespace gen {

/// Random tone set: 1-2 tones per selected mode, detunings away from resonance.
inline std::vector<cqed::RawDriveTone> tones(std::mt19937_64& rng, bool qubit = true, bool cavity = true,
                                             int max_per_mode = 2) {
  std::uniform_real_distribution<double> eps(0.5, 20.0), mag(5.0, 300.0), ph(0.0, 6.283185307179586);
  std::uniform_int_distribution<int> count(1, max_per_mode);
  std::bernoulli_distribution sign(0.5);
  std::vector<cqed::RawDriveTone> out;
  for (int m = 0; m < 2; ++m) {
    if ((m == 0 && !qubit) || (m == 1 && !cavity)) continue;
    const int n = count(rng);
    for (int k = 0; k < n; ++k)
      out.push_back({m == 0 ? cqed::Mode::qubit : cqed::Mode::cavity, eps(rng), (sign(rng) ? 1.0 : -1.0) * mag(rng),
                     ph(rng)});
  }
  return out;
}

inline std::vector<reference::Tone> as_reference(const std::vector<cqed::RawDriveTone>& raw) {
  std::vector<reference::Tone> out;
  for (const auto& t : raw) out.push_back({t.target == cqed::Mode::qubit, t.epsilon, t.detuning, t.phase});
  return out;
}

} // namespace gen
