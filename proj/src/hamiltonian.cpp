#include "cqed/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>

#include "cqed/errors.hpp"

namespace cqed {

namespace {

// A scalar written as sum_k amp_k exp(i rot_k t).
struct Phasor {
  cplx amp;
  double rot;
};
using Series = std::vector<Phasor>;

bool same_rotation(double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a) + std::abs(b)); }

Series merged(Series s) {
  std::stable_sort(s.begin(), s.end(), [](const Phasor& x, const Phasor& y) { return x.rot < y.rot; });
  Series out;
  for (const auto& p : s) {
    if (!out.empty() && same_rotation(out.back().rot, p.rot))
      out.back().amp += p.amp;
    else
      out.push_back(p);
  }
  std::erase_if(out, [](const Phasor& p) { return p.amp == cplx{}; });
  return out;
}

Series series_of(const std::vector<XiComponent>& comps) {
  Series s;
  for (const auto& c : comps) s.push_back({c.amplitude, c.rotation});
  return merged(std::move(s));
}

Series conj(const Series& s) {
  Series out;
  for (const auto& p : s) out.push_back({std::conj(p.amp), -p.rot});
  return out;
}

Series operator*(const Series& a, const Series& b) {
  Series out;
  for (const auto& x : a)
    for (const auto& y : b) out.push_back({x.amp * y.amp, x.rot + y.rot});
  return merged(std::move(out));
}

Series operator*(cplx k, const Series& s) {
  Series out;
  for (const auto& p : s) out.push_back({k * p.amp, p.rot});
  return merged(std::move(out));
}

Series operator+(const Series& a, const Series& b) {
  Series out = a;
  out.insert(out.end(), b.begin(), b.end());
  return merged(std::move(out));
}

void emit(HamiltonianSpec& spec, const Series& s, Monomial op) {
  for (const auto& p : s) spec.terms.push_back({p.amp, p.rot, op, true});
}

// For a real-valued series on a self-adjoint op: the static part becomes an
// unpaired term, each positive rotation a paired term whose conjugate supplies
// the negative one.
void emit_hermitian(HamiltonianSpec& spec, const Series& s, Monomial op) {
  for (const auto& p : s) {
    if (same_rotation(p.rot, 0.0))
      spec.terms.push_back({cplx{p.amp.real(), 0.0}, 0.0, op, false});
    else if (p.rot > 0.0)
      spec.terms.push_back({p.amp, p.rot, op, true});
  }
}

void add_static(HamiltonianSpec& spec, double coeff, Monomial op) {
  if (coeff != 0.0) spec.terms.push_back({cplx{coeff, 0.0}, 0.0, op, false});
}

HamiltonianSpec empty_spec(const SystemParams& params) {
  HamiltonianSpec spec;
  spec.params = params;
  return spec;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void append(HamiltonianSpec& dst, const HamiltonianSpec& src) {
  dst.terms.insert(dst.terms.end(), src.terms.begin(), src.terms.end());
}

double detuning_scale(const std::vector<DriveTone>& tones) {
  double s = 1.0;
  for (const auto& t : tones) s += std::abs(t.detuning.rad());
  return s;
}

} // namespace

std::string_view to_string(Model m) {
  switch (m) {
  case Model::late: return "late";
  case Model::late_no_h2: return "late_no_h2";
  case Model::early: return "early";
  case Model::oracle: return "oracle";
  }
  return "?";
}

Model parse_model(std::string_view text) {
  for (Model m : {Model::late, Model::late_no_h2, Model::early, Model::oracle})
    if (text == to_string(m)) return m;
  throw ValidationError("models", "unknown model '" + std::string(text) + "'");
}

HamiltonianSpec build_diag(const SystemParams& params, const XiSet& xi) {
  const double alpha = params.alpha.rad(), kerr = params.kerr_c.rad(), chi = params.chi.rad();
  const Series xq = series_of(xi.q_co), xc = series_of(xi.c_co);
  const Series nq = xq * conj(xq), nc = xc * conj(xc);

  auto spec = empty_spec(params);
  emit_hermitian(spec, cplx(-2.0 * alpha) * nq + cplx(-chi) * nc, ops::n_q);
  emit_hermitian(spec, cplx(-2.0 * kerr) * nc + cplx(-chi) * nq, ops::n_c);
  add_static(spec, -alpha / 2.0, {2, 2, 0, 0});
  add_static(spec, -kerr / 2.0, {0, 0, 2, 2});
  add_static(spec, -chi, {1, 1, 1, 1});
  return spec;
}

HamiltonianSpec build_h1(const SystemParams& params, const XiSet& xi) {
  const double alpha = params.alpha.rad(), kerr = params.kerr_c.rad(), chi = params.chi.rad();
  const Series xq = series_of(xi.q_co), xc = series_of(xi.c_co);
  const Series nq = xq * conj(xq), nc = xc * conj(xc);

  auto spec = empty_spec(params);
  emit(spec, cplx(-alpha / 2.0) * (xq * xq), {2, 0, 0, 0});
  emit(spec, cplx(alpha) * xq, {2, 1, 0, 0});
  emit(spec, cplx(-kerr / 2.0) * (xc * xc), {0, 0, 2, 0});
  emit(spec, cplx(kerr) * xc, {0, 0, 2, 1});
  emit(spec, cplx(-chi) * (xq * xc), {1, 0, 1, 0});
  emit(spec, cplx(-chi) * (conj(xq) * xc), {0, 1, 1, 0});
  emit(spec, cplx(chi) * xc, {1, 1, 1, 0});
  emit(spec, cplx(chi) * xq, {1, 0, 1, 1});
  emit(spec, cplx(alpha) * (xq * nq) + cplx(chi) * (xq * nc), ops::b_dag);
  emit(spec, cplx(kerr) * (xc * nc) + cplx(chi) * (xc * nq), ops::a_dag);
  return spec;
}

HamiltonianSpec build_h2(const SystemParams& params, const XiSet& xi) {
  const double alpha = params.alpha.rad(), kerr = params.kerr_c.rad(), chi = params.chi.rad();
  const Series yq = series_of(xi.q_counter), yc = series_of(xi.c_counter);

  auto spec = empty_spec(params);
  emit(spec, cplx(alpha) * conj(yq), {2, 1, 0, 0});
  emit(spec, cplx(-kerr) * conj(yc), {0, 0, 2, 1});
  emit(spec, cplx(-chi / 6.0) * (conj(yq) * conj(yc)), {1, 0, 1, 0});
  emit(spec, cplx(-chi / 6.0) * (yq * conj(yc)), {0, 1, 1, 0});
  emit(spec, cplx(chi / 6.0) * conj(yc), {1, 1, 1, 0});
  emit(spec, cplx(chi / 6.0) * conj(yq), {1, 0, 1, 1});
  return spec;
}

HamiltonianSpec build_late_rwa(const SystemParams& params, const std::vector<DriveTone>& tones,
                               bool include_h2) {
  const XiSet xi = build_xi_set(params, tones);
  auto spec = build_diag(params, xi);
  append(spec, build_h1(params, xi));
  if (include_h2) append(spec, build_h2(params, xi));
  spec.tones = tones;
  return spec;
}

HamiltonianSpec build_early_rwa(const SystemParams& params, const std::vector<DriveTone>& tones,
                                double cutoff) {
  if (!(cutoff >= 0.0)) throw ValidationError("early_rwa_cutoff", "must be >= 0");
  const XiSet xi = build_xi_set(params, tones);
  auto spec = build_diag(params, xi);
  append(spec, build_h1(params, xi));
  const double tol = 1e-9 * detuning_scale(tones);
  std::erase_if(spec.terms, [&](const HamiltonianTerm& t) { return std::abs(t.rotation) > cutoff + tol; });
  spec.tones = tones;
  return spec;
}

HamiltonianSpec build_oracle(const SystemParams& params, const std::vector<DriveTone>& tones) {
  const double alpha = params.alpha.rad(), kerr = params.kerr_c.rad(), chi = params.chi.rad();
  const double wq = params.omega_q.rad(), wc = params.omega_c.rad();
  // E_J phi_q^k phi_c^(4-k) for k qubit factors
  const double g[5] = {2.0 * kerr, std::sqrt(2.0 * kerr * chi), chi, std::sqrt(2.0 * alpha * chi), 2.0 * alpha};

  auto spec = empty_spec(params);
  spec.tones = tones;
  for (int p = 0; p <= 4; ++p)
    for (int q = 0; p + q <= 4; ++q)
      for (int r = 0; p + q + r <= 4; ++r) {
        const int s = 4 - p - q - r;
        const int k = p + q;
        const Monomial m{p, q, r, s};
        const double coeff = -binomial(4, k) * binomial(k, p) * binomial(4 - k, r) * g[k] / 24.0;
        if (coeff == 0.0) continue;
        if (m.self_adjoint()) {
          spec.terms.push_back({cplx{coeff, 0.0}, 0.0, m, false});
        } else if (m.adjoint() < m) {
          spec.terms.push_back({cplx{coeff, 0.0}, (p - q) * wq + (r - s) * wc, m, true});
        }
      }

  for (const auto& tone : tones) {
    const double half = tone.epsilon.rad() / 2.0;
    if (half == 0.0) continue;
    const double w = params.mode_frequency(tone.target).rad();
    const double d = tone.detuning.rad();
    const Monomial raise = tone.target == Mode::qubit ? ops::b_dag : ops::a_dag;
    spec.terms.push_back({half * std::polar(1.0, -tone.phase), -d, raise, true});
    spec.terms.push_back({half * std::polar(1.0, tone.phase), 2.0 * w + d, raise, true});
  }
  return spec;
}

HamiltonianSpec build_model(Model m, const SystemParams& params, const std::vector<DriveTone>& tones,
                            double early_cutoff) {
  switch (m) {
  case Model::late: return build_late_rwa(params, tones, true);
  case Model::late_no_h2: return build_late_rwa(params, tones, false);
  case Model::early: return build_early_rwa(params, tones, early_cutoff);
  case Model::oracle: return build_oracle(params, tones);
  }
  throw ValidationError("model", "unhandled model");
}

HamiltonianSpec to_drive_frame(const HamiltonianSpec& spec, Frequency delta_q, Frequency delta_c,
                               bool require_static) {
  if (spec.frame != Frame::mode_rotating) throw FrameError("spec is already in the drive frame");
  HamiltonianSpec out = spec;
  out.frame = Frame::drive;
  const double dq = delta_q.rad(), dc = delta_c.rad();
  for (auto& t : out.terms) t.rotation += t.op.qubit_shift() * dq + t.op.cavity_shift() * dc;
  add_static(out, -dq, ops::n_q);
  add_static(out, -dc, ops::n_c);

  if (require_static) {
    const double tol = 1e-9 * (1.0 + std::abs(dq) + std::abs(dc));
    for (auto& t : out.terms) {
      if (std::abs(t.rotation) > tol)
        throw FrameError("term " + t.op.signature() + " still rotates at " +
                         std::to_string(t.rotation / two_pi) + " MHz in the drive frame");
      t.rotation = 0.0;
    }
  }
  return out;
}

std::pair<Frequency, Frequency> tone_detunings(const std::vector<DriveTone>& tones) {
  std::optional<Frequency> q, c;
  for (const auto& t : tones) {
    auto& slot = t.target == Mode::qubit ? q : c;
    if (!slot) slot = t.detuning;
  }
  return {q.value_or(Frequency{}), c.value_or(Frequency{})};
}

Operator evaluate(const HamiltonianSpec& spec, const HilbertSpec& h, double t) {
  return CompiledHamiltonian(spec, h).dense(t);
}

std::string dump_terms(const HamiltonianSpec& spec) {
  std::string out;
  char buf[256];
  for (const auto& t : spec.terms) {
    std::snprintf(buf, sizeof buf, "%+.10e %+.10ei MHz  rot %+.10e MHz  ", t.coeff.real() / two_pi,
                  t.coeff.imag() / two_pi, t.rotation / two_pi);
    out += buf;
    out += t.op.signature();
    if (t.conjugate_pair) out += "  +h.c.";
    out += '\n';
  }
  return out;
}

CompiledHamiltonian::CompiledHamiltonian(const HamiltonianSpec& spec, const HilbertSpec& h)
    : dim_(h.dim()), diagonal_(Eigen::VectorXd::Zero(h.dim())) {
  for (const auto& term : spec.terms) {
    const auto action = monomial_action(term.op, h);
    if (!term.conjugate_pair) {
      if (!term.op.self_adjoint() || term.coeff.imag() != 0.0 || term.rotation != 0.0)
        throw NotHermitian("unpaired term " + term.op.signature() + " is not Hermitian");
      for (const auto& e : action.entries) diagonal_(e.target) += term.coeff.real() * e.weight;
      continue;
    }
    auto it = std::find_if(groups_.begin(), groups_.end(),
                           [&](const Group& g) { return g.rotation == term.rotation; });
    if (it == groups_.end()) {
      groups_.push_back({term.rotation, {}});
      it = std::prev(groups_.end());
    }
    for (const auto& e : action.entries) it->entries.push_back({e.source, e.target, term.coeff * e.weight});
  }

  for (auto& g : groups_) {
    std::sort(g.entries.begin(), g.entries.end(), [](const Entry& a, const Entry& b) {
      return a.target != b.target ? a.target < b.target : a.source < b.source;
    });
    std::vector<Entry> merged;
    for (const auto& e : g.entries) {
      if (!merged.empty() && merged.back().target == e.target && merged.back().source == e.source)
        merged.back().value += e.value;
      else
        merged.push_back(e);
    }
    g.entries = std::move(merged);
  }
}

void CompiledHamiltonian::apply(double t, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& out) const {
  if (x.rows() != dim_) throw DimensionError("state dimension does not match the Hamiltonian");
  const Eigen::Index cols = x.cols();
  out.resize(dim_, cols);
  for (Eigen::Index c = 0; c < cols; ++c) out.col(c) = diagonal_.cwiseProduct(x.col(c));
  for (const auto& g : groups_) {
    const cplx phase = std::polar(1.0, g.rotation * t);
    for (const auto& e : g.entries) {
      const cplx v = phase * e.value;
      const cplx vc = std::conj(v);
      for (Eigen::Index c = 0; c < cols; ++c) {
        out(e.target, c) += v * x(e.source, c);
        out(e.source, c) += vc * x(e.target, c);
      }
    }
  }
}

Operator CompiledHamiltonian::dense(double t) const {
  Operator a = Operator::Zero(dim_, dim_);
  for (const auto& g : groups_) {
    const cplx phase = std::polar(1.0, g.rotation * t);
    for (const auto& e : g.entries) a(e.target, e.source) += phase * e.value;
  }
  Operator out = a + a.adjoint();
  out.diagonal() += diagonal_.cast<cplx>();
  return out;
}

double CompiledHamiltonian::max_rotation() const {
  double m = 0.0;
  for (const auto& g : groups_)
    if (!g.entries.empty()) m = std::max(m, std::abs(g.rotation));
  return m;
}

} // namespace cqed
