#include "cqed/fockspace.hpp"

#include <cassert>
#include <cmath>

#include "cqed/errors.hpp"

namespace cqed {

namespace {

constexpr std::string_view level_letters = "gefh";

// sqrt(n! / (n-k)!)
double falling_root(int n, int k) {
  double w = 1.0;
  for (int i = 0; i < k; ++i) w *= std::sqrt(static_cast<double>(n - i));
  return w;
}

// Applies c+^raise c^lower to |n> inside a mode truncated to `levels`.
// Returns the new level or -1 when the result vanishes.
int ladder(int n, int raise, int lower, int levels, double& weight) {
  if (n < lower) return -1;
  const int mid = n - lower;
  const int out = mid + raise;
  if (out >= levels) return -1;
  weight *= falling_root(n, lower) * falling_root(out, raise);
  return out;
}

Operator lowering(int levels) {
  Operator m = Operator::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return m;
}

Operator kron(const Operator& x, const Operator& y) {
  Operator out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

} // namespace

std::string BasisLabel::str() const {
  std::string out;
  if (qubit >= 0 && qubit < static_cast<int>(level_letters.size()))
    out += level_letters[static_cast<std::size_t>(qubit)];
  else
    out += std::to_string(qubit) + ",";
  return out + std::to_string(cavity);
}

BasisLabel parse_label(std::string_view text) {
  std::string s;
  for (char ch : text) {
    if (ch == '|' || ch == '>' || ch == ' ') continue;
    s += ch;
  }
  // tolerate a trailing UTF-8 right angle bracket
  if (s.size() >= 3 && s.compare(s.size() - 3, 3, "\xE2\x9F\xA9") == 0) s.resize(s.size() - 3);
  auto bad = [&] { return ValidationError("label", "cannot parse basis label '" + std::string(text) + "'"); };
  if (s.empty()) throw bad();

  BasisLabel label;
  std::size_t pos = 0;
  const auto letter = level_letters.find(s[0]);
  if (letter != std::string_view::npos) {
    label.qubit = static_cast<int>(letter);
    pos = 1;
  } else {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw bad();
    try {
      label.qubit = std::stoi(s.substr(0, comma));
    } catch (...) {
      throw bad();
    }
    pos = comma;
  }
  if (pos < s.size() && s[pos] == ',') ++pos;
  if (pos >= s.size()) throw bad();
  for (std::size_t i = pos; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') throw bad();
  label.cavity = std::stoi(s.substr(pos));
  return label;
}

int basis_index(const HilbertSpec& h, BasisLabel label) {
  if (label.qubit < 0 || label.qubit >= h.n_q || label.cavity < 0 || label.cavity >= h.n_c)
    throw DimensionError("basis label " + label.str() + " outside the truncated space");
  return label.qubit * h.n_c + label.cavity;
}

BasisLabel label_of(const HilbertSpec& h, int index) { return {index / h.n_c, index % h.n_c}; }

StateVector basis_state(const HilbertSpec& h, BasisLabel label) {
  StateVector psi = StateVector::Zero(h.dim());
  psi(basis_index(h, label)) = 1.0;
  return psi;
}

ModeOps build_mode_ops(const HilbertSpec& h, int max_dim) {
  if (h.n_q < 1 || h.n_c < 1) throw DimensionError("mode truncations must be positive");
  if (h.dim() > max_dim)
    throw DimensionError("total dimension " + std::to_string(h.dim()) + " exceeds the cap of " +
                         std::to_string(max_dim));
  const Operator iq = Operator::Identity(h.n_q, h.n_q);
  const Operator ic = Operator::Identity(h.n_c, h.n_c);
  ModeOps m;
  m.hilbert = h;
  m.b = kron(lowering(h.n_q), ic);
  m.b_dag = m.b.adjoint();
  m.n_q = m.b_dag * m.b;
  m.a = kron(iq, lowering(h.n_c));
  m.a_dag = m.a.adjoint();
  m.n_c = m.a_dag * m.a;
  m.identity = Operator::Identity(h.dim(), h.dim());
  return m;
}

cplx expectation(const Operator& op, const StateVector& psi) {
  if (op.rows() != psi.size() || op.cols() != psi.size())
    throw DimensionError("operator and state dimensions differ");
  const cplx v = psi.dot(op * psi);
  assert(hermiticity_defect(op) > 1e-12 || std::abs(v.imag()) < 1e-10);
  return v;
}

cplx expectation(const Operator& op, const DensityMatrix& rho) {
  if (op.rows() != rho.rows() || op.cols() != rho.cols() || rho.rows() != rho.cols())
    throw DimensionError("operator and density matrix dimensions differ");
  const cplx v = (op * rho).trace();
  assert(hermiticity_defect(op) > 1e-12 || std::abs(v.imag()) < 1e-10);
  return v;
}

double hermiticity_defect(const Operator& op) {
  if (op.rows() != op.cols()) throw DimensionError("hermiticity_defect needs a square matrix");
  if (op.size() == 0) return 0.0;
  return (op - op.adjoint()).cwiseAbs().maxCoeff();
}

std::string Monomial::signature() const {
  return "b†" + std::to_string(qubit_raise) + " b" + std::to_string(qubit_lower) + " a†" +
         std::to_string(cavity_raise) + " a" + std::to_string(cavity_lower);
}

MonomialAction monomial_action(const Monomial& m, const HilbertSpec& h) {
  MonomialAction action;
  for (int nq = 0; nq < h.n_q; ++nq) {
    for (int nc = 0; nc < h.n_c; ++nc) {
      double w = 1.0;
      const int q = ladder(nq, m.qubit_raise, m.qubit_lower, h.n_q, w);
      if (q < 0) continue;
      const int c = ladder(nc, m.cavity_raise, m.cavity_lower, h.n_c, w);
      if (c < 0) continue;
      action.entries.push_back({nq * h.n_c + nc, q * h.n_c + c, w});
    }
  }
  return action;
}

Operator materialize(const Monomial& m, const HilbertSpec& h) {
  Operator out = Operator::Zero(h.dim(), h.dim());
  for (const auto& e : monomial_action(m, h).entries) out(e.target, e.source) = e.weight;
  return out;
}

} // namespace cqed
