#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cqed/model.hpp"

namespace cqed {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

// Tensor ordering is qubit-major everywhere: index = n_qubit * n_c + n_cavity.

/// Bare product state |qubit level, cavity photons>.
struct BasisLabel {
  int qubit = 0;
  int cavity = 0;

  std::string str() const;
  friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

/// Accepts "g0", "e0", "f1", "h2", "|e,0>", or a numeric qubit level ("1,0").
BasisLabel parse_label(std::string_view text);
int basis_index(const HilbertSpec& h, BasisLabel label);
BasisLabel label_of(const HilbertSpec& h, int index);
StateVector basis_state(const HilbertSpec& h, BasisLabel label);

inline constexpr int default_max_dim = 4096;

struct ModeOps {
  HilbertSpec hilbert;
  Operator b, b_dag, n_q;  // qubit
  Operator a, a_dag, n_c;  // cavity
  Operator identity;
};

ModeOps build_mode_ops(const HilbertSpec& h, int max_dim = default_max_dim);

/// <psi|op|psi>
cplx expectation(const Operator& op, const StateVector& psi);
/// Tr(op rho)
cplx expectation(const Operator& op, const DensityMatrix& rho);

/// max |op - op^dagger|
double hermiticity_defect(const Operator& op);

/// Normal-ordered monomial b+^qubit_raise b^qubit_lower a+^cavity_raise a^cavity_lower.
struct Monomial {
  int qubit_raise = 0;
  int qubit_lower = 0;
  int cavity_raise = 0;
  int cavity_lower = 0;

  Monomial adjoint() const { return {qubit_lower, qubit_raise, cavity_lower, cavity_raise}; }
  bool self_adjoint() const { return qubit_raise == qubit_lower && cavity_raise == cavity_lower; }
  int degree() const { return qubit_raise + qubit_lower + cavity_raise + cavity_lower; }
  /// Net change of qubit / cavity excitation number.
  int qubit_shift() const { return qubit_raise - qubit_lower; }
  int cavity_shift() const { return cavity_raise - cavity_lower; }
  /// e.g. "b†2 b1 a†0 a0"
  std::string signature() const;

  friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

namespace ops {
inline constexpr Monomial identity{0, 0, 0, 0};
inline constexpr Monomial b{0, 1, 0, 0};
inline constexpr Monomial b_dag{1, 0, 0, 0};
inline constexpr Monomial a{0, 0, 0, 1};
inline constexpr Monomial a_dag{0, 0, 1, 0};
inline constexpr Monomial n_q{1, 1, 0, 0};
inline constexpr Monomial n_c{0, 0, 1, 1};
} // namespace ops

/// A normal-ordered monomial sends each Fock basis state to at most one basis
/// state, so its matrix is a list of (source, target, weight) entries.
struct MonomialAction {
  struct Entry {
    int source;
    int target;
    double weight;
  };
  std::vector<Entry> entries;
};

MonomialAction monomial_action(const Monomial& m, const HilbertSpec& h);
Operator materialize(const Monomial& m, const HilbertSpec& h);

} // namespace cqed
