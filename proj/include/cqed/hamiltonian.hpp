#pragma once

#include <string>
#include <vector>

#include "cqed/displacement.hpp"
#include "cqed/fockspace.hpp"
#include "cqed/model.hpp"

namespace cqed {

/// coeff * exp(i rotation t) * op, plus its Hermitian conjugate when conjugate_pair is set.
/// Unpaired terms carry a self-adjoint op with a real coefficient and zero rotation.
struct HamiltonianTerm {
  cplx coeff;
  double rotation = 0.0;  // rad/us
  Monomial op;
  bool conjugate_pair = false;
};

enum class Frame { mode_rotating, drive };

struct HamiltonianSpec {
  std::vector<HamiltonianTerm> terms;
  Frame frame = Frame::mode_rotating;
  SystemParams params;
  std::vector<DriveTone> tones;
};

enum class Model { late, late_no_h2, early, oracle };

std::string_view to_string(Model m);
Model parse_model(std::string_view text);

HamiltonianSpec build_diag(const SystemParams& params, const XiSet& xi);
HamiltonianSpec build_h1(const SystemParams& params, const XiSet& xi);
HamiltonianSpec build_h2(const SystemParams& params, const XiSet& xi);

HamiltonianSpec build_late_rwa(const SystemParams& params, const std::vector<DriveTone>& tones,
                               bool include_h2 = true);

/// H_diag plus the H_1 terms with |rotation| <= cutoff (rad/us). Cutoff 0 keeps
/// only terms that are exactly static under the detuning relations.
HamiltonianSpec build_early_rwa(const SystemParams& params, const std::vector<DriveTone>& tones,
                                double cutoff = 0.0);

/// Full quartic expansion without any RWA, plus both halves of each cosine drive.
HamiltonianSpec build_oracle(const SystemParams& params, const std::vector<DriveTone>& tones);

HamiltonianSpec build_model(Model m, const SystemParams& params, const std::vector<DriveTone>& tones,
                            double early_cutoff = 0.0);

/// Moves a mode-frame spec into the frame rotating at the given detunings.
/// With require_static, throws FrameError if any term still rotates.
HamiltonianSpec to_drive_frame(const HamiltonianSpec& spec, Frequency delta_q, Frequency delta_c,
                               bool require_static = false);

/// Detunings of the first qubit and cavity tones (zero if absent).
std::pair<Frequency, Frequency> tone_detunings(const std::vector<DriveTone>& tones);

/// Dense H(t).
Operator evaluate(const HamiltonianSpec& spec, const HilbertSpec& h, double t);

/// One line per term: coefficient (MHz), rotation (MHz), operator signature.
std::string dump_terms(const HamiltonianSpec& spec);

/// Precomputed Fock-space action of a spec. Terms are grouped by rotation and
/// applied as H = D + A(t) + A(t)^dagger, so every evaluation is exactly Hermitian.
class CompiledHamiltonian {
public:
  CompiledHamiltonian(const HamiltonianSpec& spec, const HilbertSpec& h);

  int dim() const { return dim_; }
  /// out = H(t) * x, column by column.
  void apply(double t, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& out) const;
  Operator dense(double t) const;
  /// Largest |rotation| among the terms (rad/us).
  double max_rotation() const;

private:
  struct Entry {
    int source;
    int target;
    cplx value;
  };
  struct Group {
    double rotation;
    std::vector<Entry> entries;
  };
  int dim_;
  Eigen::VectorXd diagonal_;
  std::vector<Group> groups_;
};

} // namespace cqed
