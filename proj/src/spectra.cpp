#include "cqed/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "cqed/errors.hpp"

namespace cqed {

SpectrumResult eig_herm(const Operator& H) {
  if (hermiticity_defect(H) >= 1e-10) throw NotHermitian("eigensolver input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Operator> solver(H);
  if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double Tracking::min_confidence() const {
  return confidence.empty() ? 1.0 : *std::min_element(confidence.begin(), confidence.end());
}

Tracking track_dressed(const SpectrumResult& spec, const std::vector<StateVector>& references) {
  const int n = static_cast<int>(spec.eigenvalues.size());
  const int m = static_cast<int>(references.size());
  if (m > n) throw DimensionError("more references than eigenvectors");

  struct Candidate {
    double overlap;
    int ref;
    int col;
  };
  std::vector<Candidate> all;
  all.reserve(static_cast<std::size_t>(n * m));
  for (int r = 0; r < m; ++r) {
    if (references[r].size() != n) throw DimensionError("reference dimension does not match");
    for (int c = 0; c < n; ++c)
      all.push_back({std::norm(references[r].dot(spec.eigenvectors.col(c))), r, c});
  }
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    if (std::abs(a.overlap - b.overlap) > 1e-9) return a.overlap > b.overlap;
    if (a.ref != b.ref) return a.ref < b.ref;
    return a.col < b.col;
  });

  Tracking out;
  out.index.assign(static_cast<std::size_t>(m), -1);
  out.confidence.assign(static_cast<std::size_t>(m), 0.0);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  int assigned = 0;
  for (const auto& c : all) {
    if (assigned == m) break;
    if (out.index[c.ref] >= 0 || used[c.col]) continue;
    out.index[c.ref] = c.col;
    out.confidence[c.ref] = c.overlap;
    used[c.col] = true;
    ++assigned;
  }
  for (double c : out.confidence)
    if (c < 0.5) out.ambiguous = true;
  return out;
}

Tracking track_dressed(const SpectrumResult& spec, const HilbertSpec& h, const std::vector<BasisLabel>& labels) {
  std::vector<StateVector> refs;
  for (const auto& l : labels) refs.push_back(basis_state(h, l));
  return track_dressed(spec, refs);
}

DressedLevels dressed_levels(const Operator& H, const HilbertSpec& h, const DressedLevels* previous) {
  const auto spec = eig_herm(H);
  const std::vector<BasisLabel> labels{{0, 0}, {1, 0}, {0, 1}};
  Tracking tr = track_dressed(spec, h, labels);

  if (previous && previous->vectors.cols() == 3 && previous->vectors.rows() == H.rows() && tr.ambiguous) {
    std::vector<StateVector> refs;
    for (int k = 0; k < 3; ++k) refs.push_back(previous->vectors.col(k));
    const Tracking cont = track_dressed(spec, refs);
    const Tracking bare = tr;
    for (int k = 0; k < 3; ++k) {
      if (bare.confidence[k] >= 0.5) continue;
      const int col = cont.index[k];
      const bool clash = std::find(tr.index.begin(), tr.index.end(), col) != tr.index.end() && tr.index[k] != col;
      if (!clash) tr.index[k] = col;
    }
    // confidence stays the bare overlap so the crossing remains visible
    for (int k = 0; k < 3; ++k)
      tr.confidence[k] = std::norm(basis_state(h, labels[k]).dot(spec.eigenvectors.col(tr.index[k])));
  }

  DressedLevels out;
  out.g0 = spec.eigenvalues(tr.index[0]);
  out.e0 = spec.eigenvalues(tr.index[1]);
  out.g1 = spec.eigenvalues(tr.index[2]);
  out.confidence = tr.min_confidence();
  out.ambiguous = tr.ambiguous;
  out.vectors.resize(H.rows(), 3);
  for (int k = 0; k < 3; ++k) out.vectors.col(k) = spec.eigenvectors.col(tr.index[k]);
  return out;
}

StarkShift stark_shift(const SystemParams& params, const std::vector<DriveTone>& tones, Model model,
                       const StarkOptions& opts, const DressedLevels* previous) {
  int nq = 0, nc = 0;
  for (const auto& t : tones) (t.target == Mode::qubit ? nq : nc)++;
  if (nq > 1 || nc > 1) throw FrameError("a static drive frame needs at most one tone per mode");
  if (model == Model::oracle) throw FrameError("the oracle has no static frame; use the phase-slope estimator");

  const auto [dq, dc] = tone_detunings(tones);
  const auto driven_spec = to_drive_frame(build_model(model, params, tones, opts.early_cutoff), dq, dc, true);
  const auto bare_spec = to_drive_frame(build_diag(params, XiSet{}), dq, dc, true);

  StarkShift out;
  out.driven = dressed_levels(evaluate(driven_spec, opts.hilbert, 0.0), opts.hilbert, previous);
  const auto bare = dressed_levels(evaluate(bare_spec, opts.hilbert, 0.0), opts.hilbert);
  out.qubit_MHz = ((out.driven.e0 - out.driven.g0) - (bare.e0 - bare.g0)) / two_pi;
  out.cavity_MHz = ((out.driven.g1 - out.driven.g0) - (bare.g1 - bare.g0)) / two_pi;
  out.confidence = out.driven.confidence;
  out.ambiguous = out.driven.ambiguous;
  return out;
}

} // namespace cqed
