#pragma once

#include <vector>

#include "cqed/fockspace.hpp"
#include "cqed/hamiltonian.hpp"

namespace cqed {

struct SpectrumResult {
  Eigen::VectorXd eigenvalues;    // ascending, rad/us
  Eigen::MatrixXcd eigenvectors;  // columns
};

/// Throws NotHermitian when hermiticity_defect(H) >= 1e-10.
SpectrumResult eig_herm(const Operator& H);

struct Tracking {
  std::vector<int> index;          // eigenvector column per reference
  std::vector<double> confidence;  // |<reference|dressed>|^2
  bool ambiguous = false;          // some best overlap^2 < 0.5

  double min_confidence() const;
};

/// Injective maximum-overlap assignment of references to eigenvectors, greedy in
/// decreasing overlap; overlaps equal within 1e-9 go to the smaller eigenvalue.
Tracking track_dressed(const SpectrumResult& spec, const std::vector<StateVector>& references);
Tracking track_dressed(const SpectrumResult& spec, const HilbertSpec& h, const std::vector<BasisLabel>& labels);

/// Dressed |g,0>, |e,0>, |g,1> of a static Hamiltonian.
struct DressedLevels {
  double g0 = 0.0, e0 = 0.0, g1 = 0.0;  // rad/us
  double confidence = 1.0;             // smallest bare overlap^2 of the three
  bool ambiguous = false;
  Eigen::MatrixXcd vectors;            // dressed g0, e0, g1 as columns
};

/// Labels follow the bare state with the largest overlap. When a bare overlap^2
/// drops below 0.5 and `previous` is given, that label instead continues the
/// previous point's dressed vector.
DressedLevels dressed_levels(const Operator& H, const HilbertSpec& h, const DressedLevels* previous = nullptr);

struct StarkShift {
  double qubit_MHz = 0.0;
  double cavity_MHz = 0.0;
  double confidence = 1.0;
  bool ambiguous = false;
  DressedLevels driven;
};

struct StarkOptions {
  HilbertSpec hilbert;
  double early_cutoff = 0.0;  // rad/us
};

/// Transition shifts |g0>-|e0> and |g0>-|g1> relative to the undriven system,
/// both evaluated in the static drive frame. At most one tone per mode.
StarkShift stark_shift(const SystemParams& params, const std::vector<DriveTone>& tones, Model model,
                       const StarkOptions& opts = {}, const DressedLevels* previous = nullptr);

} // namespace cqed
