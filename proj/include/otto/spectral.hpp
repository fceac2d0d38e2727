#pragma once

// Exact diagonalization with label continuity along a parameter path, and
// Gibbs populations over a labelled spectrum.

#include <functional>
#include <vector>

#include "otto/core.hpp"

namespace otto {

/// Basis indices grouped into blocks that the Hamiltonian does not connect.
using BlockPartition = std::vector<std::vector<int>>;

/// Eigenpairs in label order. Right after diagonalize() labels coincide with
/// ascending energy; after track_continuity() label n is the adiabatic
/// continuation of label n of the previous spectrum.
struct Spectrum {
  RealVector energies;
  Matrix vectors;
  /// Block id of every level, or empty when diagonalized without blocks.
  std::vector<int> sector;
  /// Label indices whose energies lie within deg_tol of each other.
  std::vector<std::vector<int>> degeneracy_groups;
  /// tracked_order[label] = position of that label in ascending energy order.
  std::vector<int> tracked_order;
  double deg_tol = 0.0;
  /// Labels whose assignment was decided by the lowest-index tie-break.
  int ambiguous_assignments = 0;

  int dim() const { return static_cast<int>(energies.size()); }
  /// Index into degeneracy_groups for every level label.
  std::vector<int> group_of_level() const;
};

struct ThermalPopulations {
  double beta = 0.0;
  RealVector probs;
};

/// Toggle the residual/unitarity self-check run inside every diagonalize().
void set_spectral_verification(bool on);
bool spectral_verification();

/// Full eigensystem of a Hermitian matrix. deg_tol < 0 selects
/// 1e-9 * (E_max - E_min).
Spectrum diagonalize(const Matrix& h, double deg_tol = -1.0);

/// Same, diagonalizing each block of `blocks` separately. Throws
/// ValidationError if h couples two blocks.
Spectrum diagonalize(const Matrix& h, const BlockPartition& blocks, double deg_tol = -1.0);

/// Reorder and rephase `cur` so that each label continues the matching label
/// of `prev`; degenerate groups are rotated onto the previous basis.
Spectrum track_continuity(const Spectrum& prev, const Spectrum& cur);

/// Max column residual |H v - E v| and max |V^dagger V - 1|.
struct SpectrumDefects {
  double residual = 0.0;
  double unitarity = 0.0;
};
SpectrumDefects spectrum_defects(const Matrix& h, const Spectrum& s);

using HamiltonianOfParameter = std::function<Matrix(double)>;

struct PathOptions {
  int steps = 64;
  /// A step is refined when some label's best overlap weight drops below this.
  double min_overlap = 0.9;
  int max_refinements = 10;
};

/// Follow `start` (the spectrum at parameter `from`) to parameter `to`.
Spectrum track_path(const HamiltonianOfParameter& h, const Spectrum& start, double from, double to,
                    const BlockPartition* blocks = nullptr, const PathOptions& opts = {});

/// Boltzmann weights e^{-beta E_n}/Z in label order, computed with a
/// minimum-energy shift.
ThermalPopulations gibbs(const Spectrum& spec, double beta);
RealVector gibbs_weights(const RealVector& energies, double beta);

/// ln Z = ln sum_n e^{-beta E_n}.
double log_partition(const RealVector& energies, double beta);

/// Density matrix sum_n p_n |v_n><v_n| in the computational basis.
Matrix density_from_populations(const Spectrum& spec, const RealVector& probs);

}  // namespace otto
