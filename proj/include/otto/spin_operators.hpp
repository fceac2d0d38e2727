#pragma once

// Many-body operators of the frustrated chiral spin-1/2 ring.
//
// Basis convention: site 0 is the most significant bit of the basis index,
// bit value 0 is spin up (sigma^z |0> = +|0>). The ring is periodic, and both
// the nearest- and next-nearest-neighbour sums run over all N sites, so at
// N = 4 every next-nearest pair appears twice.

#include <vector>

#include "otto/core.hpp"

namespace otto {

enum class Axis { x, y, z };

struct ChainParams {
  double j1 = 1.0;    ///< nearest-neighbour exchange
  double j2 = -1.0;   ///< next-nearest-neighbour exchange
  double b = 0.1;     ///< Zeeman energy (gyromagnetic factor absorbed)
  int n_sites = 4;
  double g_me = 1.0;  ///< magnetoelectric polarization scale

  /// Throws ValidationError unless 4 <= n_sites <= kMaxSites and couplings are finite.
  void validate() const;
  int dim() const { return 1 << n_sites; }
};

Matrix pauli_string(int site, Axis axis, int n);

/// H_S = -J1 sum s_i.s_{i+1} - J2 sum s_i.s_{i+2} - B sum s^z_i.
Matrix static_hamiltonian(const ChainParams& p);

/// One bond of the z vector chirality, s^x_i s^y_{i+1} - s^y_i s^x_{i+1}.
Matrix chirality_bond(int site, int n);

/// K^z = sum_i (s^x_i s^y_{i+1} - s^y_i s^x_{i+1}), periodic.
Matrix chirality_operator(int n);

/// d * K^z.
Matrix drive_hamiltonian(int n, double d);

/// g_ME * K^z.
Matrix polarization_operator(const ChainParams& p);

/// Total sigma^z of every basis state.
std::vector<int> magnetization_of_basis(int n);

/// Basis indices grouped by total magnetization; every operator built here
/// is block diagonal in this partition.
std::vector<std::vector<int>> magnetization_sectors(int n);

/// H_S + d K^z, the instantaneous bare Hamiltonian.
class ChainModel {
 public:
  explicit ChainModel(const ChainParams& p);

  const ChainParams& params() const { return params_; }
  const Matrix& static_part() const { return static_; }
  const Matrix& chirality() const { return chirality_; }
  Matrix hamiltonian(double d) const { return static_ + d * chirality_; }

 private:
  ChainParams params_;
  Matrix static_;
  Matrix chirality_;
};

}  // namespace otto
