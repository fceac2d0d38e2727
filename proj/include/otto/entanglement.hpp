#pragma once

// Pairwise concurrence, two- and one-tangle, and half-chain entropy of ring
// states. Site ordering follows spin_operators: site 0 is the leading qubit.

#include <map>
#include <utility>
#include <vector>

#include "otto/core.hpp"

namespace otto {

/// Partial trace onto `keep` (site indices, strictly increasing); the kept
/// sites keep their relative order.
Matrix reduced_density(const Matrix& rho, const std::vector<int>& keep, int n_sites);

/// Wootters concurrence of a two-qubit density matrix. Throws ValidationError
/// for inputs that are not Hermitian, unit-trace and positive within 1e-8.
double concurrence(const Matrix& rho2);

/// -tr rho log2 rho.
double entropy_bits(const Matrix& rho);

/// Entropy of the first n/2 sites.
double half_chain_entropy(const Matrix& rho, int n_sites);

struct TangleReport {
  /// sum_{m != 0} C_{0m}^2
  double two_tangle = 0.0;
  /// (1/N) sum_n sum_{m != n} C_nm^2
  double two_tangle_symmetric = 0.0;
  /// 4 det rho_0
  double one_tangle = 0.0;
  double half_entropy = 0.0;
  std::map<std::pair<int, int>, double> pair_concurrences;  // n < m
};

TangleReport tangles(const Matrix& rho, int n_sites);

}  // namespace otto
