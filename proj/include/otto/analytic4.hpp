#pragma once

// Closed-form eigensystems of the four-site ring, bare and counterdiabatic,
// and the closed-form stroke works and their second moments.
//
// Levels are indexed 0..15 for labels 1..16 of the closed-form list.

#include "otto/core.hpp"
#include "otto/spin_operators.hpp"

namespace otto {

struct Analytic4Coefficients {
  double alpha = 0.0;
  double mu = 0.0;
  double nu = 0.0;
  double lambda = 0.0;
  /// sqrt(J1^2 + 16 J2^2 - 8 J1 J2 + 8 d^2)
  double root = 0.0;
};

/// Throws ValidationError at d = 0, where mu and lambda are singular.
Analytic4Coefficients coefficients4(const ChainParams& p, double d);

/// sqrt(J1^2 + 16 J2^2 - 8 J1 J2 + 8 d^2)
double level_root4(const ChainParams& p, double d);

struct Eigensystem4 {
  RealVector energies;  // 16 entries, closed-form labels
  Matrix vectors;       // columns in the same order
};

RealVector energies4(const ChainParams& p, double d);

/// At d = 0 the pair (6, 7) is obtained by diagonalizing the Hamiltonian
/// inside its two-dimensional invariant subspace.
Eigensystem4 eigensystem4(const ChainParams& p, double d);

/// A = 4 ddot (lambda + mu) alpha nu / (d (lambda - mu)). Zero when ddot = 0.
double cd_amplitude4(const ChainParams& p, double d, double ddot);

/// i A (|Phi6><Phi7| - |Phi7><Phi6|), the auxiliary term in closed form.
Matrix cd_term4(const ChainParams& p, double d, double ddot);

/// Eigenpairs of H0 + cd_term4. Only levels 6, 7 differ from the bare ones.
Eigensystem4 cd_eigensystem4(const ChainParams& p, double d, double ddot);

/// How the end-of-stroke field enters the closed-form works.
///   protocol: d1 = d0 - eps tau^2 / 6 everywhere, level (6,7) gaps as differences.
///   appendix: square roots evaluated at d0 + eps tau^2 / 6, and the second
///             moment of the cold stroke with the roots added, as printed.
enum class AppendixSign { protocol, appendix };

struct ClosedFormWorks {
  double w2 = 0.0;
  double w4 = 0.0;
  double w2_sq = 0.0;  // <W2^2>
  double w4_sq = 0.0;  // <W4^2>
  /// [<W2^2> - <W2>^2 + <W4^2> - <W4>^2]^(1/2), cross terms factorized.
  double dw = 0.0;
};

/// Boltzmann factors use E_n(0) at d0 and E_n(tau) at d0 - eps tau^2 / 6 in
/// both variants.
ClosedFormWorks closed_form_works4(const ChainParams& p, double epsilon, double d0, double tau,
                                   double beta_h, double beta_l,
                                   AppendixSign sign = AppendixSign::protocol);

}  // namespace otto
