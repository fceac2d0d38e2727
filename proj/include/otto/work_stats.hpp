#pragma once

// Stroke works, heats, power, work fluctuations, irreversible work and
// efficiency of the Otto cycle.
//
// spec0 is the labelled spectrum at d0 (hot contact), spec_tau the same labels
// continued to d1 (cold contact). Work done on the substance is positive, so
// an engine has w2 + w4 < 0.

#include <cstddef>
#include <vector>

#include "otto/drive_cd.hpp"
#include "otto/spectral.hpp"

namespace otto {

struct AdiabaticWorks {
  double w2 = 0.0;
  double w4 = 0.0;
};

/// Throws ValidationError when the two spectra are not labelled consistently.
AdiabaticWorks adiabatic_works(const Spectrum& spec0, const Spectrum& spec_tau, double beta_h, double beta_l);

struct Heats {
  double q_in = 0.0;
  double q_out = 0.0;
  /// |w2 + w4 + q_in + q_out|
  double balance_residual = 0.0;
};

/// Throws NumericalError when the balance residual exceeds 1e-10 of the
/// energy scale.
Heats heats(const Spectrum& spec0, const Spectrum& spec_tau, double beta_h, double beta_l);

/// -(w2 + w4) / (tau1 + tau2 + tau3 + tau4).
double output_power(double w2, double w4, double tau2, double tau4, double tau1 = 0.0, double tau3 = 0.0);

struct StrokeWork {
  double mean = 0.0;
  double mean_square = 0.0;
  double std_dev = 0.0;
};

struct WorkFluctuation {
  StrokeWork w2;
  StrokeWork w4;
  /// [<W^2> - <W>^2]^(1/2) with <W2 W4> = <W2><W4>.
  double dw_ad = 0.0;
};

WorkFluctuation work_fluctuation(const Spectrum& spec0, const Spectrum& spec_tau, double beta_h, double beta_l);

/// sum_{n,m} (E_n(t) - E_m(0)) P_mn(t) p_m(beta) at sample k of the stroke.
double total_mean_work(const StrokeResult& r, std::size_t k, double beta);

/// Reference populations q_n in the relative entropy
/// S = sum_n p_n ln p_n - sum_{k,n} p_k P_kn ln q_n, with P_kn measured
/// against the counterdiabatic eigenbasis.
///   transported: q_n = p_n, the initial Gibbs weights carried by the labels.
///   gibbs_cd:    q_n = Gibbs weights of the instantaneous CD energies.
enum class IrreversibleReference { transported, gibbs_cd };

/// S / beta at sample k, clamped at zero within -1e-12.
double irreversible_work(const StrokeResult& r, double beta, std::size_t k,
                         IrreversibleReference ref = IrreversibleReference::transported);

std::vector<double> irreversible_work_trace(const StrokeResult& r, double beta,
                                            IrreversibleReference ref = IrreversibleReference::transported);

/// -(w2 + w4) / q_in. Throws ValidationError for a degenerate cycle (equal
/// spectra or q_in = 0).
double efficiency_finite(const Spectrum& spec0, const Spectrum& spec_tau, double beta_h, double beta_l);

}  // namespace otto
