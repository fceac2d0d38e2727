#pragma once

// Electric-field schedule, counterdiabatic Hamiltonian and time propagation
// of the adiabatic strokes.

#include <functional>
#include <vector>

#include "otto/spectral.hpp"
#include "otto/spin_operators.hpp"

namespace otto {

/// d(t) = eps (t^3 / (3 tau) - t^2 / 2) + d0 on [0, tau]. The reversed stroke
/// runs the same schedule backwards, d_rev(t) = d(tau - t).
struct DriveProtocol {
  double epsilon = 1.0;
  double d0 = 2.5;
  double tau = 1.0;
  bool reversed = false;

  /// Schedule that reaches d1 at t = tau: eps = 6 (d0 - d1) / tau^2.
  static DriveProtocol from_endpoints(double d0, double d1, double tau);

  void validate() const;
  double d(double t) const;
  double ddot(double t) const;
  /// d0 - eps tau^2 / 6, the far end of the forward stroke.
  double d1() const { return d0 - epsilon * tau * tau / 6.0; }
  /// d0 + eps tau^2 / 6, the endpoint as written in the closed-form works.
  double d1_appendix() const { return d0 + epsilon * tau * tau / 6.0; }
  double d_start() const { return reversed ? d1() : d0; }
  double d_stop() const { return reversed ? d0 : d1(); }
  DriveProtocol time_reversed() const;
};

/// Rotate every degenerate unit (group within one sector) so that `op`
/// restricted to it is diagonal.
void align_degenerate_groups(Spectrum& spec, const Matrix& op);

/// H1 = i sum_{m != n} |m><m| dH |n><n| / (E_n - E_m) over pairs in distinct
/// degeneracy groups. Throws NumericalError "degenerate CD construction
/// undefined" if dH couples two members of one group above 1e-8.
Matrix cd_correction(const Spectrum& spec, const Matrix& dh);

/// H0(d(t)) + H1(t). With `tracked` the correction is built in that basis,
/// otherwise in a freshly diagonalized one aligned to K^z.
Matrix cd_hamiltonian(const ChainModel& model, const DriveProtocol& p, double t,
                      const Spectrum* tracked = nullptr);

using TimeDependentHamiltonian = std::function<Matrix(double)>;

struct PropagationOptions {
  int min_steps = 8;
  /// Accept when doubling the step count changes 1 - |<coarse|fine>| of every
  /// final state by less than this.
  double tol = 1e-8;
  int max_doublings = 16;
};

struct Propagated {
  Matrix states;
  int steps = 0;
  double change = 0.0;
};

/// Midpoint exponential integration of i d/dt psi = H(t) psi for every column
/// of `initial`, with step doubling.
Propagated propagate(const TimeDependentHamiltonian& h, const Matrix& initial, double t0, double t1,
                     const PropagationOptions& opts = {});

enum class Driving { counterdiabatic, bare };

struct StrokeOptions {
  int samples = 64;
  Driving driving = Driving::counterdiabatic;
  PropagationOptions propagation;
};

struct StrokeSample {
  double t = 0.0;
  double d = 0.0;
  double ddot = 0.0;
  /// Eigenbasis of H0(t), labels continued from the start spectrum.
  Spectrum bare;
  /// Eigenbasis of H_CD(t), labels continued from the start spectrum.
  Spectrum cd;
  /// Column m is U(t)|Phi_m(0)>.
  Matrix states;
};

struct StrokeResult {
  DriveProtocol protocol;
  Driving driving = Driving::counterdiabatic;
  std::vector<StrokeSample> samples;
  int total_steps = 0;
};

std::vector<std::vector<int>> sz_blocks(const ChainModel& model);

/// Propagate every eigenstate of `start` (the labelled spectrum of H0 at
/// d_start) through the stroke.
StrokeResult run_stroke(const ChainModel& model, const DriveProtocol& p, const Spectrum& start,
                        const StrokeOptions& opts = {});

/// P(m, n) = |<Phi_n(t)| U(t) |Phi_m(0)>|^2 against the bare basis at sample k.
RealMatrix transition_probabilities(const StrokeResult& r, std::size_t k);

/// Same against the counterdiabatic eigenbasis, |<Psi_n(t)| U(t) |Phi_m(0)>|^2.
RealMatrix cd_transition_probabilities(const StrokeResult& r, std::size_t k);

/// min_n |<Phi_n(t)|U(t)|Phi_n(0)>| per sample.
std::vector<double> fidelity_trace(const StrokeResult& r);

}  // namespace otto
