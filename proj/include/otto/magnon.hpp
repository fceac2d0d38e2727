#pragma once

// Thermodynamic-limit quasiparticle model: dispersion, free energy, internal
// energy, and the engine/refrigerator map over (d0, d1).
//
//   omega_q(d) = sqrt(A(q)^2 - B(q)^2) + 4 d sin q,  cos Q = -J1 / (4 J2)
//   A(q) = J1 (-2 cos Q + (1 + cos Q) cos q) + J2 (-2 cos 2Q + (1 + cos 2Q) cos 2q)
//   B(q) = J1 (cos Q - 1) cos q + J2 (cos Q - 1) cos 2q
//
// With `b_uses_cos_2q` the J2 term of B carries (cos 2Q - 1) instead.

#include <string>
#include <vector>

namespace otto {

enum class WorkTemperature { hot, cold };

class MagnonModel {
 public:
  MagnonModel(double j1, double j2, int nodes = 256, bool b_uses_cos_2q = false);

  double j1() const { return j1_; }
  double j2() const { return j2_; }
  int nodes() const { return static_cast<int>(x_.size()); }
  double cos_pitch() const { return cos_q_; }

  double a_coeff(double q) const;
  double b_coeff(double q) const;

  /// Throws NumericalError "dispersion imaginary" when A^2 < B^2 at q.
  double dispersion(double q, double d) const;

  /// F = T int_0^pi ln(1 - e^{-omega_q / T}) dq. Throws NumericalError
  /// "magnon instability: reduce d" if omega_q <= 0 somewhere on [0, pi].
  double free_energy(double d, double t) const;

  /// U = int_0^pi omega_q / (e^{omega_q / T} - 1) dq.
  double internal_energy(double d, double t) const;

 private:
  std::vector<double> omegas(double d) const;

  double j1_, j2_;
  double cos_q_, cos_2q_;
  bool b_cos_2q_;
  std::vector<double> x_, w_;
};

/// F(d1) - F(d0) at T_H (or T_L with WorkTemperature::cold).
double limit_work(const MagnonModel& m, double d0, double d1, double t);

/// U(d, T_H) - U(d, T_L).
double limit_heat_in(const MagnonModel& m, double d, double t_hot, double t_cold);

/// delta W / delta Q_in, sign retained. Throws ValidationError if delta Q_in = 0.
double limit_efficiency(const MagnonModel& m, double d0, double d1, double t_hot, double t_cold,
                        WorkTemperature at = WorkTemperature::hot);

enum class Regime { engine, refrigerator, border, invalid };
const char* regime_name(Regime r);

struct RegimeCell {
  double d0 = 0.0;
  double d1 = 0.0;
  double efficiency = 0.0;
  Regime regime = Regime::invalid;
  /// True when a valid neighbour in the grid has the opposite sign.
  bool on_boundary = false;
  std::string error;
};

/// Cells in row-major order: index = i0 * d1_grid.size() + i1.
std::vector<RegimeCell> regime_map(const MagnonModel& m, const std::vector<double>& d0_grid,
                                   const std::vector<double>& d1_grid, double t_hot, double t_cold,
                                   WorkTemperature at = WorkTemperature::hot);

}  // namespace otto
