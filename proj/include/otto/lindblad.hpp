#pragma once

// Secular Lindblad dynamics of the ring coupled to a phonon bath through the
// bond chiralities, and the self-consistent Otto loop built on it.
//
// Density matrices handled here are expressed in the eigenbasis of the
// Spectrum they are paired with (rho_qp = <q|rho|p>), unless stated otherwise.
//
// Generator, for Bohr frequencies w = E_n - E_q binned with the degeneracy
// tolerance:
//   d rho/dt = -i [E, rho] + sum_w g(w) (2 L_w rho L_w^+ - {L_w^+ L_w, rho})
//   L_w = sum_{E_n - E_q = w} |q><q| K |n><n|
// with K = sum_a K_a (collective, the double site sum of the master equation)
// or one independent set per bond K_a (local).

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Sparse>

#include "otto/drive_cd.hpp"
#include "otto/spectral.hpp"
#include "otto/spin_operators.hpp"

namespace otto {

inline constexpr int kMaxLindbladSites = 8;

struct BathSpec {
  double gamma = 0.1;
  double temperature = 40.0;
  /// Keep the w = 0 channel (rate pi^2 gamma T).
  bool include_dephasing = true;

  void validate() const;
};

enum class BathCoupling { collective, local };

/// 1 / (e^{w/T} - 1)
double bose(double omega, double temperature);

/// pi J (n_B(|w|) + 1) for w > 0, pi J n_B(|w|) for w < 0, pi J T at w = 0,
/// with J = pi gamma.
double rate(double omega, const BathSpec& bath);

struct JumpFamily {
  double omega = 0.0;
  /// One operator per bond, computational basis: sum over the bin of
  /// Pi(E_q) K_a Pi(E_n).
  std::vector<Matrix> per_bond;
};

/// All nonzero Bohr-frequency components of every bond chirality, sorted by
/// omega.
std::vector<JumpFamily> jump_operators(const Spectrum& spec, int n_sites);

class LindbladGenerator {
 public:
  LindbladGenerator(const Spectrum& spec, int n_sites, const BathSpec& bath,
                    BathCoupling coupling = BathCoupling::collective);

  int dim() const { return static_cast<int>(energies_.size()); }
  const RealVector& energies() const { return energies_; }
  const BathSpec& bath() const { return bath_; }
  std::size_t channel_count() const { return channels_.size(); }

  /// out = L(rho); both dim x dim column-major buffers.
  void apply(const Complex* rho, Complex* out) const;
  Matrix operator()(const Matrix& rho) const;

 private:
  struct Entry {
    int row;
    int col;
    Complex value;
  };
  struct Channel {
    double omega;
    double rate;
    std::vector<Entry> entries;
  };
  RealVector energies_;
  BathSpec bath_;
  std::vector<Channel> channels_;
  Eigen::SparseMatrix<Complex> damping_;  // sum_w g(w) L_w^+ L_w
};

Matrix master_rhs(const Matrix& rho, const Spectrum& spec, int n_sites, const BathSpec& bath,
                  BathCoupling coupling = BathCoupling::collective);

/// Trace norm of a Hermitian matrix.
double trace_distance(const Matrix& a, const Matrix& b);

struct RelaxOptions {
  double horizon = 2.0;
  /// relax_time is the first sampled time with |rho(t) - rho_stat|_1 < tol.
  double tol = 1e-4;
  int samples = 400;
  /// Horizon doublings allowed when the state is still moving at the horizon.
  int max_extensions = 5;
  double abs_err = 1e-12;
  double rel_err = 1e-10;
  bool keep_trajectory = true;
  /// Expectation value recorded at every sample when set (eigenbasis).
  std::optional<Matrix> observable;
};

struct RelaxationRecord {
  std::vector<double> times;
  std::vector<Matrix> trajectory;
  std::vector<RealVector> populations;
  std::vector<double> distance;
  std::vector<double> observed;
  Matrix stationary;
  RealVector final_populations;
  double relax_time = 0.0;
  /// |rho(horizon) - rho(3 horizon / 4)|_1
  double stationary_change = 0.0;
  double max_trace_defect = 0.0;
  double max_hermiticity_defect = 0.0;
  double min_eigenvalue = 0.0;
};

/// Integrates from rho0 to the horizon (adaptive Dormand-Prince). The state at
/// the horizon is the stationary estimate. While it still moves by more than
/// tol / 10 over the last quarter the horizon is doubled, up to max_extensions
/// times, then NumericalError carries the last distance. Trace or positivity
/// drift beyond 1e-8 also throws.
RelaxationRecord relax(const Matrix& rho0, const LindbladGenerator& gen, const RelaxOptions& opts = {});

struct CycleHeats {
  double dq_h = 0.0;
  double dq_c = 0.0;
};

/// dQ_H = E(d0).(p_hot - p_initial), dQ_C = E(d1).(p_cold - p_hot).
CycleHeats cycle_heats(const RealVector& pop_after_hot, const RealVector& pop_initial, const RealVector& energies_d0,
                       const RealVector& pop_after_cold, const RealVector& energies_d1);

enum class Thermalization { lindblad, gibbs };

struct SelfConsistentConfig {
  ChainParams chain;
  DriveProtocol protocol;  // forward stroke d0 -> d1
  BathSpec hot{0.1, 40.0, true};
  BathSpec cold{0.1, 10.0, true};
  BathCoupling coupling = BathCoupling::collective;
  Thermalization mode = Thermalization::lindblad;
  int loops_max = 50;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  /// Initial level populations at d0; random (from seed) when absent.
  std::optional<RealVector> initial_populations;
  RelaxOptions relax;
  StrokeOptions stroke;
};

struct HysteresisPoint {
  /// 0 hot contact, 1 stroke d0 -> d1, 2 cold contact, 3 stroke d1 -> d0.
  int segment = 0;
  double t = 0.0;
  double d = 0.0;
  double polarization = 0.0;
};

struct LoopRecord {
  int loops = 0;
  bool converged = false;
  double population_change = 0.0;
  CycleHeats heats;
  double efficiency = 0.0;
  std::vector<double> efficiency_per_loop;
  RealVector pop_start;
  RealVector pop_hot;
  RealVector pop_cold;
  double relax_time_hot = 0.0;
  double relax_time_cold = 0.0;
  /// Final loop only.
  std::vector<HysteresisPoint> hysteresis;
  /// |<P> at the end of the final loop - <P> at its start|
  double loop_gap = 0.0;
  Spectrum spec0;
  Spectrum spec1;
};

/// Hot contact at d0, stroke to d1, cold contact at d1, stroke back, repeated
/// until the start-of-loop populations change by less than tol.
LoopRecord run_cycle_selfconsistent(const SelfConsistentConfig& cfg);

}  // namespace otto
