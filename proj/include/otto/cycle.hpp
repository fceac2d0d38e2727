#pragma once

// Four-stroke Otto cycle: hot contact at d0, counterdiabatic stroke to d1,
// cold contact at d1, counterdiabatic stroke back. Gibbs mode thermalizes the
// populations exactly; Lindblad mode runs the self-consistent loop.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "otto/drive_cd.hpp"
#include "otto/lindblad.hpp"
#include "otto/work_stats.hpp"

namespace otto {

enum class CycleMode { gibbs, lindblad };

/// propagate: integrate both strokes and assert transitionless transport.
/// spectral: continue the labels along d only (no W_ir, no transport check).
/// automatic: propagate up to kMaxPropagatedSites sites.
enum class StrokeEvaluation { automatic, propagate, spectral };

inline constexpr int kMaxPropagatedSites = 6;

struct CycleConfig {
  ChainParams chain;
  DriveProtocol protocol;
  /// When set, epsilon is derived so that the stroke ends at d1.
  std::optional<double> d1;
  double t_hot = 40.0;
  double t_cold = 10.0;
  CycleMode mode = CycleMode::gibbs;
  /// gamma and dephasing of both baths; temperatures come from t_hot, t_cold.
  std::optional<BathSpec> bath;
  BathCoupling coupling = BathCoupling::collective;
  int loops_max = 50;
  std::uint64_t seed = 1;
  IrreversibleReference w_irr_reference = IrreversibleReference::transported;
  StrokeEvaluation strokes = StrokeEvaluation::automatic;
  /// Put the measured relaxation times into the power denominator (Lindblad).
  bool relax_times_in_power = false;
  StrokeOptions stroke;
  RelaxOptions relax;

  /// Throws ValidationError.
  void validate() const;
  DriveProtocol resolved_protocol() const;
  bool propagates() const;
};

struct CycleResult {
  double tau = 0.0;
  double b = 0.0;
  double t_hot = 0.0;
  double t_cold = 0.0;
  int n_sites = 0;
  double d0 = 0.0;
  double d1 = 0.0;
  double w2 = 0.0;
  double w4 = 0.0;
  double q_in = 0.0;
  double q_out = 0.0;
  double power = 0.0;
  double efficiency = 0.0;
  double dw_ad = 0.0;
  /// max_t <W_ir>(t) over the d0 -> d1 stroke; NaN without propagation.
  double w_irr_max = 0.0;
  double tau2_tangle = 0.0;
  double tau1_tangle = 0.0;
  double s_half = 0.0;

  double balance_residual = 0.0;
  bool engine = false;
  /// max |P_mn - delta_mn| over both strokes; NaN without propagation.
  double transport_defect = 0.0;
  int loops = 0;
  double loop_gap = 0.0;
  double relax_time_hot = 0.0;
  double relax_time_cold = 0.0;
  std::vector<double> w_irr_times;
  std::vector<double> w_irr_trace;
  std::vector<HysteresisPoint> hysteresis;
};

/// Propagates ValidationError / NumericalError from the modules it drives.
CycleResult run_cycle(const CycleConfig& cfg);

/// Gibbs state of H0(d) at `temperature`, computational basis.
Matrix thermal_state(const ChainParams& p, double d, double temperature);

/// Axis keys: tau, b, j1, j2, g_me, t_hot, t_cold, n_sites, d0, d1, epsilon,
/// gamma.
struct SweepGrid {
  std::vector<std::pair<std::string, std::vector<double>>> axes;

  std::size_t size() const;
};

/// Throws ValidationError for an unknown key or an invalid value.
void set_parameter(CycleConfig& cfg, const std::string& key, double value);

/// Row-major expansion, the last axis varying fastest.
std::vector<CycleConfig> expand(const CycleConfig& base, const SweepGrid& grid);

enum class FailureKind { none, validation, numerical, other };

struct SweepRow {
  CycleConfig config;
  std::optional<CycleResult> result;
  FailureKind failure = FailureKind::none;
  std::string error;
};

/// OTTO_MAX_WORKERS when set to a positive integer, else the hardware
/// concurrency.
int worker_limit();

/// Rows come back in grid order whatever the worker count.
std::vector<SweepRow> sweep(const CycleConfig& base, const SweepGrid& grid, int workers = 0);

}  // namespace otto
