#include "otto/cycle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "otto/entanglement.hpp"

namespace otto {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTransportTol = 1e-6;

double transport_defect(const StrokeResult& r) {
  const RealMatrix p = transition_probabilities(r, r.samples.size() - 1);
  return (p - RealMatrix::Identity(p.rows(), p.cols())).cwiseAbs().maxCoeff();
}

void fill_tangles(CycleResult& out, const Matrix& rho, int n_sites) {
  const TangleReport t = tangles(rho, n_sites);
  out.tau2_tangle = t.two_tangle;
  out.tau1_tangle = t.one_tangle;
  out.s_half = t.half_entropy;
}

/// Mean and variance of the energy-gap work for populations `p` frozen
/// through a transitionless stroke.
std::pair<double, double> stroke_moments(const RealVector& p, const RealVector& gap) {
  const double mean = p.dot(gap);
  const double var = p.dot(gap.cwiseProduct(gap)) - mean * mean;
  return {mean, var};
}

void run_gibbs(const CycleConfig& cfg, const DriveProtocol& proto, CycleResult& out) {
  const ChainModel model(cfg.chain);
  const auto blocks = sz_blocks(model);
  const Spectrum spec0 = diagonalize(model.hamiltonian(proto.d0), blocks);
  const double beta_h = 1.0 / cfg.t_hot, beta_l = 1.0 / cfg.t_cold;

  Spectrum spec1;
  if (cfg.propagates()) {
    const StrokeResult down = run_stroke(model, proto, spec0, cfg.stroke);
    spec1 = down.samples.back().bare;
    const StrokeResult up = run_stroke(model, proto.time_reversed(), spec1, cfg.stroke);
    out.transport_defect = std::max(transport_defect(down), transport_defect(up));
    if (cfg.stroke.driving == Driving::counterdiabatic && out.transport_defect > kTransportTol) {
      throw NumericalError("counterdiabatic stroke is not transitionless (defect " +
                           std::to_string(out.transport_defect) + ")");
    }
    out.w_irr_trace = irreversible_work_trace(down, beta_h, cfg.w_irr_reference);
    for (const auto& s : down.samples) out.w_irr_times.push_back(s.t);
    out.w_irr_max = *std::max_element(out.w_irr_trace.begin(), out.w_irr_trace.end());
  } else {
    PathOptions path;
    path.steps = 32;
    path.min_overlap = 0.5;
    path.max_refinements = 4;
    spec1 = track_path([&model](double d) { return model.hamiltonian(d); }, spec0, proto.d0, proto.d1(), &blocks, path);
    out.transport_defect = kNaN;
    out.w_irr_max = kNaN;
  }

  const AdiabaticWorks w = adiabatic_works(spec0, spec1, beta_h, beta_l);
  const Heats q = heats(spec0, spec1, beta_h, beta_l);
  out.w2 = w.w2;
  out.w4 = w.w4;
  out.q_in = q.q_in;
  out.q_out = q.q_out;
  out.balance_residual = q.balance_residual;
  out.dw_ad = work_fluctuation(spec0, spec1, beta_h, beta_l).dw_ad;
  out.efficiency = efficiency_finite(spec0, spec1, beta_h, beta_l);
  out.power = output_power(out.w2, out.w4, proto.tau, proto.tau);
  out.loops = 1;
  fill_tangles(out, density_from_populations(spec1, gibbs_weights(spec1.energies, beta_l)), cfg.chain.n_sites);
}

void run_lindblad(const CycleConfig& cfg, const DriveProtocol& proto, CycleResult& out) {
  SelfConsistentConfig sc;
  sc.chain = cfg.chain;
  sc.protocol = proto;
  sc.hot = *cfg.bath;
  sc.hot.temperature = cfg.t_hot;
  sc.cold = *cfg.bath;
  sc.cold.temperature = cfg.t_cold;
  sc.coupling = cfg.coupling;
  sc.mode = Thermalization::lindblad;
  sc.loops_max = cfg.loops_max;
  sc.seed = cfg.seed;
  sc.relax = cfg.relax;
  sc.stroke = cfg.stroke;
  const LoopRecord loop = run_cycle_selfconsistent(sc);

  const RealVector gap = loop.spec1.energies - loop.spec0.energies;
  const auto [m2, v2] = stroke_moments(loop.pop_hot, gap);
  const auto [m4, v4] = stroke_moments(loop.pop_cold, -gap);
  out.w2 = m2;
  out.w4 = m4;
  out.q_in = loop.heats.dq_h;
  out.q_out = loop.heats.dq_c;
  out.balance_residual = std::abs(out.w2 + out.w4 + out.q_in + out.q_out);
  const double scale = std::max(1.0, gap.cwiseAbs().maxCoeff());
  if (out.balance_residual > 1e-8 * scale) {
    throw NumericalError("Lindblad cycle energy balance off by " + std::to_string(out.balance_residual));
  }
  if (v2 + v4 < -1e-12 * scale * scale) throw NumericalError("negative work variance");
  out.dw_ad = std::sqrt(std::max(0.0, v2 + v4));
  out.efficiency = loop.efficiency;
  out.loops = loop.loops;
  out.loop_gap = loop.loop_gap;
  out.relax_time_hot = loop.relax_time_hot;
  out.relax_time_cold = loop.relax_time_cold;
  out.hysteresis = loop.hysteresis;
  out.power = cfg.relax_times_in_power
                  ? output_power(out.w2, out.w4, proto.tau, proto.tau, loop.relax_time_hot, loop.relax_time_cold)
                  : output_power(out.w2, out.w4, proto.tau, proto.tau);

  const ChainModel model(cfg.chain);
  const StrokeResult down = run_stroke(model, proto, loop.spec0, cfg.stroke);
  out.transport_defect = transport_defect(down);
  out.w_irr_trace = irreversible_work_trace(down, 1.0 / cfg.t_hot, cfg.w_irr_reference);
  for (const auto& s : down.samples) out.w_irr_times.push_back(s.t);
  out.w_irr_max = *std::max_element(out.w_irr_trace.begin(), out.w_irr_trace.end());

  fill_tangles(out, density_from_populations(loop.spec1, loop.pop_cold), cfg.chain.n_sites);
}

}  // namespace

void CycleConfig::validate() const {
  chain.validate();
  protocol.validate();
  if (!(t_cold > 0.0) || !std::isfinite(t_cold) || !std::isfinite(t_hot)) {
    throw ValidationError("temperatures must be positive and finite");
  }
  if (t_hot < t_cold) throw ValidationError("t_hot must not be below t_cold");
  if (d1 && !std::isfinite(*d1)) throw ValidationError("d1 must be finite");
  if (mode == CycleMode::lindblad) {
    if (!bath) throw ValidationError("Lindblad mode needs a bath (gamma)");
    bath->validate();
    if (chain.n_sites > kMaxLindbladSites) {
      throw ValidationError("Lindblad mode supports at most " + std::to_string(kMaxLindbladSites) + " sites");
    }
  }
  if (loops_max < 1) throw ValidationError("loops_max must be positive");
}

DriveProtocol CycleConfig::resolved_protocol() const {
  if (!d1) return protocol;
  return DriveProtocol::from_endpoints(protocol.d0, *d1, protocol.tau);
}

bool CycleConfig::propagates() const {
  switch (strokes) {
    case StrokeEvaluation::propagate:
      return true;
    case StrokeEvaluation::spectral:
      return false;
    case StrokeEvaluation::automatic:
      break;
  }
  return chain.n_sites <= kMaxPropagatedSites;
}

CycleResult run_cycle(const CycleConfig& cfg) {
  cfg.validate();
  const DriveProtocol proto = cfg.resolved_protocol();
  CycleResult out;
  out.tau = proto.tau;
  out.b = cfg.chain.b;
  out.t_hot = cfg.t_hot;
  out.t_cold = cfg.t_cold;
  out.n_sites = cfg.chain.n_sites;
  out.d0 = proto.d0;
  out.d1 = proto.d1();
  if (cfg.mode == CycleMode::gibbs) {
    run_gibbs(cfg, proto, out);
  } else {
    run_lindblad(cfg, proto, out);
  }
  out.engine = out.w2 + out.w4 < 0.0;
  return out;
}

Matrix thermal_state(const ChainParams& p, double d, double temperature) {
  if (!(temperature > 0.0)) throw ValidationError("temperature must be positive");
  const ChainModel model(p);
  const Spectrum s = diagonalize(model.hamiltonian(d), sz_blocks(model));
  return density_from_populations(s, gibbs_weights(s.energies, 1.0 / temperature));
}

std::size_t SweepGrid::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.second.size();
  return n;
}

void set_parameter(CycleConfig& cfg, const std::string& key, double value) {
  if (!std::isfinite(value)) throw ValidationError("value for '" + key + "' must be finite");
  if (key == "tau") {
    cfg.protocol.tau = value;
  } else if (key == "b") {
    cfg.chain.b = value;
  } else if (key == "j1") {
    cfg.chain.j1 = value;
  } else if (key == "j2") {
    cfg.chain.j2 = value;
  } else if (key == "g_me") {
    cfg.chain.g_me = value;
  } else if (key == "t_hot") {
    cfg.t_hot = value;
  } else if (key == "t_cold") {
    cfg.t_cold = value;
  } else if (key == "n_sites") {
    if (value != std::floor(value)) throw ValidationError("n_sites must be an integer");
    if (value < 4 || value > kMaxSites) {
      throw ValidationError("n_sites must lie in [4, " + std::to_string(kMaxSites) + "]");
    }
    cfg.chain.n_sites = static_cast<int>(value);
  } else if (key == "d0") {
    cfg.protocol.d0 = value;
  } else if (key == "d1") {
    cfg.d1 = value;
  } else if (key == "epsilon") {
    cfg.protocol.epsilon = value;
    cfg.d1.reset();
  } else if (key == "gamma") {
    if (!cfg.bath) cfg.bath = BathSpec{};
    cfg.bath->gamma = value;
  } else {
    throw ValidationError("unknown sweep parameter '" + key + "'");
  }
}

std::vector<CycleConfig> expand(const CycleConfig& base, const SweepGrid& grid) {
  std::vector<CycleConfig> out;
  const std::size_t n = grid.size();
  if (n == 0) throw ValidationError("sweep grid is empty");
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    CycleConfig c = base;
    std::size_t rest = i;
    for (std::size_t a = grid.axes.size(); a-- > 0;) {
      const auto& values = grid.axes[a].second;
      set_parameter(c, grid.axes[a].first, values[rest % values.size()]);
      rest /= values.size();
    }
    out.push_back(std::move(c));
  }
  return out;
}

int worker_limit() {
  if (const char* env = std::getenv("OTTO_MAX_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, 1024));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepRow> sweep(const CycleConfig& base, const SweepGrid& grid, int workers) {
  const auto configs = expand(base, grid);
  std::vector<SweepRow> rows(configs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) {
      SweepRow& row = rows[i];
      row.config = configs[i];
      try {
        row.result = run_cycle(configs[i]);
      } catch (const ValidationError& e) {
        row.failure = FailureKind::validation;
        row.error = e.what();
      } catch (const NumericalError& e) {
        row.failure = FailureKind::numerical;
        row.error = e.what();
      } catch (const std::exception& e) {
        row.failure = FailureKind::other;
        row.error = e.what();
      }
    }
  };
  const int limit = worker_limit();
  const int n = std::clamp(workers > 0 ? std::min(workers, limit) : limit, 1, static_cast<int>(configs.size()));
  if (n == 1) {
    work();
    return rows;
  }
  std::vector<std::thread> pool;
  for (int i = 0; i < n; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return rows;
}

}  // namespace otto
