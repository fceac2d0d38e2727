#include "otto/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <boost/numeric/odeint.hpp>

namespace otto {

void BathSpec::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ValidationError("bath gamma must be >= 0");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw ValidationError("bath temperature must be > 0");
}

double bose(double omega, double temperature) { return 1.0 / std::expm1(omega / temperature); }

double rate(double omega, const BathSpec& bath) {
  bath.validate();
  const double j = kPi * bath.gamma;
  if (omega == 0.0) return kPi * j * bath.temperature;
  const double n = bose(std::abs(omega), bath.temperature);
  return omega > 0.0 ? kPi * j * (n + 1.0) : kPi * j * n;
}

namespace {

struct Transition {
  int op;
  int row;
  int col;
  Complex value;
  double omega;
};

struct Bin {
  double omega;
  std::vector<Transition> members;
};

/// Nonzero eigenbasis elements of every operator, grouped by Bohr frequency
/// E_col - E_row.
std::vector<Bin> bin_transitions(const Spectrum& spec, const std::vector<Matrix>& ops_eig) {
  const double scale = std::max(1.0, spec.energies.cwiseAbs().maxCoeff());
  const double tol = std::max(2.0 * spec.deg_tol, 1e-12 * scale);
  double op_scale = 0.0;
  for (const auto& op : ops_eig) op_scale = std::max(op_scale, op.cwiseAbs().maxCoeff());
  const double cutoff = 1e-13 * std::max(1.0, op_scale);

  std::vector<Transition> all;
  for (std::size_t o = 0; o < ops_eig.size(); ++o) {
    const Matrix& k = ops_eig[o];
    for (Eigen::Index n = 0; n < k.cols(); ++n) {
      for (Eigen::Index q = 0; q < k.rows(); ++q) {
        if (std::abs(k(q, n)) <= cutoff) continue;
        all.push_back({static_cast<int>(o), static_cast<int>(q), static_cast<int>(n), k(q, n),
                       spec.energies(n) - spec.energies(q)});
      }
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const Transition& a, const Transition& b) { return a.omega < b.omega; });

  std::vector<Bin> bins;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i == 0 || all[i].omega - all[i - 1].omega > tol) bins.push_back({0.0, {}});
    bins.back().members.push_back(all[i]);
  }
  for (auto& b : bins) {
    double sum = 0.0;
    bool has_zero = false;
    for (const auto& t : b.members) {
      sum += t.omega;
      has_zero = has_zero || std::abs(t.omega) <= tol;
    }
    b.omega = has_zero ? 0.0 : sum / static_cast<double>(b.members.size());
  }
  return bins;
}

Matrix to_eigenbasis(const Spectrum& spec, const Matrix& op) { return spec.vectors.adjoint() * op * spec.vectors; }

void check_sites(const Spectrum& spec, int n_sites) {
  if (n_sites < 4 || n_sites > kMaxLindbladSites) {
    throw ValidationError("Lindblad dynamics supports 4 <= n_sites <= " + std::to_string(kMaxLindbladSites));
  }
  if (spec.vectors.rows() != (Eigen::Index{1} << n_sites)) throw ValidationError("spectrum size does not match n_sites");
}

}  // namespace

std::vector<JumpFamily> jump_operators(const Spectrum& spec, int n_sites) {
  check_sites(spec, n_sites);
  std::vector<Matrix> ops;
  for (int a = 0; a < n_sites; ++a) ops.push_back(to_eigenbasis(spec, chirality_bond(a, n_sites)));
  const auto bins = bin_transitions(spec, ops);
  const Eigen::Index dim = spec.vectors.rows();
  std::vector<JumpFamily> out;
  out.reserve(bins.size());
  for (const auto& b : bins) {
    JumpFamily f;
    f.omega = b.omega;
    std::vector<Matrix> eig(n_sites, Matrix::Zero(dim, dim));
    for (const auto& t : b.members) eig[t.op](t.row, t.col) += t.value;
    for (auto& m : eig) f.per_bond.push_back(spec.vectors * m * spec.vectors.adjoint());
    out.push_back(std::move(f));
  }
  return out;
}

LindbladGenerator::LindbladGenerator(const Spectrum& spec, int n_sites, const BathSpec& bath, BathCoupling coupling)
    : energies_(spec.energies), bath_(bath) {
  bath.validate();
  check_sites(spec, n_sites);
  std::vector<Matrix> ops;
  if (coupling == BathCoupling::collective) {
    ops.push_back(to_eigenbasis(spec, chirality_operator(n_sites)));
  } else {
    for (int a = 0; a < n_sites; ++a) ops.push_back(to_eigenbasis(spec, chirality_bond(a, n_sites)));
  }
  const int dim = spec.dim();
  Matrix damping = Matrix::Zero(dim, dim);
  for (const auto& b : bin_transitions(spec, ops)) {
    if (b.omega == 0.0 && !bath.include_dephasing) continue;
    const double g = rate(b.omega, bath);
    if (g == 0.0) continue;
    for (std::size_t o = 0; o < ops.size(); ++o) {
      Channel c{b.omega, g, {}};
      for (const auto& t : b.members) {
        if (t.op == static_cast<int>(o)) c.entries.push_back({t.row, t.col, t.value});
      }
      if (c.entries.empty()) continue;
      for (const auto& e1 : c.entries) {
        for (const auto& e2 : c.entries) {
          if (e1.row == e2.row) damping(e1.col, e2.col) += g * std::conj(e1.value) * e2.value;
        }
      }
      channels_.push_back(std::move(c));
    }
  }
  damping_ = damping.sparseView(Complex{1.0, 0.0}, 1e-300);
}

void LindbladGenerator::apply(const Complex* rho_data, Complex* out_data) const {
  const int dim = this->dim();
  Eigen::Map<const Matrix> rho(rho_data, dim, dim);
  Eigen::Map<Matrix> out(out_data, dim, dim);
  for (int p = 0; p < dim; ++p) {
    for (int q = 0; q < dim; ++q) out(q, p) = -kI * (energies_(q) - energies_(p)) * rho(q, p);
  }
  out.noalias() -= damping_ * rho;
  out.noalias() -= rho * damping_;
  for (const auto& c : channels_) {
    const double two_g = 2.0 * c.rate;
    for (const auto& a : c.entries) {
      for (const auto& b : c.entries) {
        out(a.row, b.row) += two_g * a.value * rho(a.col, b.col) * std::conj(b.value);
      }
    }
  }
}

Matrix LindbladGenerator::operator()(const Matrix& rho) const {
  if (rho.rows() != dim() || rho.cols() != dim()) throw ValidationError("generator: density matrix has wrong size");
  Matrix out(dim(), dim());
  apply(rho.data(), out.data());
  return out;
}

Matrix master_rhs(const Matrix& rho, const Spectrum& spec, int n_sites, const BathSpec& bath, BathCoupling coupling) {
  return LindbladGenerator(spec, n_sites, bath, coupling)(rho);
}

double trace_distance(const Matrix& a, const Matrix& b) {
  const Matrix d = a - b;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

namespace {

RelaxationRecord relax_to(const Matrix& rho0, const LindbladGenerator& gen, const RelaxOptions& opts) {
  namespace ode = boost::numeric::odeint;
  const int dim = gen.dim();
  using State = std::vector<Complex>;
  const int samples = (opts.samples + 3) / 4 * 4;
  std::vector<double> times(samples + 1);
  for (int k = 0; k <= samples; ++k) times[k] = opts.horizon * k / samples;
  const auto system = [&gen](const State& x, State& dx, double) { gen.apply(x.data(), dx.data()); };
  const double dt0 = std::min(1e-3, opts.horizon / samples);

  auto integrate = [&](auto&& visit) {
    State x(rho0.data(), rho0.data() + rho0.size());
    auto stepper = ode::make_dense_output(opts.abs_err, opts.rel_err, ode::runge_kutta_dopri5<State>());
    std::size_t k = 0;
    ode::integrate_times(stepper, system, x, times.begin(), times.end(), dt0, [&](const State& s, double) {
      visit(k++, Eigen::Map<const Matrix>(s.data(), dim, dim));
    });
  };

  RelaxationRecord rec;
  rec.times = times;
  rec.min_eigenvalue = 1.0;
  Matrix three_quarter;
  auto inspect = [&](std::size_t k, const Matrix& rho) {
    rec.max_trace_defect = std::max(rec.max_trace_defect, std::abs(rho.trace() - Complex{1.0, 0.0}));
    rec.max_hermiticity_defect = std::max(rec.max_hermiticity_defect, hermiticity_defect(rho));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    rec.min_eigenvalue = std::min(rec.min_eigenvalue, es.eigenvalues().minCoeff());
    rec.populations.push_back(rho.diagonal().real());
    if (opts.observable) rec.observed.push_back((rho * *opts.observable).trace().real());
    if (static_cast<int>(k) == 3 * samples / 4) three_quarter = rho;
    if (static_cast<int>(k) == samples) rec.stationary = rho;
  };

  if (opts.keep_trajectory) {
    integrate([&](std::size_t k, const Matrix& rho) {
      inspect(k, rho);
      rec.trajectory.push_back(rho);
    });
    for (const auto& rho : rec.trajectory) rec.distance.push_back(trace_distance(rho, rec.stationary));
  } else {
    integrate(inspect);
    integrate([&](std::size_t, const Matrix& rho) { rec.distance.push_back(trace_distance(rho, rec.stationary)); });
  }

  if (rec.max_trace_defect > 1e-8) throw NumericalError("relax: trace drifted by " + std::to_string(rec.max_trace_defect));
  if (rec.min_eigenvalue < -1e-8) throw NumericalError("relax: negative eigenvalue " + std::to_string(rec.min_eigenvalue));

  rec.stationary_change = trace_distance(rec.stationary, three_quarter);
  rec.final_populations = rec.stationary.diagonal().real();
  rec.relax_time = opts.horizon;
  for (std::size_t k = 0; k < rec.distance.size(); ++k) {
    if (rec.distance[k] < opts.tol) {
      rec.relax_time = times[k];
      break;
    }
  }
  return rec;
}

}  // namespace

RelaxationRecord relax(const Matrix& rho0, const LindbladGenerator& gen, const RelaxOptions& opts) {
  const int dim = gen.dim();
  if (rho0.rows() != dim || rho0.cols() != dim) throw ValidationError("relax: density matrix has wrong size");
  if (hermiticity_defect(rho0) > 1e-10) throw ValidationError("relax: initial state is not Hermitian");
  if (std::abs(rho0.trace() - Complex{1.0, 0.0}) > 1e-10) throw ValidationError("relax: initial state trace is not 1");
  if (!(opts.horizon > 0.0)) throw ValidationError("relax: horizon must be positive");
  if (opts.samples < 4) throw ValidationError("relax: need at least 4 samples");
  if (opts.max_extensions < 0) throw ValidationError("relax: max_extensions must be >= 0");

  RelaxOptions o = opts;
  for (int ext = 0;; ++ext) {
    auto rec = relax_to(rho0, gen, o);
    if (rec.stationary_change <= 0.1 * opts.tol) return rec;
    if (ext == opts.max_extensions) {
      throw NumericalError("relax: no stationary state within horizon " + std::to_string(o.horizon) +
                           " (last distance " + std::to_string(rec.stationary_change) + ")");
    }
    o.horizon *= 2.0;
  }
}

CycleHeats cycle_heats(const RealVector& pop_after_hot, const RealVector& pop_initial, const RealVector& energies_d0,
                       const RealVector& pop_after_cold, const RealVector& energies_d1) {
  const auto n = pop_initial.size();
  if (pop_after_hot.size() != n || energies_d0.size() != n || pop_after_cold.size() != n || energies_d1.size() != n) {
    throw ValidationError("cycle_heats: size mismatch");
  }
  for (const RealVector* p : {&pop_after_hot, &pop_initial, &pop_after_cold}) {
    if (std::abs(p->sum() - 1.0) > 1e-10) throw ValidationError("cycle_heats: populations are not normalized");
  }
  return {energies_d0.dot(pop_after_hot - pop_initial), energies_d1.dot(pop_after_cold - pop_after_hot)};
}

namespace {

Matrix diagonal_state(const RealVector& p) { return p.cast<Complex>().asDiagonal(); }

/// <P> along a stroke for a state given in the basis of the stroke's start.
void stroke_polarization(const StrokeResult& r, const Matrix& rho_start, const Matrix& p_op, int segment,
                         std::vector<HysteresisPoint>& out) {
  for (const auto& s : r.samples) {
    const Matrix rho = s.states * rho_start * s.states.adjoint();
    out.push_back({segment, s.t, s.d, (rho * p_op).trace().real()});
  }
}

}  // namespace

LoopRecord run_cycle_selfconsistent(const SelfConsistentConfig& cfg) {
  cfg.chain.validate();
  cfg.protocol.validate();
  cfg.hot.validate();
  cfg.cold.validate();
  if (cfg.mode == Thermalization::lindblad && cfg.chain.n_sites > kMaxLindbladSites) {
    throw ValidationError("Lindblad mode supports at most " + std::to_string(kMaxLindbladSites) + " sites");
  }
  if (cfg.loops_max < 1) throw ValidationError("loops_max must be positive");

  const ChainModel model(cfg.chain);
  const auto blocks = sz_blocks(model);
  const DriveProtocol down_p = cfg.protocol.reversed ? cfg.protocol.time_reversed() : cfg.protocol;
  const Spectrum spec0 = diagonalize(model.hamiltonian(down_p.d0), blocks);
  const StrokeResult down = run_stroke(model, down_p, spec0, cfg.stroke);
  const Spectrum spec1 = down.samples.back().bare;
  const StrokeResult up = run_stroke(model, down_p.time_reversed(), spec1, cfg.stroke);
  const Matrix w_down = spec1.vectors.adjoint() * down.samples.back().states;
  const Matrix w_up = spec0.vectors.adjoint() * up.samples.back().states;
  {
    const Spectrum& back = up.samples.back().bare;
    for (int n = 0; n < spec0.dim(); ++n) {
      if (std::abs(back.vectors.col(n).dot(spec0.vectors.col(n))) < 0.99) {
        throw NumericalError("level labels do not close around the cycle");
      }
    }
  }

  const Matrix p_op = polarization_operator(cfg.chain);
  const Matrix p0_eig = spec0.vectors.adjoint() * p_op * spec0.vectors;
  const Matrix p1_eig = spec1.vectors.adjoint() * p_op * spec1.vectors;

  std::optional<LindbladGenerator> gen_hot, gen_cold;
  if (cfg.mode == Thermalization::lindblad) {
    gen_hot.emplace(spec0, cfg.chain.n_sites, cfg.hot, cfg.coupling);
    gen_cold.emplace(spec1, cfg.chain.n_sites, cfg.cold, cfg.coupling);
  }

  const int dim = spec0.dim();
  RealVector p_init;
  if (cfg.initial_populations) {
    p_init = *cfg.initial_populations;
    if (p_init.size() != dim || p_init.minCoeff() < 0.0 || std::abs(p_init.sum() - 1.0) > 1e-10) {
      throw ValidationError("initial populations must be a normalized nonnegative vector of size 2^N");
    }
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    p_init.resize(dim);
    for (int i = 0; i < dim; ++i) p_init(i) = u(rng);
    p_init /= p_init.sum();
  }

  LoopRecord rec;
  rec.spec0 = spec0;
  rec.spec1 = spec1;
  Matrix rho = diagonal_state(p_init);

  auto contact = [&](const Matrix& start, const std::optional<LindbladGenerator>& gen, const Spectrum& spec,
                     double temperature, const Matrix& p_eig, double d, int segment, double& relax_time,
                     std::vector<HysteresisPoint>& trace) -> Matrix {
    if (!gen) {
      const Matrix out = diagonal_state(gibbs_weights(spec.energies, 1.0 / temperature));
      trace.push_back({segment, 0.0, d, (start * p_eig).trace().real()});
      trace.push_back({segment, 0.0, d, (out * p_eig).trace().real()});
      relax_time = 0.0;
      return out;
    }
    RelaxOptions ro = cfg.relax;
    ro.observable = p_eig;
    const auto r = relax(start, *gen, ro);
    for (std::size_t k = 0; k < r.times.size(); ++k) trace.push_back({segment, r.times[k], d, r.observed[k]});
    relax_time = r.relax_time;
    return r.stationary;
  };

  for (int loop = 0; loop < cfg.loops_max; ++loop) {
    std::vector<HysteresisPoint> trace;
    const Matrix rho_start = rho;
    const Matrix rho_hot = contact(rho_start, gen_hot, spec0, cfg.hot.temperature, p0_eig, down_p.d0, 0,
                                   rec.relax_time_hot, trace);
    stroke_polarization(down, rho_hot, p_op, 1, trace);
    const Matrix rho_down = w_down * rho_hot * w_down.adjoint();
    const Matrix rho_cold = contact(rho_down, gen_cold, spec1, cfg.cold.temperature, p1_eig, down_p.d1(), 2,
                                    rec.relax_time_cold, trace);
    stroke_polarization(up, rho_cold, p_op, 3, trace);
    rho = w_up * rho_cold * w_up.adjoint();

    const RealVector ps = rho_start.diagonal().real();
    const RealVector ph = rho_hot.diagonal().real();
    const RealVector pd = rho_down.diagonal().real();
    const RealVector pc = rho_cold.diagonal().real();
    rec.heats = {spec0.energies.dot(ph - ps), spec1.energies.dot(pc - pd)};
    rec.efficiency = (rec.heats.dq_h + rec.heats.dq_c) / rec.heats.dq_h;
    rec.efficiency_per_loop.push_back(rec.efficiency);
    rec.pop_start = ps;
    rec.pop_hot = ph;
    rec.pop_cold = pc;
    rec.hysteresis = std::move(trace);
    rec.loop_gap = std::abs((rho * p0_eig).trace().real() - (rho_start * p0_eig).trace().real());
    rec.population_change = (rho.diagonal().real() - ps).cwiseAbs().maxCoeff();
    rec.loops = loop + 1;
    if (rec.population_change < cfg.tol) {
      rec.converged = true;
      return rec;
    }
  }
  throw NumericalError("self-consistent cycle did not converge in " + std::to_string(cfg.loops_max) +
                       " loops (population change " + std::to_string(rec.population_change) + ")");
}

}  // namespace otto
