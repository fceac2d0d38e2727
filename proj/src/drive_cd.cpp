#include "otto/drive_cd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace otto {

DriveProtocol DriveProtocol::from_endpoints(double d0, double d1, double tau) {
  if (!(tau > 0.0)) throw ValidationError("stroke duration must be positive");
  DriveProtocol p;
  p.d0 = d0;
  p.tau = tau;
  p.epsilon = 6.0 * (d0 - d1) / (tau * tau);
  return p;
}

void DriveProtocol::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("stroke duration tau must be positive");
  if (!std::isfinite(epsilon) || !std::isfinite(d0)) throw ValidationError("drive parameters must be finite");
}

namespace {

double forward_d(const DriveProtocol& p, double t) {
  return p.epsilon * (t * t * t / (3.0 * p.tau) - t * t / 2.0) + p.d0;
}

double forward_ddot(const DriveProtocol& p, double t) { return p.epsilon * (t * t / p.tau - t); }

double check_time(const DriveProtocol& p, double t) {
  const double slack = 1e-12 * p.tau;
  if (!(t >= -slack && t <= p.tau + slack)) {
    throw ValidationError("time " + std::to_string(t) + " outside the stroke [0, " + std::to_string(p.tau) + "]");
  }
  return std::clamp(t, 0.0, p.tau);
}

}  // namespace

double DriveProtocol::d(double t) const {
  t = check_time(*this, t);
  return reversed ? forward_d(*this, tau - t) : forward_d(*this, t);
}

double DriveProtocol::ddot(double t) const {
  t = check_time(*this, t);
  return reversed ? -forward_ddot(*this, tau - t) : forward_ddot(*this, t);
}

DriveProtocol DriveProtocol::time_reversed() const {
  DriveProtocol p = *this;
  p.reversed = !reversed;
  return p;
}

namespace {

/// Degenerate groups split by sector.
std::vector<std::vector<int>> degenerate_units(const Spectrum& spec) {
  std::vector<std::vector<int>> units;
  for (const auto& g : spec.degeneracy_groups) {
    if (spec.sector.empty()) {
      units.push_back(g);
      continue;
    }
    std::vector<int> sorted = g;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [&](int a, int b) { return spec.sector[a] < spec.sector[b]; });
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      if (k == 0 || spec.sector[sorted[k]] != spec.sector[sorted[k - 1]]) units.emplace_back();
      units.back().push_back(sorted[k]);
    }
  }
  return units;
}

}  // namespace

void align_degenerate_groups(Spectrum& spec, const Matrix& op) {
  for (const auto& unit : degenerate_units(spec)) {
    if (unit.size() < 2) continue;
    const auto k = static_cast<Eigen::Index>(unit.size());
    Matrix basis(spec.vectors.rows(), k);
    for (Eigen::Index a = 0; a < k; ++a) basis.col(a) = spec.vectors.col(unit[a]);
    const Matrix projected = basis.adjoint() * op * basis;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (projected + projected.adjoint()));
    const Matrix rotated = basis * solver.eigenvectors();
    for (Eigen::Index a = 0; a < k; ++a) spec.vectors.col(unit[a]) = rotated.col(a);
  }
}

Matrix cd_correction(const Spectrum& spec, const Matrix& dh) {
  const int dim = spec.dim();
  const Matrix m = spec.vectors.adjoint() * dh * spec.vectors;
  const auto group = spec.group_of_level();
  Matrix weighted = Matrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    for (int r = 0; r < dim; ++r) {
      if (r == n) continue;
      if (group[r] == group[n]) {
        if (std::abs(m(r, n)) > 1e-8) throw NumericalError("degenerate CD construction undefined");
        continue;
      }
      weighted(r, n) = kI * m(r, n) / (spec.energies(n) - spec.energies(r));
    }
  }
  return spec.vectors * weighted * spec.vectors.adjoint();
}

std::vector<std::vector<int>> sz_blocks(const ChainModel& model) {
  auto blocks = magnetization_sectors(model.params().n_sites);
  std::erase_if(blocks, [](const std::vector<int>& b) { return b.empty(); });
  return blocks;
}

Matrix cd_hamiltonian(const ChainModel& model, const DriveProtocol& p, double t, const Spectrum* tracked) {
  const double d = p.d(t);
  const double ddot = p.ddot(t);
  Matrix h0 = model.hamiltonian(d);
  if (ddot == 0.0) return h0;
  const Matrix dh = ddot * model.chirality();
  if (tracked) return h0 + cd_correction(*tracked, dh);
  Spectrum spec = diagonalize(h0, sz_blocks(model));
  align_degenerate_groups(spec, model.chirality());
  return h0 + cd_correction(spec, dh);
}

namespace {

Matrix midpoint_run(const TimeDependentHamiltonian& h, const Matrix& initial, double t0, double t1, int steps) {
  const double dt = (t1 - t0) / steps;
  Matrix states = initial;
  for (int j = 0; j < steps; ++j) {
    const Matrix hm = h(t0 + (j + 0.5) * dt);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hm);
    if (solver.info() != Eigen::Success) throw NumericalError("propagate: eigensolver failed");
    const Vector phases = (-kI * dt * solver.eigenvalues().cast<Complex>()).array().exp();
    const Matrix& v = solver.eigenvectors();
    states = v * (phases.asDiagonal() * (v.adjoint() * states));
  }
  return states;
}

}  // namespace

Propagated propagate(const TimeDependentHamiltonian& h, const Matrix& initial, double t0, double t1,
                     const PropagationOptions& opts) {
  if (opts.min_steps < 1) throw ValidationError("propagate: min_steps must be positive");
  Propagated out;
  if (t1 == t0) {
    out.states = initial;
    return out;
  }
  int steps = opts.min_steps;
  Matrix coarse = midpoint_run(h, initial, t0, t1, steps);
  for (int k = 0; k < opts.max_doublings; ++k) {
    steps *= 2;
    Matrix fine = midpoint_run(h, initial, t0, t1, steps);
    double change = 0.0;
    for (Eigen::Index c = 0; c < fine.cols(); ++c) {
      change = std::max(change, 1.0 - std::abs(fine.col(c).dot(coarse.col(c))));
    }
    coarse = std::move(fine);
    if (change < opts.tol) {
      out.states = std::move(coarse);
      out.steps = steps;
      out.change = change;
      return out;
    }
    out.change = change;
  }
  throw NumericalError("propagate: no convergence after " + std::to_string(steps) +
                       " steps (last change " + std::to_string(out.change) + ")");
}

StrokeResult run_stroke(const ChainModel& model, const DriveProtocol& p, const Spectrum& start,
                        const StrokeOptions& opts) {
  p.validate();
  if (opts.samples < 1) throw ValidationError("run_stroke: samples must be positive");
  if (start.dim() != model.params().dim()) throw ValidationError("run_stroke: start spectrum has wrong dimension");
  const auto blocks = sz_blocks(model);

  const TimeDependentHamiltonian h_bare = [&](double t) { return model.hamiltonian(p.d(t)); };
  const TimeDependentHamiltonian h_cd = [&](double t) { return cd_hamiltonian(model, p, t); };
  const TimeDependentHamiltonian& h_drive = opts.driving == Driving::counterdiabatic ? h_cd : h_bare;
  const HamiltonianOfParameter bare_of_d = [&](double d) { return model.hamiltonian(d); };

  StrokeResult r;
  r.protocol = p;
  r.driving = opts.driving;
  r.samples.reserve(opts.samples + 1);

  StrokeSample s0;
  s0.t = 0.0;
  s0.d = p.d(0.0);
  s0.ddot = p.ddot(0.0);
  s0.bare = start;
  s0.cd = start;
  s0.states = start.vectors;
  r.samples.push_back(std::move(s0));

  PathOptions one_step;
  one_step.steps = 1;
  for (int k = 1; k <= opts.samples; ++k) {
    const StrokeSample& prev = r.samples.back();
    StrokeSample s;
    s.t = p.tau * k / opts.samples;
    s.d = p.d(s.t);
    s.ddot = p.ddot(s.t);
    s.bare = track_path(bare_of_d, prev.bare, prev.d, s.d, &blocks, one_step);
    s.cd = track_path(h_cd, prev.cd, prev.t, s.t, &blocks, one_step);
    auto step = propagate(h_drive, prev.states, prev.t, s.t, opts.propagation);
    r.total_steps += step.steps;
    s.states = std::move(step.states);
    r.samples.push_back(std::move(s));
  }
  return r;
}

RealMatrix transition_probabilities(const StrokeResult& r, std::size_t k) {
  const auto& s = r.samples.at(k);
  return (s.bare.vectors.adjoint() * s.states).cwiseAbs2().transpose();
}

RealMatrix cd_transition_probabilities(const StrokeResult& r, std::size_t k) {
  const auto& s = r.samples.at(k);
  return (s.cd.vectors.adjoint() * s.states).cwiseAbs2().transpose();
}

std::vector<double> fidelity_trace(const StrokeResult& r) {
  std::vector<double> f;
  f.reserve(r.samples.size());
  for (const auto& s : r.samples) {
    double worst = 1.0;
    for (int n = 0; n < s.bare.dim(); ++n) worst = std::min(worst, std::abs(s.bare.vectors.col(n).dot(s.states.col(n))));
    f.push_back(worst);
  }
  return f;
}

}  // namespace otto
