#include "otto/work_stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace otto {

namespace {

void check_labels(const Spectrum& a, const Spectrum& b) {
  if (a.dim() != b.dim() || a.dim() == 0) throw ValidationError("label mismatch: spectra differ in dimension");
  if (!a.sector.empty() && !b.sector.empty() && a.sector != b.sector) {
    throw ValidationError("label mismatch: sector of some label differs between the two spectra");
  }
}

double energy_scale(const Spectrum& a, const Spectrum& b) {
  return std::max({1.0, a.energies.cwiseAbs().maxCoeff(), b.energies.cwiseAbs().maxCoeff()});
}

StrokeWork stroke_work(const RealVector& delta, const RealVector& probs, double scale) {
  StrokeWork w;
  w.mean = delta.dot(probs);
  w.mean_square = delta.cwiseAbs2().dot(probs);
  const double var = w.mean_square - w.mean * w.mean;
  if (var < -1e-12 * scale * scale) throw NumericalError("negative work variance " + std::to_string(var));
  w.std_dev = std::sqrt(std::max(var, 0.0));
  return w;
}

}  // namespace

AdiabaticWorks adiabatic_works(const Spectrum& spec0, const Spectrum& spec_tau, double beta_h, double beta_l) {
  check_labels(spec0, spec_tau);
  const RealVector p1 = gibbs_weights(spec0.energies, beta_h);
  const RealVector p3 = gibbs_weights(spec_tau.energies, beta_l);
  const RealVector delta = spec_tau.energies - spec0.energies;
  return {delta.dot(p1), -delta.dot(p3)};
}

Heats heats(const Spectrum& spec0, const Spectrum& spec_tau, double beta_h, double beta_l) {
  check_labels(spec0, spec_tau);
  const RealVector p1 = gibbs_weights(spec0.energies, beta_h);
  const RealVector p3 = gibbs_weights(spec_tau.energies, beta_l);
  Heats h;
  h.q_in = spec0.energies.dot(p1 - p3);
  h.q_out = spec_tau.energies.dot(p3 - p1);
  const auto w = adiabatic_works(spec0, spec_tau, beta_h, beta_l);
  h.balance_residual = std::abs(w.w2 + w.w4 + h.q_in + h.q_out);
  if (h.balance_residual > 1e-10 * energy_scale(spec0, spec_tau)) {
    throw NumericalError("energy balance violated by " + std::to_string(h.balance_residual));
  }
  return h;
}

double output_power(double w2, double w4, double tau2, double tau4, double tau1, double tau3) {
  if (!(tau2 > 0.0) || !(tau4 > 0.0)) throw ValidationError("stroke durations must be positive");
  if (tau1 < 0.0 || tau3 < 0.0) throw ValidationError("relaxation durations must be nonnegative");
  const double total = tau1 + tau2 + tau3 + tau4;
  if (!(total > 0.0)) throw ValidationError("total cycle duration is zero");
  return -(w2 + w4) / total;
}

WorkFluctuation work_fluctuation(const Spectrum& spec0, const Spectrum& spec_tau, double beta_h, double beta_l) {
  check_labels(spec0, spec_tau);
  const double scale = energy_scale(spec0, spec_tau);
  const RealVector delta = spec_tau.energies - spec0.energies;
  WorkFluctuation f;
  f.w2 = stroke_work(delta, gibbs_weights(spec0.energies, beta_h), scale);
  f.w4 = stroke_work(-delta, gibbs_weights(spec_tau.energies, beta_l), scale);
  const double var = f.w2.std_dev * f.w2.std_dev + f.w4.std_dev * f.w4.std_dev;
  f.dw_ad = std::sqrt(var);
  return f;
}

double total_mean_work(const StrokeResult& r, std::size_t k, double beta) {
  const auto& first = r.samples.front();
  const auto& at = r.samples.at(k);
  const RealMatrix p = transition_probabilities(r, k);
  const RealVector p0 = gibbs_weights(first.bare.energies, beta);
  double w = 0.0;
  for (int m = 0; m < p.rows(); ++m) {
    for (int n = 0; n < p.cols(); ++n) w += (at.bare.energies(n) - first.bare.energies(m)) * p(m, n) * p0(m);
  }
  return w;
}

double irreversible_work(const StrokeResult& r, double beta, std::size_t k, IrreversibleReference ref) {
  if (!(beta > 0.0)) throw ValidationError("irreversible work needs beta > 0");
  const auto& first = r.samples.front();
  const auto& at = r.samples.at(k);
  const RealVector p0 = gibbs_weights(first.bare.energies, beta);
  const RealVector q = ref == IrreversibleReference::transported ? p0 : gibbs_weights(at.cd.energies, beta);
  const RealMatrix p = cd_transition_probabilities(r, k);
  double s = 0.0;
  for (int n = 0; n < p0.size(); ++n) s += p0(n) * std::log(p0(n));
  for (int kk = 0; kk < p.rows(); ++kk) {
    for (int n = 0; n < p.cols(); ++n) s -= p0(kk) * p(kk, n) * std::log(q(n));
  }
  const double w = s / beta;
  if (w < -1e-12) throw NumericalError("negative irreversible work " + std::to_string(w));
  return std::max(w, 0.0);
}

std::vector<double> irreversible_work_trace(const StrokeResult& r, double beta, IrreversibleReference ref) {
  std::vector<double> out;
  out.reserve(r.samples.size());
  for (std::size_t k = 0; k < r.samples.size(); ++k) out.push_back(irreversible_work(r, beta, k, ref));
  return out;
}

double efficiency_finite(const Spectrum& spec0, const Spectrum& spec_tau, double beta_h, double beta_l) {
  check_labels(spec0, spec_tau);
  const double scale = energy_scale(spec0, spec_tau);
  if ((spec_tau.energies - spec0.energies).cwiseAbs().maxCoeff() <= 1e-14 * scale) {
    throw ValidationError("efficiency undefined: the two spectra coincide");
  }
  const auto w = adiabatic_works(spec0, spec_tau, beta_h, beta_l);
  const auto h = heats(spec0, spec_tau, beta_h, beta_l);
  if (std::abs(h.q_in) <= 1e-14 * scale) throw ValidationError("efficiency undefined: q_in = 0");
  return -(w.w2 + w.w4) / h.q_in;
}

}  // namespace otto
