// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "otto/analytic4.hpp"
#include "otto/cycle.hpp"
#include "otto/entanglement.hpp"
#include "otto/magnon.hpp"

using namespace otto;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += std::string(ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<double> range(double lo, double hi, double step) {
  std::vector<double> v;
  const long n = std::lround(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (long i = 0; i < n; ++i) v.push_back(lo + static_cast<double>(i) * step);
  return v;
}

ChainParams chain(double j1, double j2, double b, int n = 4) {
  ChainParams p;
  p.j1 = j1;
  p.j2 = j2;
  p.b = b;
  p.n_sites = n;
  return p;
}

CycleConfig paper_cycle() {
  CycleConfig c;
  c.chain = chain(1.0, -1.0, 0.1);
  c.protocol.epsilon = 1.0;
  c.protocol.d0 = 2.5;
  c.protocol.tau = 2.3;
  return c;
}

std::vector<CycleResult> results(const CycleConfig& base, const SweepGrid& grid) {
  std::vector<CycleResult> out;
  for (const auto& r : sweep(base, grid)) {
    if (!r.result) throw NumericalError("sweep row failed: " + r.error);
    out.push_back(*r.result);
  }
  return out;
}

/// Closed-form label k of every numeric level, by overlap within equal energies.
std::vector<int> closed_form_labels(const Spectrum& s, const Eigensystem4& cf) {
  std::vector<int> label(16, -1);
  for (int n = 0; n < 16; ++n) {
    double best = -1.0;
    for (int k = 0; k < 16; ++k) {
      if (std::abs(cf.energies(k) - s.energies(n)) > 1e-8) continue;
      const double o = std::norm(cf.vectors.col(k).dot(s.vectors.col(n)));
      if (o > best) {
        best = o;
        label[n] = k;
      }
    }
  }
  return label;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<int> idx(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int x, int y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * static_cast<double>(i + j);
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i] / n;
    mb += rb[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// 1. Numeric spectrum and eigenspaces against the closed forms.
Outcome appendix_oracle() {
  Outcome o;
  double e_err = 0.0, ov_min = 1.0;
  for (double d : range(0.5, 5.0, 4.5 / 19)) {
    for (double b : range(0.0, 2.0, 2.0 / 19)) {
      const ChainParams p = chain(1.0, -1.0, b);
      const Spectrum s = diagonalize(ChainModel(p).hamiltonian(d));
      const Eigensystem4 cf = eigensystem4(p, d);
      RealVector e = cf.energies;
      std::sort(e.data(), e.data() + 16);
      e_err = std::max(e_err, (e - s.energies).cwiseAbs().maxCoeff());
      for (int k = 0; k < 16; ++k) {
        double w = 0.0;  // weight of Phi_k inside the numeric eigenspace at E_k
        for (int n = 0; n < 16; ++n) {
          if (std::abs(s.energies(n) - cf.energies(k)) < 1e-8) w += std::norm(s.vectors.col(n).dot(cf.vectors.col(k)));
        }
        ov_min = std::min(ov_min, std::sqrt(w));
      }
    }
  }
  o.require(e_err < 1e-10, fmt("max |E - E_cf| = %.2e over 20x20 grid", e_err));
  o.require(ov_min > 1 - 1e-9, fmt("min overlap = 1 - %.2e", 1 - ov_min));
  return o;
}

// 2. Spectral-sum CD term against the closed form along the protocol.
Outcome cd_correctness() {
  Outcome o;
  const ChainModel m(chain(1.0, -1.0, 0.1));
  DriveProtocol p;
  p.epsilon = 1.0;
  p.d0 = 2.5;
  p.tau = 2.3;
  double frob = 0.0, spec = 0.0;
  for (double t : range(0.0, p.tau, p.tau / 23)) {
    const double d = p.d(t), dd = p.ddot(t);
    Spectrum s = diagonalize(m.hamiltonian(d), sz_blocks(m));
    align_degenerate_groups(s, m.chirality());
    const Matrix h1 = cd_correction(s, dd * m.chirality());
    frob = std::max(frob, (h1 - cd_term4(m.params(), d, dd)).norm());
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.hamiltonian(d) + h1);
    RealVector e = cd_eigensystem4(m.params(), d, dd).energies;
    std::sort(e.data(), e.data() + 16);
    spec = std::max(spec, (e - es.eigenvalues()).cwiseAbs().maxCoeff());
  }
  o.require(frob < 1e-9, fmt("max Frobenius |H1 - H1_cf| = %.2e", frob));
  o.require(spec < 1e-9, fmt("max CD spectrum error = %.2e", spec));
  return o;
}

// 3. Transition probabilities under CD and bare driving.
Outcome transitionless() {
  Outcome o;
  const ChainModel m(chain(1.0, -1.0, 0.1));
  const Spectrum start = diagonalize(m.hamiltonian(2.5), sz_blocks(m));
  for (double tau : {0.5, 1.0, 2.0, 4.6}) {
    DriveProtocol p;
    p.epsilon = 1.0;
    p.d0 = 2.5;
    p.tau = tau;
    StrokeOptions so;
    so.samples = 32;
    const StrokeResult r = run_stroke(m, p, start, so);
    const RealMatrix pr = transition_probabilities(r, r.samples.size() - 1);
    const double dev = (pr - RealMatrix::Identity(16, 16)).cwiseAbs().maxCoeff();
    o.require(dev < 1e-6, fmt("tau=%.1f max|P-1| = %.1e", tau, dev));
  }
  DriveProtocol p;
  p.epsilon = 1.0;
  p.d0 = 2.5;
  p.tau = 1.0;
  StrokeOptions so;
  so.samples = 8;
  so.driving = Driving::bare;
  so.propagation.tol = 1e-12;
  const StrokeResult r = run_stroke(m, p, start, so);
  const auto label = closed_form_labels(start, eigensystem4(m.params(), 2.5));
  const int i6 = static_cast<int>(std::find(label.begin(), label.end(), 5) - label.begin());
  const int i7 = static_cast<int>(std::find(label.begin(), label.end(), 6) - label.begin());
  const double leak = transition_probabilities(r, r.samples.size() - 1)(i6, i7);
  // Recorded bare 6 -> 7 leakage at tau = 1; the midpoint integrator pins it
  // to about 1e-3 relative.
  constexpr double kBareLeak = 2.53e-9;
  o.require(leak > 1e-12, fmt("bare P_67(1) = %.4e", leak));
  o.require(std::abs(leak - kBareLeak) <= 1e-2 * kBareLeak, fmt("recorded %.4e", kBareLeak));
  return o;
}

// 4. Irreversible work over a tau sweep.
Outcome irreversible_work() {
  Outcome o;
  CycleConfig c = paper_cycle();
  c.strokes = StrokeEvaluation::propagate;
  c.stroke.samples = 32;
  const auto taus = range(0.5, 6.0, 0.1);
  const auto rs = results(c, {{{"tau", taus}}});
  double min_w = 0.0, end_w = 0.0;
  std::vector<double> peak;
  for (const auto& r : rs) {
    for (double w : r.w_irr_trace) min_w = std::min(min_w, w);
    end_w = std::max(end_w, std::abs(r.w_irr_trace.back()));
    peak.push_back(r.w_irr_max);
  }
  o.require(min_w >= 0.0, fmt("min W_ir = %.2e", min_w));
  o.require(end_w < 1e-6, fmt("max |W_ir(tau)| = %.2e", end_w));
  const auto k = static_cast<std::size_t>(std::max_element(peak.begin(), peak.end()) - peak.begin());
  const bool interior = k > 0 && k + 1 < peak.size();
  o.require(interior && std::abs(taus[k] - 2.6) <= 0.25 * 2.6,
            fmt("argmax_tau max_t W_ir = %.2f", taus[k]) + (interior ? " (interior)" : " (grid edge)"));
  return o;
}

// 5. First-law balance on random draws.
Outcome energy_balance() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int done = 0, skipped = 0;
  double worst = 0.0;
  while (done < 100) {
    CycleConfig c;
    c.chain = chain(-2 + 4 * u(rng), -2 + 4 * u(rng), 2 * u(rng));
    c.protocol.d0 = 0.3 + 3.7 * u(rng);
    c.protocol.tau = 0.3 + 4.0 * u(rng);
    c.d1 = 0.3 + 3.7 * u(rng);
    c.t_cold = 0.5 + 20 * u(rng);
    c.t_hot = c.t_cold + 40 * u(rng);
    c.strokes = StrokeEvaluation::spectral;
    try {
      c.validate();
      c.resolved_protocol().validate();
    } catch (const ValidationError&) {
      ++skipped;
      continue;
    }
    const CycleResult r = run_cycle(c);
    worst = std::max(worst, std::abs(r.w2 + r.w4 + r.q_in + r.q_out));
    ++done;
  }
  o.require(worst < 1e-12, fmt("max |w2+w4+q_in+q_out| = %.2e over %.0f draws", worst, done));
  return o;
}

// 6. Numerical works and moments against the closed forms.
Outcome closed_form_works() {
  Outcome o;
  const ChainModel m(chain(1.0, -1.0, 0.1));
  const auto blocks = sz_blocks(m);
  const double bh = 1 / 40.0, bl = 1 / 10.0;
  double proto = 0.0, lit = 0.0;
  for (double tau : {0.5, 1.0, 2.3, 4.6}) {
    const double d1 = 2.5 - tau * tau / 6.0;
    const Spectrum s0 = diagonalize(m.hamiltonian(2.5), blocks);
    const Spectrum s1 = track_path([&](double d) { return m.hamiltonian(d); }, s0, 2.5, d1, &blocks);
    const WorkFluctuation wf = work_fluctuation(s0, s1, bh, bl);
    const auto cf = closed_form_works4(m.params(), 1.0, 2.5, tau, bh, bl);
    proto = std::max({proto, std::abs(cf.w2 - wf.w2.mean), std::abs(cf.w4 - wf.w4.mean),
                      std::abs(cf.w2_sq - wf.w2.mean_square), std::abs(cf.w4_sq - wf.w4.mean_square),
                      std::abs(cf.dw - wf.dw_ad)});
    const auto ap = closed_form_works4(m.params(), 1.0, 2.5, tau, bh, bl, AppendixSign::appendix);
    const auto ref = oracle::printed_works(1.0, -1.0, 0.1, 1.0, 2.5, tau, bh, bl, 2.5 + tau * tau / 6.0, d1, true);
    lit = std::max({lit, std::abs(ap.w2 - ref.w2), std::abs(ap.w4 - ref.w4), std::abs(ap.w2_sq - ref.w2_sq),
                    std::abs(ap.w4_sq - ref.w4_sq)});
  }
  o.require(proto < 1e-10, fmt("protocol convention vs numeric: %.2e", proto));
  o.require(lit < 1e-10, fmt("printed variant vs transcription: %.2e", lit));
  return o;
}

// 7. Power against tau and B.
Outcome power_curve() {
  Outcome o;
  CycleConfig c = paper_cycle();
  c.strokes = StrokeEvaluation::spectral;
  const auto taus = range(0.5, 6.0, 0.1);
  const std::vector<double> bs = {0.1, 0.5, 1.0};
  const auto rs = results(c, {{{"b", bs}, {"tau", taus}}});
  const std::size_t nt = taus.size();
  std::vector<double> pw(nt);
  for (std::size_t i = 0; i < nt; ++i) pw[i] = rs[i].power;
  int maxima = 0;
  for (std::size_t i = 1; i + 1 < nt; ++i) maxima += pw[i] > pw[i - 1] && pw[i] >= pw[i + 1];
  const auto k = static_cast<std::size_t>(std::max_element(pw.begin(), pw.end()) - pw.begin());
  o.require(maxima == 1 && k > 0 && k + 1 < nt, fmt("%.0f interior local maxima", maxima));
  o.require(std::abs(taus[k] - 2.3) <= 0.25 * 2.3, fmt("argmax tau = %.2f", taus[k]));
  int violations = 0;
  for (std::size_t i = 0; i < nt; ++i) {
    violations += !(rs[i].power > rs[nt + i].power && rs[nt + i].power > rs[2 * nt + i].power);
  }
  o.require(violations == 0, fmt("power decreasing in B at %.0f of %.0f taus", nt - violations, nt));
  return o;
}

// 8. Fluctuation trends.
Outcome fluctuation_trends() {
  Outcome o;
  CycleConfig c = paper_cycle();
  c.strokes = StrokeEvaluation::spectral;
  const auto taus = range(0.5, 6.0, 0.1);
  const auto by_tau = results(c, {{{"t_hot", {20.0, 40.0}}, {"tau", taus}}});
  int tau_bad = 0;
  for (std::size_t i = 1; i < by_tau.size(); ++i) {
    if (i % taus.size() != 0) tau_bad += !(by_tau[i].dw_ad > by_tau[i - 1].dw_ad);
  }
  o.require(tau_bad == 0, fmt("dW_ad increasing in tau (%.0f violations)", tau_bad));

  const auto ths = range(20.0, 40.0, 5.0);
  const std::vector<double> tau_pts = {1.0, 2.3, 4.6};
  const auto by_th = results(c, {{{"tau", tau_pts}, {"t_hot", ths}}});
  int th_bad = 0;
  for (std::size_t i = 1; i < by_th.size(); ++i) {
    if (i % ths.size() != 0) th_bad += !(by_th[i].dw_ad > by_th[i - 1].dw_ad);
  }
  o.require(th_bad == 0, fmt("dW_ad increasing in T_H (%.0f of %.0f steps violate)", th_bad,
                             static_cast<double>(tau_pts.size() * (ths.size() - 1))));

  CycleConfig n = CycleConfig{};
  n.d1 = 1.5;
  n.strokes = StrokeEvaluation::spectral;
  const auto by_n = results(n, {{{"n_sites", {4, 6, 8, 10}}}});
  std::string ratios;
  bool dec = true;
  for (std::size_t i = 0; i < by_n.size(); ++i) {
    const double ratio = by_n[i].dw_ad / std::abs(by_n[i].w2);
    ratios += fmt(i ? " %.3f" : "%.3f", ratio);
    if (i) dec = dec && ratio < by_n[i - 1].dw_ad / std::abs(by_n[i - 1].w2);
  }
  o.require(dec, "dW_ad/|W2| over N=4..10: " + ratios);
  return o;
}

// 9. Efficiency saturation in N.
Outcome efficiency_saturation() {
  Outcome o;
  CycleConfig c;
  c.chain = chain(-1.0, 1.0, 0.1);
  c.protocol.d0 = 2.5;
  c.strokes = StrokeEvaluation::spectral;
  const auto rs = results(c, {{{"d1", {1.5, 2.0}}, {"n_sites", {4, 6, 8, 10}}}});
  for (std::size_t j = 0; j < 2; ++j) {
    const double e8 = rs[4 * j + 2].efficiency, e10 = rs[4 * j + 3].efficiency;
    o.require(std::abs(e8 - e10) < 0.02,
              fmt("d1=%.1f eta(8)=%.4f eta(10)=%.4f", rs[4 * j].d1, e8, e10));
  }
  return o;
}

// 10. Lindblad dynamics and the self-consistent cycle.
Outcome lindblad_suite() {
  Outcome o;
  const ChainModel m(chain(1.0, -1.0, 0.1));
  const Spectrum s = diagonalize(m.hamiltonian(2.5), sz_blocks(m));
  const BathSpec hot{0.1, 40.0, true};

  double trace = 0.0, herm = 0.0, mineig = 0.0;
  // Random populations; coherences between the dark levels |0000>, |1111>
  // would never decay and leave no stationary state to converge to.
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (auto coupling : {BathCoupling::collective, BathCoupling::local}) {
    RealVector p(16);
    for (int i = 0; i < 16; ++i) p(i) = u(rng);
    p /= p.sum();
    const RelaxationRecord r = relax(p.cast<Complex>().asDiagonal(), LindbladGenerator(s, 4, hot, coupling));
    trace = std::max(trace, r.max_trace_defect);
    herm = std::max(herm, r.max_hermiticity_defect);
    mineig = std::min(mineig, r.min_eigenvalue);
  }
  o.require(trace < 1e-8 && herm < 1e-8 && mineig > -1e-8,
            fmt("trace %.1e, hermiticity %.1e, min eigenvalue %.1e", trace, herm, mineig));

  // Stationary state reached from the Gibbs state of the other bath.
  const RealVector target = gibbs(s, 1 / 40.0).probs;
  const Matrix rho_cold = gibbs(s, 1 / 10.0).probs.cast<Complex>().asDiagonal();
  const LindbladGenerator gen(s, 4, hot);
  RelaxOptions ro;
  ro.tol = 1e-7;
  const RelaxationRecord rr = relax(rho_cold, gen, ro);
  const double fixed = gen(Matrix(target.cast<Complex>().asDiagonal())).norm();
  const double pop_err = (rr.final_populations - target).cwiseAbs().maxCoeff();
  o.require(pop_err < 1e-6, fmt("stationary vs Gibbs populations %.2e (Gibbs residual %.1e)", pop_err, fixed));

  std::vector<double> d1s = range(1.0, 2.2, 0.2);
  std::vector<LoopRecord> lind, gib;
  for (double d1 : d1s) {
    SelfConsistentConfig c;
    c.chain = m.params();
    c.protocol = DriveProtocol::from_endpoints(2.5, d1, 1.0);
    c.stroke.samples = 16;
    lind.push_back(run_cycle_selfconsistent(c));
    c.mode = Thermalization::gibbs;
    gib.push_back(run_cycle_selfconsistent(c));
  }
  const double t_relax = lind.front().relax_time_hot;
  o.require(t_relax >= 0.2 / 3 && t_relax <= 0.6, fmt("relax time at T=40: %.3f", t_relax));
  double gap = 0.0;
  for (const auto& r : lind) gap = std::max(gap, r.loop_gap);
  o.require(gap < 1e-3, fmt("max loop |dP| = %.1e", gap));
  std::size_t k = 0;
  for (std::size_t i = 0; i < lind.size(); ++i) {
    if (lind[i].efficiency > lind[k].efficiency) k = i;
  }
  const double el = lind[k].efficiency, eg = gib[k].efficiency;
  o.require(std::abs(el - 0.47) <= 0.10, fmt("best Lindblad eta %.4f at d1=%.1f", el, d1s[k]));
  o.require(eg < el && std::abs(eg - 0.23) <= 0.10, fmt("Gibbs eta there %.4f", eg));
  return o;
}

// 11. Entanglement measures.
Outcome entanglement() {
  Outcome o;
  const Vector bell = (oracle::ket("00") + oracle::ket("11")) / std::sqrt(2.0);
  const double cb = concurrence(bell * bell.adjoint());
  const double cp = concurrence(oracle::ket("01") * oracle::ket("01").adjoint());
  o.require(std::abs(cb - 1) < 1e-14 && std::abs(cp) < 1e-14, fmt("C(Bell) = %.15f, C(product) = %.1e", cb, cp));

  const ChainParams p4 = chain(1.0, -1.0, 0.1);
  int violations = 0, points = 0;
  double first_bad = NAN;
  for (double d : range(1.0, 4.0, 0.05)) {
    double prev = INFINITY;
    for (int n : {4, 6, 8}) {
      ChainParams p = p4;
      p.n_sites = n;
      const double t2 = tangles(thermal_state(p, d, 5.0), n).two_tangle;
      if (t2 > prev + 1e-12) {
        ++violations;
        if (std::isnan(first_bad)) first_bad = d;
      }
      prev = t2;
    }
    ++points;
  }
  o.require(violations == 0, fmt("tau2 non-increasing in N=4,6,8 (%.0f violations over %.0f d, first at d=%.2f)",
                                 violations, points, first_bad));

  CycleConfig c;
  c.t_hot = 10.0;
  c.t_cold = 5.0;
  c.d1 = 1.5;
  c.strokes = StrokeEvaluation::spectral;
  const auto rs = results(c, {{{"b", range(0.1, 2.0, 0.1)}}});
  std::vector<double> t2, eta;
  for (const auto& r : rs) {
    t2.push_back(r.tau2_tangle);
    eta.push_back(r.efficiency);
  }
  const double rho = spearman(t2, eta);
  o.require(rho > 0.0, fmt("Spearman(tau2, eta) over B = %.3f", rho));

  const Vector phi10 = eigensystem4(p4, 2.5).vectors.col(9);
  const double s = half_chain_entropy(phi10 * phi10.adjoint(), 4);
  o.require(std::abs(s - 1.0) < 1e-12, fmt("S_half(Phi10) = %.15f", s));
  return o;
}

// 12. Thermodynamic limit.
Outcome thermodynamic_limit() {
  Outcome o;
  const MagnonModel m(-1.0, 1.0);
  double u_err = 0.0;
  for (double t : {5.0, 10.0, 40.0}) {
    for (double d : {1.0, 2.0, 3.0}) {
      const double h = 1e-3 * t;
      const double du = -t * t * (m.free_energy(d, t + h) / (t + h) - m.free_energy(d, t - h) / (t - h)) / (2 * h);
      u_err = std::max(u_err, std::abs(m.internal_energy(d, t) - du) / std::abs(du));
    }
  }
  o.require(u_err < 1e-6, fmt("max relative |U + T^2 d(F/T)/dT| = %.1e", u_err));

  int flips = 0, pairs = 0;
  for (const auto& [a, b] : {std::pair{2.5, 1.5}, std::pair{1.2, 2.8}, std::pair{3.0, 2.9}}) {
    ++pairs;
    flips += std::signbit(limit_efficiency(m, a, b, 40.0, 10.0)) != std::signbit(limit_efficiency(m, b, a, 40.0, 10.0));
  }
  o.require(flips == pairs, fmt("eta sign flips under d0<->d1 for %.0f of %.0f pairs", flips, pairs));

  const auto grid = range(1.0, 3.0, 0.05);
  const auto cells = regime_map(m, grid, grid, 40.0, 10.0);
  const std::size_t n = grid.size();
  auto sign = [&](std::size_t i, std::size_t j) {
    const Regime r = cells[i * n + j].regime;
    return r == Regime::engine ? 1 : r == Regime::refrigerator ? -1 : 0;
  };
  int invalid = 0, multi = 0;
  for (const auto& c : cells) invalid += c.regime == Regime::invalid;
  for (std::size_t line = 0; line < n; ++line) {
    for (bool row : {true, false}) {
      int changes = 0, last = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const int s = row ? sign(line, k) : sign(k, line);
        if (s == 0) continue;
        changes += last != 0 && s != last;
        last = s;
      }
      multi += changes > 1;
    }
  }
  // Connected regions of equal sign (4-neighbour flood fill).
  std::vector<int> comp(n * n, -1);
  int regions = 0;
  for (std::size_t start = 0; start < n * n; ++start) {
    const int s = sign(start / n, start % n);
    if (s == 0 || comp[start] >= 0) continue;
    std::vector<std::size_t> stack = {start};
    comp[start] = regions;
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      const std::size_t i = c / n, j = c % n;
      const std::pair<long, long> nb[] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
      for (const auto& [di, dj] : nb) {
        const long a = static_cast<long>(i) + di, b = static_cast<long>(j) + dj;
        if (a < 0 || b < 0 || a >= static_cast<long>(n) || b >= static_cast<long>(n)) continue;
        const std::size_t k = static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b);
        if (comp[k] < 0 && sign(k / n, k % n) == s) {
          comp[k] = regions;
          stack.push_back(k);
        }
      }
    }
    ++regions;
  }
  o.require(invalid == 0 && multi == 0 && regions == 2,
            fmt("regime map on [1,3]^2: %.0f invalid cells, %.0f lines with several sign changes, %.0f regions",
                invalid, multi, regions));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"closed-form spectrum and states", appendix_oracle},
      {"counterdiabatic term and spectrum", cd_correctness},
      {"transitionless driving", transitionless},
      {"irreversible work", irreversible_work},
      {"energy balance", energy_balance},
      {"closed-form works and moments", closed_form_works},
      {"power curve", power_curve},
      {"fluctuation trends", fluctuation_trends},
      {"efficiency saturation", efficiency_saturation},
      {"Lindblad suite", lindblad_suite},
      {"entanglement", entanglement},
      {"thermodynamic limit", thermodynamic_limit},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    failed += !out.pass;
    std::printf("%s %zu %s: %s\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
