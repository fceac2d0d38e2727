#include "figures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "otto/analytic4.hpp"
#include "otto/cli_io.hpp"
#include "otto/entanglement.hpp"
#include "otto/magnon.hpp"

namespace otto::tools {

namespace {

std::vector<double> range(double lo, double hi, double step) {
  std::vector<double> v;
  const long n = std::lround(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (long i = 0; i < n; ++i) v.push_back(lo + static_cast<double>(i) * step);
  return v;
}

CycleConfig base_config(const FigureOptions& opts) {
  CycleConfig c;
  for (const auto& [k, v] : opts.overrides) set_parameter(c, k, v);
  return c;
}

void emit_sweep(const std::string& name, const CycleConfig& base, const SweepGrid& grid, const FigureOptions& opts,
                std::ostream& os) {
  const auto rows = sweep(base, grid, opts.workers);
  RunManifest m = RunManifest::for_config("fig " + name, base, opts.si);
  for (const auto& [k, v] : grid.axes) {
    m.config += "sweep " + k + " =";
    for (double x : v) m.config += " " + format_number(x);
    m.config += "\n";
  }
  write_csv(os, m, rows);
}

void fig_work_fluctuation(const FigureOptions& o, std::ostream& os) {
  CycleConfig c = base_config(o);
  emit_sweep("work-fluctuation", c, {{{"t_hot", {20.0, 40.0}}, {"tau", range(0.5, 6.0, 0.1)}}}, o, os);
}

void fig_power_vs_tau(const FigureOptions& o, std::ostream& os) {
  CycleConfig c = base_config(o);
  emit_sweep("power-vs-tau", c, {{{"b", {0.1, 0.5, 1.0}}, {"tau", range(0.5, 6.0, 0.1)}}}, o, os);
}

void fig_irreversible_work(const FigureOptions& o, std::ostream& os) {
  const CycleConfig base = base_config(o);
  std::vector<std::vector<double>> rows;
  for (double tau : {1.0, 2.0, 2.6, 3.0, 4.6}) {
    CycleConfig c = base;
    set_parameter(c, "tau", tau);
    c.strokes = StrokeEvaluation::propagate;
    const CycleResult r = run_cycle(c);
    const DriveProtocol p = c.resolved_protocol();
    const double e = o.si ? kJoulePerEnergyUnit : 1.0;
    const double ts = o.si ? kPicosecondPerTimeUnit : 1.0;
    for (std::size_t k = 0; k < r.w_irr_trace.size(); ++k) {
      rows.push_back({tau * ts, r.w_irr_times[k] * ts, p.d(r.w_irr_times[k]), r.w_irr_trace[k] * e});
    }
  }
  write_table_csv(os, RunManifest::for_config("fig irreversible-work", base, o.si), {"tau", "t", "d", "w_irr"}, rows);
}

void fig_efficiency_vs_n(const FigureOptions& o, std::ostream& os) {
  CycleConfig c;
  c.chain.j1 = -1.0;
  c.chain.j2 = 1.0;
  c.d1 = 1.5;
  c.strokes = StrokeEvaluation::spectral;
  for (const auto& [k, v] : o.overrides) set_parameter(c, k, v);
  emit_sweep("efficiency-vs-n", c, {{{"d1", {1.5, 2.0}}, {"n_sites", {4, 6, 8, 10}}}}, o, os);
}

void fig_regime_map(const FigureOptions& o, std::ostream& os) {
  double j1 = -1.0, j2 = 1.0, t_hot = 40.0, t_cold = 10.0;
  for (const auto& [k, v] : o.overrides) {
    if (k == "j1") j1 = v;
    else if (k == "j2") j2 = v;
    else if (k == "t_hot") t_hot = v;
    else if (k == "t_cold") t_cold = v;
    else throw ValidationError("regime-map accepts j1, j2, t_hot, t_cold overrides only");
  }
  const MagnonModel m(j1, j2);
  const auto grid = range(1.0, 3.0, 0.05);
  const auto cells = regime_map(m, grid, grid, t_hot, t_cold);
  std::vector<std::vector<double>> rows;
  for (const auto& c : cells) {
    const double code = c.regime == Regime::engine ? 1.0 : c.regime == Regime::refrigerator ? -1.0 : 0.0;
    rows.push_back({c.d0, c.d1, c.regime == Regime::invalid ? std::nan("") : c.efficiency, code,
                    c.on_boundary ? 1.0 : 0.0});
  }
  CycleConfig snap;
  snap.chain.j1 = j1;
  snap.chain.j2 = j2;
  snap.t_hot = t_hot;
  snap.t_cold = t_cold;
  write_table_csv(os, RunManifest::for_config("fig regime-map", snap, false),
                  {"d0", "d1", "efficiency", "regime", "on_boundary"}, rows);
}

void fig_fluctuation_vs_n(const FigureOptions& o, std::ostream& os) {
  CycleConfig c = base_config(o);
  if (!c.d1) c.d1 = 1.5;
  c.strokes = StrokeEvaluation::spectral;
  const auto rows = sweep(c, {{{"n_sites", {4, 6, 8, 10}}}}, o.workers);
  std::vector<std::vector<double>> table;
  for (const auto& r : rows) {
    if (!r.result) throw NumericalError(r.error);
    table.push_back({static_cast<double>(r.result->n_sites), r.result->dw_ad, r.result->w2,
                     r.result->dw_ad / std::abs(r.result->w2)});
  }
  write_table_csv(os, RunManifest::for_config("fig fluctuation-vs-n", c, false), {"N", "dw_ad", "w2", "ratio"},
                  table);
}

void fig_power_vs_n(const FigureOptions& o, std::ostream& os) {
  CycleConfig c;
  set_parameter(c, "tau", 2.3);
  for (const auto& [k, v] : o.overrides) set_parameter(c, k, v);
  c.strokes = StrokeEvaluation::spectral;
  emit_sweep("power-vs-n", c, {{{"n_sites", {4, 6, 8, 10}}}}, o, os);
}

void fig_tangle_vs_d(const FigureOptions& o, std::ostream& os) {
  ChainParams p;
  double t = 5.0;
  for (const auto& [k, v] : o.overrides) {
    if (k == "j1") p.j1 = v;
    else if (k == "j2") p.j2 = v;
    else if (k == "b") p.b = v;
    else if (k == "t") t = v;
    else throw ValidationError("tangle-vs-d accepts j1, j2, b, t overrides only");
  }
  std::vector<std::vector<double>> rows;
  for (int n : {4, 6, 8}) {
    p.n_sites = n;
    for (double d : range(1.0, 4.0, 0.05)) {
      const TangleReport r = tangles(thermal_state(p, d, t), n);
      rows.push_back({static_cast<double>(n), d, r.two_tangle, r.one_tangle, r.half_entropy});
    }
  }
  CycleConfig snap;
  snap.chain = p;
  snap.t_cold = t;
  write_table_csv(os, RunManifest::for_config("fig tangle-vs-d", snap, false),
                  {"N", "d", "tau2_tangle", "tau1_tangle", "s_half"}, rows);
}

void fig_efficiency_vs_tangle(const FigureOptions& o, std::ostream& os) {
  CycleConfig c;
  c.t_hot = 10.0;
  c.t_cold = 5.0;
  c.d1 = 1.5;
  c.strokes = StrokeEvaluation::spectral;
  for (const auto& [k, v] : o.overrides) set_parameter(c, k, v);
  emit_sweep("efficiency-vs-tangle", c, {{{"b", range(0.1, 2.0, 0.1)}}}, o, os);
}

void fig_efficiency_vs_entropy(const FigureOptions& o, std::ostream& os) {
  CycleConfig c;
  c.t_cold = 10.0;
  c.d1 = 1.5;
  c.strokes = StrokeEvaluation::spectral;
  for (const auto& [k, v] : o.overrides) set_parameter(c, k, v);
  emit_sweep("efficiency-vs-entropy", c, {{{"n_sites", {4, 6, 8}}, {"t_hot", range(20.0, 40.0, 2.0)}}}, o, os);
}

void fig_cycle_hysteresis(const FigureOptions& o, std::ostream& os) {
  SelfConsistentConfig base;
  base.hot = {0.1, 40.0, true};
  base.cold = {0.1, 10.0, true};
  double d0 = 2.5, tau = 1.0;
  std::vector<double> d1s = {1.5, 2.0};
  for (const auto& [k, v] : o.overrides) {
    if (k == "d0") d0 = v;
    else if (k == "tau") tau = v;
    else if (k == "d1") d1s = {v};
    else if (k == "gamma") base.hot.gamma = base.cold.gamma = v;
    else if (k == "t_hot") base.hot.temperature = v;
    else if (k == "t_cold") base.cold.temperature = v;
    else if (k == "b") base.chain.b = v;
    else throw ValidationError("cycle-hysteresis accepts d0, d1, tau, gamma, t_hot, t_cold, b overrides only");
  }
  std::vector<std::vector<double>> rows;
  for (int mode = 0; mode < 2; ++mode) {
    for (double d1 : d1s) {
      SelfConsistentConfig c = base;
      c.mode = mode == 0 ? Thermalization::gibbs : Thermalization::lindblad;
      c.protocol = DriveProtocol::from_endpoints(d0, d1, tau);
      const LoopRecord r = run_cycle_selfconsistent(c);
      for (const auto& h : r.hysteresis) {
        rows.push_back({static_cast<double>(mode), d1, static_cast<double>(h.segment), h.t, h.d, h.polarization,
                        r.efficiency});
      }
    }
  }
  CycleConfig snap;
  snap.mode = CycleMode::lindblad;
  snap.bath = base.hot;
  snap.protocol.d0 = d0;
  snap.protocol.tau = tau;
  snap.t_hot = base.hot.temperature;
  snap.t_cold = base.cold.temperature;
  write_table_csv(os, RunManifest::for_config("fig cycle-hysteresis", snap, false),
                  {"lindblad", "d1", "segment", "t", "d", "polarization", "efficiency"}, rows);
}

using Handler = void (*)(const FigureOptions&, std::ostream&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"work-fluctuation", fig_work_fluctuation},
      {"power-vs-tau", fig_power_vs_tau},
      {"irreversible-work", fig_irreversible_work},
      {"efficiency-vs-n", fig_efficiency_vs_n},
      {"regime-map", fig_regime_map},
      {"fluctuation-vs-n", fig_fluctuation_vs_n},
      {"power-vs-n", fig_power_vs_n},
      {"tangle-vs-d", fig_tangle_vs_d},
      {"efficiency-vs-tangle", fig_efficiency_vs_tangle},
      {"efficiency-vs-entropy", fig_efficiency_vs_entropy},
      {"cycle-hysteresis", fig_cycle_hysteresis},
  };
  return h;
}

}  // namespace

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : handlers()) v.push_back(k);
    return v;
  }();
  return names;
}

void emit_figure(const std::string& name, const FigureOptions& opts, std::ostream& os) {
  const auto it = handlers().find(name);
  if (it == handlers().end()) throw ValidationError("unknown figure '" + name + "'");
  it->second(opts, os);
}

std::vector<OracleLine> run_oracle() {
  double spectrum = 0.0, overlap = 0.0, cd_term = 0.0, cd_spectrum = 0.0, works = 0.0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      ChainParams p;
      p.b = 2.0 * j / 19.0;
      const double d = 0.5 + 4.5 * i / 19.0;
      const Matrix h = ChainModel(p).hamiltonian(d);
      const Spectrum s = diagonalize(h);
      const Eigensystem4 a = eigensystem4(p, d);
      RealVector ea = a.energies;
      std::sort(ea.data(), ea.data() + ea.size());
      spectrum = std::max(spectrum, (ea - s.energies).cwiseAbs().maxCoeff());
      for (int n = 0; n < 16; ++n) {
        // weight of the closed-form vector inside the numerical eigenspace of its energy
        double w = 0.0;
        for (int m = 0; m < 16; ++m) {
          if (std::abs(s.energies(m) - a.energies(n)) < 1e-8) w += std::norm(s.vectors.col(m).dot(a.vectors.col(n)));
        }
        overlap = std::max(overlap, 1.0 - std::sqrt(w));
      }
    }
  }

  const ChainParams p;
  const ChainModel model(p);
  const DriveProtocol proto;
  for (int k = 1; k < 32; ++k) {
    const double t = proto.tau * k / 32.0;
    const double d = proto.d(t), ddot = proto.ddot(t);
    Spectrum s = diagonalize(model.hamiltonian(d));
    align_degenerate_groups(s, model.chirality());
    const Matrix h1 = cd_correction(s, ddot * model.chirality());
    cd_term = std::max(cd_term, (h1 - cd_term4(p, d, ddot)).norm());
    const Spectrum cd = diagonalize(model.hamiltonian(d) + h1);
    RealVector ea = cd_eigensystem4(p, d, ddot).energies;
    std::sort(ea.data(), ea.data() + ea.size());
    cd_spectrum = std::max(cd_spectrum, (ea - cd.energies).cwiseAbs().maxCoeff());
  }

  const auto blocks = sz_blocks(model);
  for (double tau : {0.5, 1.0, 2.0}) {
    DriveProtocol pr;
    pr.tau = tau;
    const Spectrum s0 = diagonalize(model.hamiltonian(pr.d0), blocks);
    const Spectrum s1 = track_path([&model](double x) { return model.hamiltonian(x); }, s0, pr.d0, pr.d1(), &blocks);
    const double bh = 1.0 / 40.0, bl = 1.0 / 10.0;
    const ClosedFormWorks cf = closed_form_works4(p, pr.epsilon, pr.d0, tau, bh, bl);
    const AdiabaticWorks w = adiabatic_works(s0, s1, bh, bl);
    const WorkFluctuation f = work_fluctuation(s0, s1, bh, bl);
    works = std::max({works, std::abs(cf.w2 - w.w2), std::abs(cf.w4 - w.w4), std::abs(cf.dw - f.dw_ad)});
  }

  return {{"spectrum_abs_error", spectrum, 1e-10},
          {"eigenvector_overlap_defect", overlap, 1e-9},
          {"cd_term_frobenius", cd_term, 1e-9},
          {"cd_spectrum_abs_error", cd_spectrum, 1e-9},
          {"closed_form_works_abs_error", works, 1e-10}};
}

}  // namespace otto::tools
