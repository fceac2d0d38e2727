#include "otto/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/SVD>

namespace otto {

namespace {

std::atomic<bool> g_verify{false};

double auto_tolerance(const RealVector& e, double requested) {
  if (requested >= 0.0) return requested;
  if (e.size() == 0) return 0.0;
  const double range = e.maxCoeff() - e.minCoeff();
  return std::max(1e-9 * range, 1e-13);
}

std::vector<int> ascending_ranks(const RealVector& e) {
  std::vector<int> order(e.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return e(a) < e(b); });
  std::vector<int> rank(e.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r);
  return rank;
}

std::vector<std::vector<int>> group_levels(const RealVector& e, double tol) {
  std::vector<int> order(e.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return e(a) < e(b); });
  std::vector<std::vector<int>> groups;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || e(order[k]) - e(order[k - 1]) >= tol) groups.emplace_back();
    groups.back().push_back(order[k]);
  }
  for (auto& g : groups) std::sort(g.begin(), g.end());
  return groups;
}

void finish(Spectrum& s, double deg_tol) {
  s.deg_tol = auto_tolerance(s.energies, deg_tol);
  s.degeneracy_groups = group_levels(s.energies, s.deg_tol);
  s.tracked_order = ascending_ranks(s.energies);
}

void require_hermitian(const Matrix& h) {
  if (h.rows() != h.cols()) throw ValidationError("diagonalize: matrix is not square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double defect = hermiticity_defect(h);
  if (defect > 1e-10 * scale) {
    throw ValidationError("diagonalize: input is not Hermitian (defect " + std::to_string(defect) + ")");
  }
}

void verify(const Matrix& h, const Spectrum& s) {
  const auto d = spectrum_defects(h, s);
  const double scale = std::max(1.0, s.energies.cwiseAbs().maxCoeff());
  if (d.residual > 1e-10 * scale || d.unitarity > 1e-10) {
    throw NumericalError("diagonalize: residual " + std::to_string(d.residual) + ", unitarity " +
                         std::to_string(d.unitarity));
  }
}

/// Sort an eigensystem into ascending energies.
Spectrum sorted_spectrum(const RealVector& e, const Matrix& v, const std::vector<int>& sector) {
  std::vector<int> order(e.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return e(a) < e(b); });
  Spectrum s;
  s.energies.resize(e.size());
  s.vectors.resize(v.rows(), v.cols());
  if (!sector.empty()) s.sector.resize(sector.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    s.energies(k) = e(order[k]);
    s.vectors.col(k) = v.col(order[k]);
    if (!sector.empty()) s.sector[k] = sector[order[k]];
  }
  return s;
}

}  // namespace

std::vector<int> Spectrum::group_of_level() const {
  std::vector<int> g(energies.size(), -1);
  for (std::size_t k = 0; k < degeneracy_groups.size(); ++k) {
    for (int l : degeneracy_groups[k]) g[l] = static_cast<int>(k);
  }
  return g;
}

void set_spectral_verification(bool on) { g_verify = on; }
bool spectral_verification() { return g_verify; }

SpectrumDefects spectrum_defects(const Matrix& h, const Spectrum& s) {
  SpectrumDefects d;
  for (int n = 0; n < s.dim(); ++n) {
    d.residual = std::max(d.residual, (h * s.vectors.col(n) - s.energies(n) * s.vectors.col(n)).norm());
  }
  const Matrix gram = s.vectors.adjoint() * s.vectors;
  d.unitarity = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  return d;
}

Spectrum diagonalize(const Matrix& h, double deg_tol) {
  require_hermitian(h);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("diagonalize: eigensolver did not converge");
  Spectrum s = sorted_spectrum(solver.eigenvalues(), solver.eigenvectors(), {});
  finish(s, deg_tol);
  if (g_verify) verify(h, s);
  return s;
}

Spectrum diagonalize(const Matrix& h, const BlockPartition& blocks, double deg_tol) {
  require_hermitian(h);
  const Eigen::Index dim = h.rows();
  std::vector<int> block_of(dim, -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (int i : blocks[b]) {
      if (i < 0 || i >= dim || block_of[i] != -1) throw ValidationError("diagonalize: malformed block partition");
      block_of[i] = static_cast<int>(b);
    }
  }
  if (std::find(block_of.begin(), block_of.end(), -1) != block_of.end()) {
    throw ValidationError("diagonalize: block partition does not cover the space");
  }
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (block_of[i] != block_of[j] && h(i, j) != Complex{}) {
        throw ValidationError("diagonalize: Hamiltonian couples distinct blocks");
      }
    }
  }

  RealVector e(dim);
  Matrix v = Matrix::Zero(dim, dim);
  std::vector<int> sector(dim);
  Eigen::Index col = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& idx = blocks[b];
    const auto m = static_cast<Eigen::Index>(idx.size());
    Matrix sub(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index c = 0; c < m; ++c) sub(a, c) = h(idx[a], idx[c]);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sub);
    if (solver.info() != Eigen::Success) throw NumericalError("diagonalize: eigensolver did not converge");
    for (Eigen::Index k = 0; k < m; ++k, ++col) {
      e(col) = solver.eigenvalues()(k);
      for (Eigen::Index a = 0; a < m; ++a) v(idx[a], col) = solver.eigenvectors()(a, k);
      sector[col] = static_cast<int>(b);
    }
  }
  Spectrum s = sorted_spectrum(e, v, sector);
  finish(s, deg_tol);
  if (g_verify) verify(h, s);
  return s;
}

Spectrum track_continuity(const Spectrum& prev, const Spectrum& cur) {
  const int dim = cur.dim();
  if (prev.dim() != dim || prev.vectors.rows() != cur.vectors.rows()) {
    throw ValidationError("track_continuity: dimension mismatch");
  }
  const bool use_sectors = !prev.sector.empty() && !cur.sector.empty();

  // Assignment units: a degeneracy group of `cur` restricted to one sector.
  std::vector<std::vector<int>> units;
  for (const auto& g : cur.degeneracy_groups) {
    if (!use_sectors) {
      units.push_back(g);
      continue;
    }
    std::vector<std::pair<int, int>> keyed;
    for (int l : g) keyed.emplace_back(cur.sector[l], l);
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t k = 0; k < keyed.size(); ++k) {
      if (k == 0 || keyed[k].first != keyed[k - 1].first) units.emplace_back();
      units.back().push_back(keyed[k].second);
    }
  }

  // ov(l, c) = <prev_l | cur_c>, computed sector by sector on the rows the
  // sector actually occupies.
  Matrix ov = Matrix::Zero(dim, dim);
  std::vector<std::vector<int>> labels_by_sector, levels_by_sector;
  if (use_sectors) {
    const int nsec = 1 + std::max(*std::max_element(prev.sector.begin(), prev.sector.end()),
                                  *std::max_element(cur.sector.begin(), cur.sector.end()));
    labels_by_sector.resize(nsec);
    levels_by_sector.resize(nsec);
    for (int l = 0; l < dim; ++l) labels_by_sector[prev.sector[l]].push_back(l);
    for (int c = 0; c < dim; ++c) levels_by_sector[cur.sector[c]].push_back(c);
    for (int sec = 0; sec < nsec; ++sec) {
      const auto& ls = labels_by_sector[sec];
      const auto& cs = levels_by_sector[sec];
      if (ls.empty() || cs.empty()) continue;
      std::vector<int> rows;
      for (Eigen::Index r = 0; r < cur.vectors.rows(); ++r) {
        bool used = false;
        for (int c : cs) used = used || cur.vectors(r, c) != Complex{};
        for (int l : ls) used = used || prev.vectors(r, l) != Complex{};
        if (used) rows.push_back(static_cast<int>(r));
      }
      const auto nr = static_cast<Eigen::Index>(rows.size());
      Matrix p(nr, static_cast<Eigen::Index>(ls.size())), q(nr, static_cast<Eigen::Index>(cs.size()));
      for (Eigen::Index r = 0; r < nr; ++r) {
        for (std::size_t a = 0; a < ls.size(); ++a) p(r, a) = prev.vectors(rows[r], ls[a]);
        for (std::size_t a = 0; a < cs.size(); ++a) q(r, a) = cur.vectors(rows[r], cs[a]);
      }
      const Matrix block = p.adjoint() * q;
      for (std::size_t a = 0; a < ls.size(); ++a)
        for (std::size_t b = 0; b < cs.size(); ++b) ov(ls[a], cs[b]) = block(a, b);
    }
  } else {
    ov.noalias() = prev.vectors.adjoint() * cur.vectors;
  }

  struct Candidate {
    double weight;
    int label;
    int unit;
  };
  std::vector<Candidate> candidates;
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& unit = units[u];
    const std::vector<int>* reach = nullptr;
    std::vector<int> all;
    if (use_sectors) {
      reach = &labels_by_sector[cur.sector[unit.front()]];
    } else {
      all.resize(dim);
      std::iota(all.begin(), all.end(), 0);
      reach = &all;
    }
    for (int l : *reach) {
      double w = 0.0;
      for (int c : unit) w += std::norm(ov(l, c));
      if (w > 1e-14) candidates.push_back({w, l, static_cast<int>(u)});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.label != b.label) return a.label < b.label;
    return a.unit < b.unit;
  });

  std::vector<int> unit_of_label(dim, -1);
  std::vector<int> capacity(units.size());
  for (std::size_t u = 0; u < units.size(); ++u) capacity[u] = static_cast<int>(units[u].size());
  std::vector<double> best_weight(dim, -1.0);
  int ambiguous = 0;
  for (const auto& c : candidates) {
    if (unit_of_label[c.label] != -1) {
      // Second-best option for an already placed label within 1e-6 of the winner.
      if (best_weight[c.label] > 1e-6 && best_weight[c.label] - c.weight < 1e-6 &&
          unit_of_label[c.label] != c.unit) {
        ++ambiguous;
        best_weight[c.label] = 2.0;  // count once
      }
      continue;
    }
    if (capacity[c.unit] == 0) continue;
    unit_of_label[c.label] = c.unit;
    best_weight[c.label] = c.weight;
    --capacity[c.unit];
  }
  // Labels with no overlap anywhere (orthogonal jumps) fill the remaining
  // slots of their sector in index order.
  for (int l = 0; l < dim; ++l) {
    if (unit_of_label[l] != -1) continue;
    for (std::size_t u = 0; u < units.size(); ++u) {
      if (capacity[u] == 0) continue;
      if (use_sectors && cur.sector[units[u].front()] != prev.sector[l]) continue;
      unit_of_label[l] = static_cast<int>(u);
      --capacity[u];
      ++ambiguous;
      break;
    }
    if (unit_of_label[l] == -1) throw NumericalError("track_continuity: incomplete level assignment");
  }

  Spectrum out;
  out.energies.resize(dim);
  out.vectors.resize(cur.vectors.rows(), dim);
  if (use_sectors) out.sector.resize(dim);
  std::vector<std::vector<int>> labels_of_unit(units.size());
  for (int l = 0; l < dim; ++l) labels_of_unit[unit_of_label[l]].push_back(l);

  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& unit = units[u];
    const auto& labels = labels_of_unit[u];
    const auto k = static_cast<Eigen::Index>(unit.size());
    Matrix basis(cur.vectors.rows(), k), target(cur.vectors.rows(), k);
    for (Eigen::Index a = 0; a < k; ++a) {
      basis.col(a) = cur.vectors.col(unit[a]);
      target.col(a) = prev.vectors.col(labels[a]);
    }
    // Unitary rotation of the unit basis closest to the previous vectors.
    const Matrix m = basis.adjoint() * target;
    Matrix rotation;
    if (k == 1) {
      const double mag = std::abs(m(0, 0));
      rotation = Matrix::Constant(1, 1, mag > 1e-300 ? m(0, 0) / mag : Complex{1.0, 0.0});
    } else {
      Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
      rotation = svd.matrixU() * svd.matrixV().adjoint();
    }
    const Matrix rotated = basis * rotation;
    for (Eigen::Index a = 0; a < k; ++a) {
      const int label = labels[a];
      out.vectors.col(label) = rotated.col(a);
      // Energies inside a group agree within deg_tol; keep each member's own value
      // when the group is a single level.
      out.energies(label) = k == 1 ? cur.energies(unit[0]) : cur.energies(unit[a]);
      if (use_sectors) out.sector[label] = cur.sector[unit[a]];
    }
    if (k > 1) {
      // Exact Rayleigh quotients for the rotated members.
      for (Eigen::Index a = 0; a < k; ++a) {
        double e = 0.0;
        for (Eigen::Index c = 0; c < k; ++c) e += std::norm(rotation(c, a)) * cur.energies(unit[c]);
        out.energies(labels[a]) = e;
      }
    }
  }
  out.deg_tol = cur.deg_tol;
  out.degeneracy_groups = group_levels(out.energies, out.deg_tol);
  out.tracked_order = ascending_ranks(out.energies);
  out.ambiguous_assignments = ambiguous;
  return out;
}

Spectrum track_path(const HamiltonianOfParameter& h, const Spectrum& start, double from, double to,
                    const BlockPartition* blocks, const PathOptions& opts) {
  if (opts.steps < 1) throw ValidationError("track_path: steps must be positive");
  auto diag = [&](double x) { return blocks ? diagonalize(h(x), *blocks) : diagonalize(h(x)); };
  auto worst_overlap = [](const Spectrum& a, const Spectrum& b) {
    double worst = 1.0;
    for (int l = 0; l < a.dim(); ++l) {
      worst = std::min(worst, std::abs(a.vectors.col(l).dot(b.vectors.col(l))));
    }
    return worst * worst;
  };

  Spectrum current = start;
  double x = from;
  const double base = (to - from) / opts.steps;
  int ambiguous = 0;
  while (std::abs(to - x) > 1e-15 * std::max(1.0, std::abs(to))) {
    double step = base;
    if (std::abs(step) > std::abs(to - x)) step = to - x;
    Spectrum next;
    for (int refine = 0;; ++refine) {
      next = track_continuity(current, diag(x + step));
      if (worst_overlap(current, next) >= opts.min_overlap || refine >= opts.max_refinements) break;
      step *= 0.5;
    }
    ambiguous += next.ambiguous_assignments;
    current = std::move(next);
    x += step;
  }
  current.ambiguous_assignments = ambiguous;
  return current;
}

RealVector gibbs_weights(const RealVector& energies, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("gibbs: beta must be finite and >= 0");
  if (energies.size() == 0) return energies;
  const double shift = energies.minCoeff();
  RealVector w = (-beta * (energies.array() - shift)).exp();
  return w / w.sum();
}

ThermalPopulations gibbs(const Spectrum& spec, double beta) {
  return {beta, gibbs_weights(spec.energies, beta)};
}

double log_partition(const RealVector& energies, double beta) {
  const double shift = energies.minCoeff();
  return -beta * shift + std::log((-beta * (energies.array() - shift)).exp().sum());
}

Matrix density_from_populations(const Spectrum& spec, const RealVector& probs) {
  return spec.vectors * probs.cast<Complex>().asDiagonal() * spec.vectors.adjoint();
}

}  // namespace otto
