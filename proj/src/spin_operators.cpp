#include "otto/spin_operators.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <initializer_list>
#include <string>

namespace otto {

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
    }
  }
  return worst;
}

namespace {

struct PauliFactor {
  int site;
  Axis axis;
};

/// Image of a basis state under a product of single-site Paulis: one target
/// state and a phase.
std::pair<int, Complex> apply_product(std::initializer_list<PauliFactor> factors, int state, int n) {
  Complex phase{1.0, 0.0};
  for (const auto& f : factors) {
    const int mask = 1 << (n - 1 - f.site);
    const bool down = (state & mask) != 0;
    switch (f.axis) {
      case Axis::x:
        state ^= mask;
        break;
      case Axis::y:
        phase *= down ? -kI : kI;
        state ^= mask;
        break;
      case Axis::z:
        if (down) phase = -phase;
        break;
    }
  }
  return {state, phase};
}

void accumulate(Matrix& m, Complex coeff, std::initializer_list<PauliFactor> factors, int n) {
  const int dim = 1 << n;
  for (int s = 0; s < dim; ++s) {
    const auto [t, phase] = apply_product(factors, s, n);
    m(t, s) += coeff * phase;
  }
}

void check_site(int site, int n) {
  if (n < 1 || n > kMaxSites) {
    throw ValidationError("chain length " + std::to_string(n) + " outside [1, " +
                          std::to_string(kMaxSites) + "]");
  }
  if (site < 0 || site >= n) {
    throw ValidationError("site " + std::to_string(site) + " out of range for n = " +
                          std::to_string(n));
  }
}

void check_ring(int n) {
  if (n < 4 || n > kMaxSites) {
    throw ValidationError("ring length " + std::to_string(n) + " outside [4, " +
                          std::to_string(kMaxSites) + "]");
  }
}

}  // namespace

void ChainParams::validate() const {
  check_ring(n_sites);
  for (double v : {j1, j2, b, g_me}) {
    if (!std::isfinite(v)) throw ValidationError("chain couplings must be finite");
  }
}

Matrix pauli_string(int site, Axis axis, int n) {
  check_site(site, n);
  Matrix m = Matrix::Zero(1 << n, 1 << n);
  accumulate(m, 1.0, {{site, axis}}, n);
  return m;
}

Matrix static_hamiltonian(const ChainParams& p) {
  p.validate();
  const int n = p.n_sites;
  Matrix h = Matrix::Zero(p.dim(), p.dim());
  for (int i = 0; i < n; ++i) {
    for (int range : {1, 2}) {
      const int k = (i + range) % n;
      const double coupling = range == 1 ? p.j1 : p.j2;
      if (coupling == 0.0) continue;
      for (Axis a : {Axis::x, Axis::y, Axis::z}) accumulate(h, -coupling, {{i, a}, {k, a}}, n);
    }
    if (p.b != 0.0) accumulate(h, -p.b, {{i, Axis::z}}, n);
  }
  return h;
}

Matrix chirality_bond(int site, int n) {
  check_ring(n);
  check_site(site, n);
  const int next = (site + 1) % n;
  Matrix k = Matrix::Zero(1 << n, 1 << n);
  accumulate(k, 1.0, {{site, Axis::x}, {next, Axis::y}}, n);
  accumulate(k, -1.0, {{site, Axis::y}, {next, Axis::x}}, n);
  return k;
}

Matrix chirality_operator(int n) {
  check_ring(n);
  Matrix k = Matrix::Zero(1 << n, 1 << n);
  for (int i = 0; i < n; ++i) {
    accumulate(k, 1.0, {{i, Axis::x}, {(i + 1) % n, Axis::y}}, n);
    accumulate(k, -1.0, {{i, Axis::y}, {(i + 1) % n, Axis::x}}, n);
  }
  return k;
}

Matrix drive_hamiltonian(int n, double d) { return d * chirality_operator(n); }

Matrix polarization_operator(const ChainParams& p) {
  p.validate();
  return p.g_me * chirality_operator(p.n_sites);
}

std::vector<int> magnetization_of_basis(int n) {
  std::vector<int> m(static_cast<std::size_t>(1) << n);
  for (std::size_t s = 0; s < m.size(); ++s) {
    const int down = std::popcount(static_cast<unsigned>(s));
    m[s] = n - 2 * down;
  }
  return m;
}

std::vector<std::vector<int>> magnetization_sectors(int n) {
  std::vector<std::vector<int>> sectors(static_cast<std::size_t>(n) + 1);
  const int dim = 1 << n;
  for (int s = 0; s < dim; ++s) sectors[std::popcount(static_cast<unsigned>(s))].push_back(s);
  return sectors;
}

ChainModel::ChainModel(const ChainParams& p)
    : params_(p), static_(static_hamiltonian(p)), chirality_(chirality_operator(p.n_sites)) {}

}  // namespace otto
