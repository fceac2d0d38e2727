#include "otto/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace otto {

Matrix reduced_density(const Matrix& rho, const std::vector<int>& keep, int n_sites) {
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  if (rho.rows() != dim || rho.cols() != dim) throw ValidationError("reduced_density: matrix size does not match n_sites");
  if (keep.empty() || static_cast<int>(keep.size()) >= n_sites) {
    throw ValidationError("reduced_density: keep must be a nonempty proper subset");
  }
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] < 0 || keep[k] >= n_sites || (k > 0 && keep[k] <= keep[k - 1])) {
      throw ValidationError("reduced_density: keep must be increasing site indices in range");
    }
  }
  const int nk = static_cast<int>(keep.size());
  unsigned kept_mask = 0;
  for (int s : keep) kept_mask |= 1u << (n_sites - 1 - s);

  auto kept_index = [&](unsigned state) {
    unsigned idx = 0;
    for (int s : keep) idx = (idx << 1) | ((state >> (n_sites - 1 - s)) & 1u);
    return static_cast<Eigen::Index>(idx);
  };

  Matrix out = Matrix::Zero(Eigen::Index{1} << nk, Eigen::Index{1} << nk);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const unsigned ui = static_cast<unsigned>(i);
    const Eigen::Index a = kept_index(ui);
    for (Eigen::Index j = 0; j < dim; ++j) {
      const unsigned uj = static_cast<unsigned>(j);
      if ((ui & ~kept_mask) != (uj & ~kept_mask)) continue;
      out(a, kept_index(uj)) += rho(i, j);
    }
  }
  return out;
}

namespace {

void check_density(const Matrix& rho, const char* what) {
  const double defect = hermiticity_defect(rho);
  if (defect > 1e-8) throw ValidationError(std::string(what) + ": input not Hermitian");
  if (std::abs(rho.trace() - Complex{1.0, 0.0}) > 1e-8) throw ValidationError(std::string(what) + ": trace is not 1");
}

}  // namespace

double concurrence(const Matrix& rho2) {
  if (rho2.rows() != 4 || rho2.cols() != 4) throw ValidationError("concurrence: expected a 4x4 matrix");
  check_density(rho2, "concurrence");
  const Matrix h = 0.5 * (rho2 + rho2.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.eigenvalues().minCoeff() < -1e-8) throw ValidationError("concurrence: input is not positive");
  const RealVector lam = es.eigenvalues().cwiseMax(0.0);
  const Matrix root = es.eigenvectors() * lam.cwiseSqrt().cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();

  // sigma^y (x) sigma^y in the computational basis is the antidiagonal (-1, 1, 1, -1).
  Matrix yy = Matrix::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Matrix flipped = yy * h.conjugate() * yy;
  const Matrix r = root * flipped * root;
  Eigen::SelfAdjointEigenSolver<Matrix> rs(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
  RealVector ev = rs.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
  return std::max(0.0, ev(0) - ev(1) - ev(2) - ev(3));
}

double entropy_bits(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > 1e-15) s -= p * std::log2(p);
  }
  return std::max(s, 0.0);
}

double half_chain_entropy(const Matrix& rho, int n_sites) {
  std::vector<int> keep(n_sites / 2);
  for (int i = 0; i < n_sites / 2; ++i) keep[i] = i;
  return entropy_bits(reduced_density(rho, keep, n_sites));
}

TangleReport tangles(const Matrix& rho, int n_sites) {
  if (n_sites < 2) throw ValidationError("tangles: need at least two sites");
  check_density(rho, "tangles");
  TangleReport t;
  double all = 0.0;
  for (int n = 0; n < n_sites; ++n) {
    for (int m = n + 1; m < n_sites; ++m) {
      const double c = concurrence(reduced_density(rho, {n, m}, n_sites));
      t.pair_concurrences[{n, m}] = c;
      if (n == 0) t.two_tangle += c * c;
      all += 2.0 * c * c;
    }
  }
  t.two_tangle_symmetric = all / n_sites;
  const Matrix r1 = reduced_density(rho, {0}, n_sites);
  t.one_tangle = std::max(0.0, 4.0 * (r1(0, 0) * r1(1, 1) - r1(0, 1) * r1(1, 0)).real());
  t.half_entropy = half_chain_entropy(rho, n_sites);
  return t;
}

}  // namespace otto
