#include "otto/analytic4.hpp"

#include <cmath>

namespace otto {

namespace {

constexpr int kDim = 16;

int ket(const char* bits) {
  int s = 0;
  for (int k = 0; k < 4; ++k) s = 2 * s + (bits[k] == '1' ? 1 : 0);
  return s;
}

void check_four(const ChainParams& p) {
  p.validate();
  if (p.n_sites != 4) throw ValidationError("closed forms exist only for n_sites = 4");
}

/// Normalized pair (6, 7) subspace vectors:
/// u1 = (|1100> - |1001> - |0110> + |0011>)/2, u2 = (-i|1010> + i|0101>)/sqrt(2).
Vector pair_u1() {
  Vector v = Vector::Zero(kDim);
  v(ket("1100")) = 0.5;
  v(ket("1001")) = -0.5;
  v(ket("0110")) = -0.5;
  v(ket("0011")) = 0.5;
  return v;
}

Vector pair_u2() {
  Vector v = Vector::Zero(kDim);
  v(ket("1010")) = -kI / std::sqrt(2.0);
  v(ket("0101")) = kI / std::sqrt(2.0);
  return v;
}

Vector chiral_pair(double coeff, double x) {
  Vector v = Vector::Zero(kDim);
  v(ket("1100")) = coeff;
  v(ket("1010")) = -kI * x * coeff;
  v(ket("1001")) = -coeff;
  v(ket("0110")) = -coeff;
  v(ket("0101")) = kI * x * coeff;
  v(ket("0011")) = coeff;
  return v;
}

}  // namespace

double level_root4(const ChainParams& p, double d) {
  return std::sqrt(p.j1 * p.j1 + 16.0 * p.j2 * p.j2 - 8.0 * p.j1 * p.j2 + 8.0 * d * d);
}

Analytic4Coefficients coefficients4(const ChainParams& p, double d) {
  if (d == 0.0) throw ValidationError("closed-form coefficients are singular at d = 0");
  Analytic4Coefficients c;
  c.root = level_root4(p, d);
  c.mu = (4.0 * p.j2 - p.j1 - c.root) / (2.0 * d);
  c.lambda = (4.0 * p.j2 - p.j1 + c.root) / (2.0 * d);
  c.alpha = 1.0 / std::sqrt(4.0 + 2.0 * c.mu * c.mu);
  c.nu = 1.0 / std::sqrt(4.0 + 2.0 * c.lambda * c.lambda);
  return c;
}

RealVector energies4(const ChainParams& p, double d) {
  check_four(p);
  const double j1 = p.j1, j2 = p.j2, b = p.b;
  const double r = level_root4(p, d);
  RealVector e(kDim);
  e << -4 * j1 - 4 * j2 - 4 * b, 4 * j2 - 2 * b - 4 * d, 4 * j2 - 2 * b + 4 * d, 4 * j1 - 4 * j2 - 2 * b,
      -4 * j1 - 4 * j2 - 2 * b, 2 * j1 + 4 * j2 + 2 * r, 2 * j1 + 4 * j2 - 2 * r, -4 * j1 - 4 * j2,
      8 * j1 - 4 * j2, 4 * j2, 4 * j2, 4 * j2 + 2 * b + 4 * d, 4 * j2 + 2 * b - 4 * d,
      -4 * j1 - 4 * j2 + 2 * b, 4 * j1 - 4 * j2 + 2 * b, -4 * j1 - 4 * j2 + 4 * b;
  return e;
}

Eigensystem4 eigensystem4(const ChainParams& p, double d) {
  check_four(p);
  Eigensystem4 out;
  out.energies = energies4(p, d);
  Matrix& v = out.vectors;
  v = Matrix::Zero(kDim, kDim);
  const Complex i = kI;
  const double h = 0.5;

  v(ket("0000"), 0) = 1.0;

  v(ket("1000"), 1) = -i * h;
  v(ket("0100"), 1) = -h;
  v(ket("0010"), 1) = i * h;
  v(ket("0001"), 1) = h;

  v(ket("1000"), 2) = i * h;
  v(ket("0100"), 2) = -h;
  v(ket("0010"), 2) = -i * h;
  v(ket("0001"), 2) = h;

  v(ket("1000"), 3) = h;
  v(ket("0100"), 3) = -h;
  v(ket("0010"), 3) = h;
  v(ket("0001"), 3) = -h;

  for (const char* k : {"1000", "0100", "0010", "0001"}) v(ket(k), 4) = h;

  if (d != 0.0) {
    const auto c = coefficients4(p, d);
    v.col(5) = chiral_pair(c.alpha, c.mu);
    v.col(6) = chiral_pair(c.nu, c.lambda);
  } else {
    // Limit d -> 0: diagonalize H inside span{u1, u2}. The largest coefficient
    // of each vector is made real positive.
    const Vector u1 = pair_u1(), u2 = pair_u2();
    const Matrix hs = static_hamiltonian(p);
    Eigen::Matrix2cd block;
    block << u1.dot(hs * u1), u1.dot(hs * u2), u2.dot(hs * u1), u2.dot(hs * u2);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(block);
    for (int k = 0; k < 2; ++k) {
      Eigen::Vector2cd c = solver.eigenvectors().col(1 - k);  // higher level first
      const int big = std::abs(c(0)) >= std::abs(c(1)) ? 0 : 1;
      c *= std::abs(c(big)) / c(big);
      v.col(5 + k) = c(0) * u1 + c(1) * u2;
    }
  }

  const double s6 = 1.0 / std::sqrt(6.0);
  for (const char* k : {"1100", "1010", "1001", "0110", "0101", "0011"}) v(ket(k), 7) = s6;

  const double s12 = 1.0 / std::sqrt(12.0);
  v(ket("1100"), 8) = s12;
  v(ket("1010"), 8) = -2 * s12;
  v(ket("1001"), 8) = s12;
  v(ket("0110"), 8) = s12;
  v(ket("0101"), 8) = -2 * s12;
  v(ket("0011"), 8) = s12;

  const double s2 = 1.0 / std::sqrt(2.0);
  v(ket("1100"), 9) = -s2;
  v(ket("0011"), 9) = s2;
  v(ket("1001"), 10) = -s2;
  v(ket("0110"), 10) = s2;

  v(ket("1110"), 11) = i * h;
  v(ket("1101"), 11) = -h;
  v(ket("1011"), 11) = -i * h;
  v(ket("0111"), 11) = h;

  v(ket("1110"), 12) = -i * h;
  v(ket("1101"), 12) = -h;
  v(ket("1011"), 12) = i * h;
  v(ket("0111"), 12) = h;

  for (const char* k : {"1110", "1101", "1011", "0111"}) v(ket(k), 13) = h;

  v(ket("1110"), 14) = h;
  v(ket("1101"), 14) = -h;
  v(ket("1011"), 14) = h;
  v(ket("0111"), 14) = -h;

  v(ket("1111"), 15) = 1.0;
  return out;
}

double cd_amplitude4(const ChainParams& p, double d, double ddot) {
  if (ddot == 0.0) return 0.0;
  if (d == 0.0) throw ValidationError("counterdiabatic amplitude undefined at d = 0 with nonzero ddot");
  const auto c = coefficients4(p, d);
  return 4.0 * ddot * (c.lambda + c.mu) * c.alpha * c.nu / (d * (c.lambda - c.mu));
}

Matrix cd_term4(const ChainParams& p, double d, double ddot) {
  check_four(p);
  const double a = cd_amplitude4(p, d, ddot);
  if (a == 0.0) return Matrix::Zero(kDim, kDim);
  const auto sys = eigensystem4(p, d);
  const Vector& f6 = sys.vectors.col(5);
  const Vector& f7 = sys.vectors.col(6);
  return kI * a * (f6 * f7.adjoint() - f7 * f6.adjoint());
}

Eigensystem4 cd_eigensystem4(const ChainParams& p, double d, double ddot) {
  Eigensystem4 out = eigensystem4(p, d);
  const double a = cd_amplitude4(p, d, ddot);
  if (a == 0.0) return out;
  const double e6 = out.energies(5), e7 = out.energies(6);
  const double gap = e6 - e7;
  const double r = std::sqrt(4.0 * a * a + gap * gap);
  const double x_plus = (gap + r) / (2.0 * a);
  const double x_minus = -2.0 * a / (gap + r);  // (gap - r) / (2A) without cancellation
  const double c1 = 1.0 / std::sqrt(1.0 + x_plus * x_plus);
  const double c2 = 1.0 / std::sqrt(1.0 + x_minus * x_minus);
  const Vector f6 = out.vectors.col(5), f7 = out.vectors.col(6);
  out.vectors.col(5) = c1 * (kI * x_plus * f6 + f7);
  out.vectors.col(6) = c2 * (kI * x_minus * f6 + f7);
  out.energies(5) = 0.5 * (e6 + e7 + r);
  out.energies(6) = 0.5 * (e6 + e7 - r);
  return out;
}

ClosedFormWorks closed_form_works4(const ChainParams& p, double epsilon, double d0, double tau,
                                   double beta_h, double beta_l, AppendixSign sign) {
  check_four(p);
  const double shift = epsilon * tau * tau / 6.0;
  const double d1 = d0 - shift;
  const RealVector e0 = energies4(p, d0);
  const RealVector e1 = energies4(p, d1);

  auto boltzmann = [](const RealVector& e, double beta) {
    RealVector w = (-beta * (e.array() - e.minCoeff())).exp();
    return w;
  };
  const RealVector x = boltzmann(e0, beta_h);
  const RealVector y = boltzmann(e1, beta_l);
  const double z = x.sum(), zp = y.sum();

  const double r0 = level_root4(p, d0);
  const double lin = 2.0 * epsilon * tau * tau / 3.0;
  const double quad = 4.0 * epsilon * epsilon * std::pow(tau, 4) / 9.0;

  ClosedFormWorks w;
  if (sign == AppendixSign::protocol) {
    const double dr = level_root4(p, d1) - r0;
    w.w2 = (lin * (x(1) - x(2) - x(11) + x(12)) + 2.0 * dr * (x(5) - x(6))) / z;
    w.w4 = (lin * (-y(1) + y(2) + y(11) - y(12)) - 2.0 * dr * (y(5) - y(6))) / zp;
    w.w2_sq = (quad * (x(1) + x(2) + x(11) + x(12)) + 4.0 * dr * dr * (x(5) + x(6))) / z;
    w.w4_sq = (quad * (y(1) + y(2) + y(11) + y(12)) + 4.0 * dr * dr * (y(5) + y(6))) / zp;
  } else {
    const double rp = level_root4(p, d0 + shift);
    w.w2 = (lin * (x(1) - x(2) - x(11) + x(12)) - 2.0 * (rp - r0) * (x(5) - x(6))) / z;
    w.w4 = (lin * (-y(1) + y(2) + y(11) - y(12)) - 2.0 * (rp - r0) * (-y(5) + y(6))) / zp;
    w.w2_sq = (quad * (x(1) + x(2) + x(11) + x(12)) + 4.0 * (rp - r0) * (rp - r0) * (x(5) + x(6))) / z;
    w.w4_sq = (quad * (y(1) + y(2) + y(11) + y(12)) + 4.0 * (rp + r0) * (rp + r0) * (y(5) + y(6))) / zp;
  }
  const double var = w.w2_sq - w.w2 * w.w2 + w.w4_sq - w.w4 * w.w4;
  w.dw = std::sqrt(std::max(var, 0.0));
  return w;
}

}  // namespace otto
