#include "otto/magnon.hpp"

#include <cmath>
#include <string>

#include <gsl/gsl_integration.h>

#include "otto/core.hpp"

namespace otto {

MagnonModel::MagnonModel(double j1, double j2, int nodes, bool b_uses_cos_2q)
    : j1_(j1), j2_(j2), b_cos_2q_(b_uses_cos_2q) {
  if (!std::isfinite(j1) || !std::isfinite(j2)) throw ValidationError("magnon couplings must be finite");
  if (j2 == 0.0) throw ValidationError("pitch undefined for J2 = 0");
  cos_q_ = -j1 / (4.0 * j2);
  if (std::abs(cos_q_) > 1.0) throw ValidationError("pitch undefined: |J1 / 4 J2| > 1");
  cos_2q_ = 2.0 * cos_q_ * cos_q_ - 1.0;
  if (nodes < 64) throw ValidationError("magnon quadrature needs at least 64 nodes");

  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(static_cast<size_t>(nodes));
  if (!table) throw NumericalError("could not allocate Gauss-Legendre table");
  x_.resize(nodes);
  w_.resize(nodes);
  for (int i = 0; i < nodes; ++i) gsl_integration_glfixed_point(0.0, kPi, static_cast<size_t>(i), &x_[i], &w_[i], table);
  gsl_integration_glfixed_table_free(table);
}

double MagnonModel::a_coeff(double q) const {
  return j1_ * (-2.0 * cos_q_ + (1.0 + cos_q_) * std::cos(q)) +
         j2_ * (-2.0 * cos_2q_ + (1.0 + cos_2q_) * std::cos(2.0 * q));
}

double MagnonModel::b_coeff(double q) const {
  const double j2_factor = b_cos_2q_ ? cos_2q_ - 1.0 : cos_q_ - 1.0;
  return j1_ * (cos_q_ - 1.0) * std::cos(q) + j2_ * j2_factor * std::cos(2.0 * q);
}

double MagnonModel::dispersion(double q, double d) const {
  const double a = a_coeff(q), b = b_coeff(q);
  const double disc = a * a - b * b;
  if (disc < 0.0) throw NumericalError("dispersion imaginary at q = " + std::to_string(q));
  return std::sqrt(disc) + 4.0 * d * std::sin(q);
}

std::vector<double> MagnonModel::omegas(double d) const {
  for (double q : {0.0, kPi}) {
    if (dispersion(q, d) <= 0.0) throw NumericalError("magnon instability: reduce d (omega <= 0 at q = " + std::to_string(q) + ")");
  }
  std::vector<double> om(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) {
    om[i] = dispersion(x_[i], d);
    if (om[i] <= 0.0) {
      throw NumericalError("magnon instability: reduce d (omega <= 0 at q = " + std::to_string(x_[i]) + ")");
    }
  }
  return om;
}

double MagnonModel::free_energy(double d, double t) const {
  if (!(t > 0.0)) throw ValidationError("temperature must be positive");
  const auto om = omegas(d);
  double f = 0.0;
  for (std::size_t i = 0; i < om.size(); ++i) f += w_[i] * std::log1p(-std::exp(-om[i] / t));
  return t * f;
}

double MagnonModel::internal_energy(double d, double t) const {
  if (!(t > 0.0)) throw ValidationError("temperature must be positive");
  const auto om = omegas(d);
  double u = 0.0;
  for (std::size_t i = 0; i < om.size(); ++i) u += w_[i] * om[i] / std::expm1(om[i] / t);
  return u;
}

double limit_work(const MagnonModel& m, double d0, double d1, double t) {
  return m.free_energy(d1, t) - m.free_energy(d0, t);
}

double limit_heat_in(const MagnonModel& m, double d, double t_hot, double t_cold) {
  return m.internal_energy(d, t_hot) - m.internal_energy(d, t_cold);
}

double limit_efficiency(const MagnonModel& m, double d0, double d1, double t_hot, double t_cold, WorkTemperature at) {
  const double q = limit_heat_in(m, d0, t_hot, t_cold);
  if (q == 0.0) throw ValidationError("efficiency undefined: delta Q_in = 0");
  return limit_work(m, d0, d1, at == WorkTemperature::hot ? t_hot : t_cold) / q;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::engine:
      return "engine";
    case Regime::refrigerator:
      return "refrigerator";
    case Regime::border:
      return "border";
    case Regime::invalid:
      break;
  }
  return "invalid";
}

std::vector<RegimeCell> regime_map(const MagnonModel& m, const std::vector<double>& d0_grid,
                                   const std::vector<double>& d1_grid, double t_hot, double t_cold,
                                   WorkTemperature at) {
  const std::size_t n0 = d0_grid.size(), n1 = d1_grid.size();
  std::vector<RegimeCell> cells(n0 * n1);
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      auto& c = cells[i * n1 + j];
      c.d0 = d0_grid[i];
      c.d1 = d1_grid[j];
      try {
        c.efficiency = limit_efficiency(m, c.d0, c.d1, t_hot, t_cold, at);
        c.regime = c.efficiency > 0.0 ? Regime::engine : c.efficiency < 0.0 ? Regime::refrigerator : Regime::border;
      } catch (const std::exception& e) {
        c.regime = Regime::invalid;
        c.error = e.what();
      }
    }
  }
  auto sign = [](const RegimeCell& c) {
    return c.regime == Regime::engine ? 1 : c.regime == Regime::refrigerator ? -1 : 0;
  };
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      auto& c = cells[i * n1 + j];
      if (c.regime == Regime::invalid) continue;
      if (c.regime == Regime::border) {
        c.on_boundary = true;
        continue;
      }
      const int s = sign(c);
      auto opposite = [&](std::size_t a, std::size_t b) { return sign(cells[a * n1 + b]) == -s; };
      c.on_boundary = (i > 0 && opposite(i - 1, j)) || (i + 1 < n0 && opposite(i + 1, j)) ||
                      (j > 0 && opposite(i, j - 1)) || (j + 1 < n1 && opposite(i, j + 1));
    }
  }
  return cells;
}

}  // namespace otto
