#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "sescap/contour.hpp"
#include "sescap/grid.hpp"
#include "sescap/potential.hpp"

namespace sescap {

/// Reflection-free CAP  V0 + V1 d/dx + V2 d^2/dx^2  sampled on a grid, plus
/// the potential correction  dV = V(F(x)) - V(x)  kept as its own array.
/// hbar = 1; all three coefficients scale as 1/mass.
struct CapOperator {
  GridSpec grid;
  CVector v0;
  CVector v1;
  CVector v2;
  CVector delta_v;
  double mass = 1.0;
};

struct CapCoefficients {
  cplx v0;
  cplx v1;
  cplx v2;
};

/// Pointwise CAP coefficients from the contour derivatives:
///   V0 = (F''' - 5 F''^2 / (2 F')) / (4 M F'^3)
///   V1 = F'' / (M F'^3)
///   V2 = (1 - F'^-2) / (2 M)
inline CapCoefficients cap_coefficients(const ContourPoint& c, double mass) {
  const cplx f1_3 = c.F1 * c.F1 * c.F1;
  return CapCoefficients{
      (c.F3 - 2.5 * c.F2 * c.F2 / c.F1) / (4.0 * mass * f1_3),
      c.F2 / (mass * f1_3),
      (1.0 - 1.0 / (c.F1 * c.F1)) / (2.0 * mass),
  };
}

inline CapOperator build_rf_cap(const ContourParams& contour, const GridSpec& grid, double mass = 1.0) {
  validate_contour(contour, grid.box_length);
  require(std::isfinite(mass) && mass > 0.0, "cap: mass must be positive");
  const int n = grid.n_points;
  CapOperator cap{grid, CVector(n), CVector(n), CVector(n), CVector::Zero(n), mass};
  for (int j = 0; j < n; ++j) {
    const CapCoefficients c = cap_coefficients(contour_eval(contour, grid.x(j)), mass);
    cap.v0[j] = c.v0;
    cap.v1[j] = c.v1;
    cap.v2[j] = c.v2;
  }
  return cap;
}

/// dV_j = V(F(x_j)) - V(x_j). Throws NumericalError naming the first grid
/// point where the continued potential is non-finite or exceeds `bound`.
inline CVector build_delta_v(const PotentialModel& potential, const ContourParams& contour,
                             const GridSpec& grid,
                             double bound = std::numeric_limits<double>::infinity()) {
  validate_contour(contour, grid.box_length);
  CVector dv(grid.n_points);
  for (int j = 0; j < grid.n_points; ++j) {
    const double x = grid.x(j);
    const cplx value = potential(contour_eval(contour, x).F) - potential(cplx{x, 0.0});
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()) || std::abs(value) > bound) {
      throw NumericalError("delta_v: potential overflow on the complex contour at grid point j=" +
                           std::to_string(j) + " (x=" + std::to_string(x) + ")");
    }
    dv[j] = value;
  }
  return dv;
}

/// (v0 + dV) psi + v1 psi' + v2 psi'' with spectral derivatives.
inline CVector apply_cap(const CapOperator& cap, const WavepacketState& state) {
  require(cap.grid == state.grid, "apply_cap: CAP and state live on different grids");
  const CVector d1 = spectral_derivative(state, 1);
  const CVector d2 = spectral_derivative(state, 2);
  return (cap.v0 + cap.delta_v).cwiseProduct(state.amplitudes) + cap.v1.cwiseProduct(d1) +
         cap.v2.cwiseProduct(d2);
}

/// Two-sided polynomial absorber  -i lambda (|x| - x0)^n  for |x| >= x0.
struct MonomialCap {
  double strength = 0.0;
  double x0 = 90.0;
  int order = 2;
};

inline cplx monomial_cap_value(const MonomialCap& m, double x) {
  const double r = std::abs(x);
  if (r < m.x0) return cplx{0.0};
  return cplx{0.0, -m.strength * std::pow(r - m.x0, m.order)};
}

inline void validate_monomial(const MonomialCap& m, double box_length) {
  require(m.order >= 1 && m.order <= 8, "monomial cap: order must be in 1..8");
  require(std::isfinite(m.x0) && m.x0 >= 0.0 && m.x0 < 0.5 * box_length,
          "monomial cap: x0 must satisfy 0 <= x0 < L/2");
  require(std::isfinite(m.strength) && m.strength >= 0.0, "monomial cap: strength must be >= 0");
}

inline CVector build_monomial_cap(double strength, double x0, int order, const GridSpec& grid) {
  const MonomialCap m{strength, x0, order};
  validate_monomial(m, grid.box_length);
  CVector out(grid.n_points);
  for (int j = 0; j < grid.n_points; ++j) out[j] = monomial_cap_value(m, grid.x(j));
  return out;
}

}  // namespace sescap
