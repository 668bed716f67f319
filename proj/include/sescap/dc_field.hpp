#pragma once

#include <cmath>
#include <optional>

#include "sescap/contour.hpp"
#include "sescap/grid.hpp"

namespace sescap {

/// Static field switched on at the box edges:  V = -(E/2)(|x| - x_dc)  for |x| >= x_dc.
struct DcFieldParams {
  double x_dc = 95.0;
  double strength = 2.0;
  bool enabled = true;
};

inline void validate_dc(const DcFieldParams& dc, double box_length,
                        const std::optional<ContourParams>& contour = std::nullopt) {
  require(std::isfinite(dc.strength), "dc field: strength must be finite");
  require(std::isfinite(dc.x_dc) && dc.x_dc > 0.0 && dc.x_dc < 0.5 * box_length,
          "dc field: x_dc must satisfy 0 < x_dc < L/2");
  if (contour) {
    require(dc.x_dc >= contour->x_cap, "dc field: x_dc must lie in the scaled tail (x_dc >= x_cap)");
  }
}

/// Value at real x; when a contour is given the field is analytically
/// continued along it, -(E/2)(+-F(x) - x_dc), which is how it reaches the
/// scaled Hamiltonian through dV of the total potential.
inline cplx dc_value(const DcFieldParams& dc, double x,
                     const std::optional<ContourParams>& contour = std::nullopt) {
  if (!dc.enabled || std::abs(x) < dc.x_dc) return cplx{0.0};
  const cplx r = contour ? (x >= 0.0 ? contour_eval(*contour, x).F : -contour_eval(*contour, x).F)
                         : cplx{std::abs(x), 0.0};
  return -0.5 * dc.strength * (r - dc.x_dc);
}

inline RVector dc_potential(const DcFieldParams& dc, const GridSpec& grid) {
  validate_dc(dc, grid.box_length);
  RVector v(grid.n_points);
  for (int j = 0; j < grid.n_points; ++j) v[j] = dc_value(dc, grid.x(j)).real();
  return v;
}

}  // namespace sescap
