#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "sescap/contour.hpp"
#include "sescap/dc_field.hpp"
#include "sescap/grid.hpp"
#include "sescap/hamiltonian.hpp"

namespace sescap {

// Edge geometry. Each half of the box is walked outward from x = 0 with a
// radial index i = 1..n/2: on the right i maps to grid index n/2 - 1 + i
// (x = 0 .. L/2 - dx), on the left to n/2 + 1 - i (x = 0 .. -L/2 + dx).
// The periodic seam at x = -L/2 belongs to neither side.

enum class Edge { left, right };

inline int edge_side_points(const GridSpec& grid) { return grid.n_points / 2; }

inline int edge_grid_index(const GridSpec& grid, Edge edge, int i) {
  require(i >= 1 && i <= edge_side_points(grid), "edge: radial index out of range");
  return edge == Edge::right ? grid.n_points / 2 - 1 + i : grid.n_points / 2 + 1 - i;
}

struct EdgeWavevector {
  cplx k;
  cplx ratio;              // phi(r_N) / phi(r_{N-1}) as measured
  bool defined = true;     // false when the denominator vanished
  bool incoming = false;   // Re k <= 0: not an outgoing wave
};

/// Outgoing wavevector at one edge from the last two samples,
///   exp(i e^{i theta} k dx) = phi(r_i) / phi(r_{i-1}),
/// principal branch. `i` defaults to the outermost point.
inline EdgeWavevector estimate_edge_wavevector(const WavepacketState& state, double theta, Edge edge,
                                               int i = -1) {
  const GridSpec& g = state.grid;
  if (i < 0) i = edge_side_points(g);
  require(i >= 2, "edge wavevector: need two radial points");
  const cplx num = state.amplitudes[edge_grid_index(g, edge, i)];
  const cplx den = state.amplitudes[edge_grid_index(g, edge, i - 1)];
  EdgeWavevector out;
  if (std::abs(den) <= 1e-14) {
    out.defined = false;
    out.k = 0.0;
    out.ratio = 0.0;
    return out;
  }
  out.ratio = num / den;
  if (out.ratio == cplx{0.0}) {
    // hard zero at the edge: an infinitely damped outgoing wave
    out.k = cplx{0.0, std::numeric_limits<double>::infinity()};
    return out;
  }
  out.k = std::log(out.ratio) / (imag_unit * std::polar(1.0, theta) * g.dx());
  out.incoming = out.k.real() <= 0.0;
  return out;
}

inline EdgeWavevector estimate_edge_wavevector(const WavepacketState& state,
                                               const std::optional<ContourParams>& contour,
                                               Edge edge = Edge::right) {
  return estimate_edge_wavevector(state, contour ? contour->theta : 0.0, edge);
}

/// Ratio used by the outgoing boundary: the measured one, or, when the wave
/// looks incoming, the ratio of the wave with Re k replaced by |Re k|.
inline cplx outgoing_ratio(const EdgeWavevector& w, double theta, double dx) {
  if (!w.defined) return 0.0;
  if (!w.incoming) return w.ratio;
  const cplx k{std::abs(w.k.real()), w.k.imag()};
  return std::exp(imag_unit * std::polar(1.0, theta) * k * dx);
}

struct TbcRatios {
  cplx left{};
  cplx right{};
  bool left_defined = false;
  bool right_defined = false;
};

/// Ratios phi(r_{j_c}) / phi(r_{j_c - 1}) at both edges, clamped outgoing.
inline TbcRatios tbc_ratios(const WavepacketState& state, int j_c, double theta = 0.0) {
  TbcRatios r;
  const int side = edge_side_points(state.grid);
  if (j_c >= side) return r;
  require(j_c >= 2, "tbc: j_c must be >= 2");
  const EdgeWavevector wl = estimate_edge_wavevector(state, theta, Edge::left, j_c);
  const EdgeWavevector wr = estimate_edge_wavevector(state, theta, Edge::right, j_c);
  r.left_defined = wl.defined;
  r.right_defined = wr.defined;
  r.left = outgoing_ratio(wl, theta, state.grid.dx());
  r.right = outgoing_ratio(wr, theta, state.grid.dx());
  return r;
}

/// Outgoing-boundary row modification of a grid-space one-step matrix:
/// every row beyond radial index j_c becomes the previous (already modified)
/// row times the edge ratio, at both edges. Rows at an edge whose ratio is
/// undefined are left alone.
inline CMatrix tbc_modify_rows(const CMatrix& u, const WavepacketState& state, int j_c, double theta = 0.0) {
  const GridSpec& g = state.grid;
  require(u.rows() == g.n_points && u.cols() == g.n_points, "tbc: matrix does not match grid");
  CMatrix out = u;
  const int side = edge_side_points(g);
  if (j_c >= side) return out;
  const TbcRatios r = tbc_ratios(state, j_c, theta);
  for (Edge e : {Edge::left, Edge::right}) {
    const bool defined = e == Edge::left ? r.left_defined : r.right_defined;
    if (!defined) continue;
    const cplx rho = e == Edge::left ? r.left : r.right;
    for (int i = j_c + 1; i <= side; ++i) {
      out.row(edge_grid_index(g, e, i)) = rho * out.row(edge_grid_index(g, e, i - 1));
    }
  }
  return out;
}

/// Same update applied to a freshly stepped state: equivalent to stepping
/// with tbc_modify_rows(U, previous, j_c) but without copying U.
inline void tbc_apply_to_state(CVector& stepped, const TbcRatios& r, const GridSpec& g, int j_c) {
  const int side = edge_side_points(g);
  for (Edge e : {Edge::left, Edge::right}) {
    const bool defined = e == Edge::left ? r.left_defined : r.right_defined;
    if (!defined) continue;
    const cplx rho = e == Edge::left ? r.left : r.right;
    for (int i = j_c + 1; i <= side; ++i) {
      stepped[edge_grid_index(g, e, i)] = rho * stepped[edge_grid_index(g, e, i - 1)];
    }
  }
}

struct BoundStateCheck {
  struct Entry {
    int index;
    cplx energy;
    double inner_weight;
  };
  std::vector<Entry> bound;  // eigenvalues with Re E < 0 localized inside |x| <= x_inner
  double max_abs_imag = 0.0;
  bool passed(double tol = 1e-6) const { return max_abs_imag < tol; }
};

/// Imaginary parts of the bound-like eigenvalues of a (scaled) Hamiltonian.
/// A state counts as bound-like when Re E < 0 and at least `min_weight` of its
/// conjugated norm lies in |x| <= x_inner; negative-energy states living in
/// the dc-field region are continuum, not bound.
inline BoundStateCheck check_bound_states(const EigenDecomposition& d, double x_inner,
                                          double min_weight = 0.9) {
  BoundStateCheck out;
  const GridSpec& g = d.basis->grid();
  for (int j = 0; j < d.size(); ++j) {
    if (d.eigenvalues[j].real() >= 0.0) continue;
    const CVector psi = eigenvector_on_grid(d, j);
    double inner = 0.0;
    for (int p = 0; p < g.n_points; ++p) {
      if (std::abs(g.x(p)) <= x_inner) inner += std::norm(psi[p]);
    }
    const double w = inner / psi.squaredNorm();
    if (w < min_weight) continue;
    out.bound.push_back({j, d.eigenvalues[j], w});
    out.max_abs_imag = std::max(out.max_abs_imag, std::abs(d.eigenvalues[j].imag()));
  }
  return out;
}

}  // namespace sescap
