#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sescap/fft.hpp"
#include "sescap/types.hpp"

namespace sescap {

/// Uniform periodic collocation grid on [-L/2, L/2) and its conjugate
/// wavenumber grid k_n = 2*pi*n/L, n = -N/2 .. N/2-1.
///
/// Only (n_points, box_length) are stored; coordinates are computed on demand,
/// so the struct is cheap to copy and compare.
struct GridSpec {
  int n_points = 0;
  double box_length = 0.0;

  double dx() const { return box_length / n_points; }
  double x(int j) const { return -0.5 * box_length + j * dx(); }
  double half_length() const { return 0.5 * box_length; }

  /// Wavenumber of signed mode index n.
  double k_mode(int n) const { return 2.0 * pi * n / box_length; }
  /// Signed mode carried by FFT slot i (standard FFT storage order).
  int mode_of_slot(int i) const { return i < n_points / 2 ? i : i - n_points; }
  int slot_of_mode(int n) const { return n >= 0 ? n : n + n_points; }
  double k_max() const { return k_mode(n_points / 2 - 1); }

  RVector positions() const {
    RVector xs(n_points);
    for (int j = 0; j < n_points; ++j) xs[j] = x(j);
    return xs;
  }
  /// Signed, ascending: k(-N/2), ..., k(N/2-1).
  RVector wavenumbers() const {
    RVector ks(n_points);
    for (int i = 0; i < n_points; ++i) ks[i] = k_mode(i - n_points / 2);
    return ks;
  }

  bool operator==(const GridSpec&) const = default;
};

inline GridSpec make_grid(int n_points, double box_length) {
  require(n_points >= 4 && n_points % 2 == 0,
          "grid: n_points must be even and >= 4 (got " + std::to_string(n_points) + ")");
  require(std::isfinite(box_length) && box_length > 0.0, "grid: box_length must be positive");
  return GridSpec{n_points, box_length};
}

/// Complex amplitudes on a grid, stamped with the physical time.
struct WavepacketState {
  GridSpec grid;
  CVector amplitudes;
  double time = 0.0;

  double norm() const { return std::sqrt(amplitudes.squaredNorm() * grid.dx()); }
  bool finite() const { return amplitudes.allFinite(); }
};

inline WavepacketState make_state(const GridSpec& grid, CVector amplitudes, double time = 0.0) {
  require(amplitudes.size() == grid.n_points, "state: amplitude count does not match grid");
  return WavepacketState{grid, std::move(amplitudes), time};
}

/// Unitary Fourier coefficients referenced to x = 0, signed ascending order:
///   c_n = N^{-1/2} sum_j psi_j exp(-i k_n x_j).
inline CVector to_fourier(const WavepacketState& state) {
  const int n = state.grid.n_points;
  FourierTransform fft(static_cast<std::size_t>(n));
  fft.load(state.amplitudes);
  fft.forward();
  auto buf = fft.buffer();
  CVector c(n);
  for (int i = 0; i < n; ++i) {
    const int mode = i - n / 2;
    const double phase = (mode % 2 == 0) ? 1.0 : -1.0;  // exp(-i k_n x_0), x_0 = -L/2
    c[i] = phase * buf[state.grid.slot_of_mode(mode)];
  }
  return c;
}

inline WavepacketState from_fourier(const GridSpec& grid, const CVector& coeffs, double time = 0.0) {
  const int n = grid.n_points;
  require(coeffs.size() == n, "from_fourier: coefficient count does not match grid");
  FourierTransform fft(static_cast<std::size_t>(n));
  auto buf = fft.buffer();
  for (int i = 0; i < n; ++i) {
    const int mode = i - n / 2;
    const double phase = (mode % 2 == 0) ? 1.0 : -1.0;
    buf[grid.slot_of_mode(mode)] = phase * coeffs[i];
  }
  fft.inverse();
  return WavepacketState{grid, fft.store(), time};
}

/// (d/dx)^order psi by multiplying Fourier coefficients with (ik)^order.
/// The Nyquist coefficient is dropped for odd orders, which keeps the
/// first-derivative matrix real and antisymmetric.
inline CVector spectral_derivative(const WavepacketState& state, int order) {
  require(order == 1 || order == 2,
          "spectral_derivative: unsupported order " + std::to_string(order));
  const GridSpec& g = state.grid;
  FourierTransform fft(static_cast<std::size_t>(g.n_points));
  fft.load(state.amplitudes);
  fft.forward();
  auto buf = fft.buffer();
  for (int i = 0; i < g.n_points; ++i) {
    const int mode = g.mode_of_slot(i);
    const double k = g.k_mode(mode);
    if (order == 1) {
      buf[i] *= (mode == -g.n_points / 2) ? cplx{0.0} : imag_unit * k;
    } else {
      buf[i] *= -k * k;
    }
  }
  fft.inverse();
  return fft.store();
}

/// Evaluates the trigonometric interpolant of the grid samples at arbitrary x.
/// The Nyquist mode is interpolated as a cosine so that real samples give a
/// real interpolant.
inline CVector trig_interpolate(const WavepacketState& state, std::span<const double> xs) {
  const GridSpec& g = state.grid;
  const int n = g.n_points;
  const CVector c = to_fourier(state);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  const double dk = g.k_mode(1);
  const double k_nyq = g.k_mode(n / 2);
  CVector out(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t p = 0; p < xs.size(); ++p) {
    const double x = xs[p];
    cplx sum = c[0] * std::cos(k_nyq * x);
    const cplx step = std::polar(1.0, dk * x);
    cplx phase{};
    for (int i = 1; i < n; ++i) {
      // re-seed periodically to keep the recurrence error at rounding level
      if ((i - 1) % 32 == 0) {
        phase = std::polar(1.0, g.k_mode(i - n / 2) * x);
      } else {
        phase *= step;
      }
      sum += c[i] * phase;
    }
    out[static_cast<Eigen::Index>(p)] = sum * norm;
  }
  return out;
}

inline cplx trig_interpolate(const WavepacketState& state, double x) {
  const double xs[1] = {x};
  return trig_interpolate(state, std::span<const double>(xs, 1))[0];
}

}  // namespace sescap
