#pragma once

#include <array>
#include <cmath>
#include <span>

#include "sescap/fft.hpp"
#include "sescap/grid.hpp"

namespace sescap {

/// Real Fourier basis on a periodic box: 1, sqrt2 cos(k_m x), sqrt2 sin(k_m x)
/// for m = 1..N/2-1, and sqrt2 cos(k_{N/2} x), all over sqrt(L).
///
/// The set is closed under complex conjugation, so the Galerkin matrix of any
/// operator that is symmetric under the bilinear form  int f g dx  is a plainly
/// symmetric matrix, and eigenvectors are orthogonal in sum_n C_n C'_n.
///
/// Matrix elements are integrated with the trapezoid rule on an oversampled
/// copy of the grid (oversample * N points), which is exact for coefficient
/// functions band-limited below (oversample - 2) * N / 2 modes.
class FourierBasis {
 public:
  /// One plane-wave component  weight * exp(i k_mode x) / sqrt(L).
  struct Term {
    int mode;
    cplx weight;
  };

  explicit FourierBasis(const GridSpec& grid, int oversample = 4)
      : grid_(grid), quad_(make_grid(grid.n_points * oversample, grid.box_length)), oversample_(oversample) {
    require(oversample >= 3, "basis: oversample must be >= 3 for exact Galerkin products");
    const int n = grid.n_points;
    const double r = 1.0 / std::sqrt(2.0);
    terms_.resize(static_cast<std::size_t>(n));
    counts_.resize(static_cast<std::size_t>(n));
    terms_[0] = {Term{0, 1.0}, Term{0, 0.0}};
    counts_[0] = 1;
    for (int m = 1; m < n / 2; ++m) {
      terms_[static_cast<std::size_t>(2 * m - 1)] = {Term{m, r}, Term{-m, r}};
      terms_[static_cast<std::size_t>(2 * m)] = {Term{m, cplx{0.0, -r}}, Term{-m, cplx{0.0, r}}};
      counts_[static_cast<std::size_t>(2 * m - 1)] = counts_[static_cast<std::size_t>(2 * m)] = 2;
    }
    terms_[static_cast<std::size_t>(n - 1)] = {Term{n / 2, r}, Term{-n / 2, r}};
    counts_[static_cast<std::size_t>(n - 1)] = 2;
  }

  int size() const { return grid_.n_points; }
  int oversample() const { return oversample_; }
  const GridSpec& grid() const { return grid_; }
  const GridSpec& quadrature_grid() const { return quad_; }

  std::span<const Term> terms(int a) const {
    return {terms_[static_cast<std::size_t>(a)].data(), static_cast<std::size_t>(counts_[static_cast<std::size_t>(a)])};
  }

  /// |k| carried by basis function a.
  double wavenumber(int a) const { return std::abs(grid_.k_mode(terms(a)[0].mode)); }

  /// Diagonal kinetic matrix  k^2 / (2 mass).
  CMatrix kinetic(double mass) const {
    CMatrix t = CMatrix::Zero(size(), size());
    for (int a = 0; a < size(); ++a) {
      const double k = wavenumber(a);
      t(a, a) = k * k / (2.0 * mass);
    }
    return t;
  }

  /// Galerkin matrix  <b_a| f0 + f1 d/dx + f2 d^2/dx^2 |b_b>  with the
  /// coefficient functions sampled on quadrature_grid().
  CMatrix galerkin(const CVector& f0, const CVector* f1 = nullptr, const CVector* f2 = nullptr) const {
    const int n = size();
    const CVector h0 = mode_coefficients(f0);
    const CVector h1 = f1 ? mode_coefficients(*f1) : CVector();
    const CVector h2 = f2 ? mode_coefficients(*f2) : CVector();
    // plane-wave element for (p, q), p,q in [-N/2, N/2]; h indexed by p - q + N
    auto element = [&](int p, int q) {
      const int d = p - q + n;
      const double kq = grid_.k_mode(q);
      cplx g = h0[d];
      if (f1) g += h1[d] * cplx{0.0, kq};
      if (f2) g -= h2[d] * (kq * kq);
      return g;
    };
    CMatrix out(n, n);
    for (int b = 0; b < n; ++b) {
      for (int a = 0; a < n; ++a) {
        cplx sum{};
        for (const Term& ta : terms(a)) {
          for (const Term& tb : terms(b)) sum += std::conj(ta.weight) * tb.weight * element(ta.mode, tb.mode);
        }
        out(a, b) = sum;
      }
    }
    return out;
  }

  /// Basis coefficients of the trigonometric interpolant of grid samples.
  CVector from_grid(const CVector& samples) const {
    const int n = size();
    require(samples.size() == n, "basis: sample count does not match grid");
    FourierTransform fft(static_cast<std::size_t>(n));
    fft.load(samples);
    fft.forward_raw();
    auto buf = fft.buffer();
    const double s = std::sqrt(grid_.box_length) / n;
    auto plane = [&](int mode) {
      const double sign = (mode % 2 == 0) ? 1.0 : -1.0;
      return s * sign * buf[static_cast<std::size_t>(grid_.slot_of_mode(mode))];
    };
    CVector beta(n);
    for (int a = 0; a < n - 1; ++a) {
      cplx sum{};
      for (const Term& t : terms(a)) sum += std::conj(t.weight) * plane(t.mode);
      beta[a] = sum;
    }
    // both Nyquist plane waves alias onto one grid mode
    beta[n - 1] = plane(-n / 2) / std::sqrt(2.0);
    return beta;
  }

  /// Grid samples of sum_a beta_a b_a(x_j).
  CVector to_grid(const CVector& beta) const {
    const int n = size();
    require(beta.size() == n, "basis: coefficient count does not match basis size");
    FourierTransform fft(static_cast<std::size_t>(n));
    auto buf = fft.buffer();
    for (auto& c : buf) c = 0.0;
    for (int a = 0; a < n - 1; ++a) {
      for (const Term& t : terms(a)) buf[static_cast<std::size_t>(grid_.slot_of_mode(t.mode))] += t.weight * beta[a];
    }
    buf[static_cast<std::size_t>(grid_.slot_of_mode(-n / 2))] += std::sqrt(2.0) * beta[n - 1];
    for (int i = 0; i < n; ++i) {
      if (grid_.mode_of_slot(i) % 2 != 0) buf[static_cast<std::size_t>(i)] = -buf[static_cast<std::size_t>(i)];
    }
    fft.inverse_raw();
    CVector out = fft.store();
    out /= std::sqrt(grid_.box_length);
    return out;
  }

  /// Dense N x N map from basis coefficients to grid samples.
  CMatrix synthesis_matrix() const {
    const int n = size();
    CMatrix s(n, n);
    CVector e = CVector::Zero(n);
    for (int a = 0; a < n; ++a) {
      e[a] = 1.0;
      s.col(a) = to_grid(e);
      e[a] = 0.0;
    }
    return s;
  }

  /// Dense N x N inverse of synthesis_matrix().
  CMatrix analysis_matrix() const {
    const int n = size();
    CMatrix s(n, n);
    CVector e = CVector::Zero(n);
    for (int j = 0; j < n; ++j) {
      e[j] = 1.0;
      s.col(j) = from_grid(e);
      e[j] = 0.0;
    }
    return s;
  }

 private:
  // h[d + N] = (1/L) int f exp(-i k_d x) dx for d in [-N, N].
  CVector mode_coefficients(const CVector& f) const {
    const int m = quad_.n_points;
    const int n = size();
    require(f.size() == m, "basis: coefficient function must be sampled on the quadrature grid");
    FourierTransform fft(static_cast<std::size_t>(m));
    fft.load(f);
    fft.forward_raw();
    auto buf = fft.buffer();
    CVector h(2 * n + 1);
    for (int d = -n; d <= n; ++d) {
      const double sign = (d % 2 == 0) ? 1.0 : -1.0;  // exp(-i k_d x_0), x_0 = -L/2
      h[d + n] = sign * buf[static_cast<std::size_t>(d >= 0 ? d : d + m)] / static_cast<double>(m);
    }
    return h;
  }

  GridSpec grid_;
  GridSpec quad_;
  int oversample_;
  std::vector<std::array<Term, 2>> terms_;
  std::vector<int> counts_;
};

}  // namespace sescap
