#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sescap/grid.hpp"

using namespace sescap;

namespace {

CVector random_state(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  CVector v(n);
  for (auto& c : v) c = cplx{nd(rng), nd(rng)};
  return v;
}

}  // namespace

TEST(MakeGrid, FourPointBox) {
  const GridSpec g = make_grid(4, 8.0);
  const RVector x = g.positions();
  const RVector k = g.wavenumbers();
  EXPECT_DOUBLE_EQ(x[0], -4.0);
  EXPECT_DOUBLE_EQ(x[1], -2.0);
  EXPECT_DOUBLE_EQ(x[2], 0.0);
  EXPECT_DOUBLE_EQ(x[3], 2.0);
  EXPECT_DOUBLE_EQ(k[0], -pi / 2);
  EXPECT_DOUBLE_EQ(k[1], -pi / 4);
  EXPECT_DOUBLE_EQ(k[2], 0.0);
  EXPECT_DOUBLE_EQ(k[3], pi / 4);
}

TEST(MakeGrid, DefaultBox) {
  const GridSpec g = make_grid(400, 200.0);
  EXPECT_DOUBLE_EQ(g.dx(), 0.5);
  EXPECT_NEAR(g.k_max(), 2 * pi * 199 / 200, 1e-14);
  EXPECT_NEAR(g.k_max(), 6.25, 0.01);
}

TEST(MakeGrid, UnitBoxHasIntegerWavenumbers) {
  const GridSpec g = make_grid(8, 2 * pi);
  const RVector k = g.wavenumbers();
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(k[i], i - 4, 1e-14);
}

TEST(MakeGrid, RejectsBadInput) {
  EXPECT_THROW(make_grid(7, 10.0), ValidationError);
  EXPECT_THROW(make_grid(2, 10.0), ValidationError);
  EXPECT_THROW(make_grid(0, 10.0), ValidationError);
  EXPECT_THROW(make_grid(8, 0.0), ValidationError);
  EXPECT_THROW(make_grid(8, -1.0), ValidationError);
  EXPECT_THROW(make_grid(8, std::nan("")), ValidationError);
}

TEST(Fourier, RoundTrip) {
  for (int n : {8, 64, 400, 1024}) {
    const GridSpec g = make_grid(n, 37.5);
    const CVector psi = random_state(n, 11u + n);
    const WavepacketState back = from_fourier(g, to_fourier(make_state(g, psi)));
    EXPECT_LT((back.amplitudes - psi).norm() / psi.norm(), 1e-12) << "n = " << n;
  }
}

TEST(Fourier, Parseval) {
  const GridSpec g = make_grid(400, 200.0);
  for (unsigned seed : {1u, 2u, 3u}) {
    const CVector psi = random_state(g.n_points, seed);
    const CVector c = to_fourier(make_state(g, psi));
    // unitary transform: sum |psi_j|^2 dx = sum |c_n|^2 dx
    const double lhs = psi.squaredNorm() * g.dx();
    const double rhs = c.squaredNorm() * g.dx();
    EXPECT_NEAR(lhs, rhs, 1e-10 * lhs);
  }
}

TEST(Fourier, PlaneWaveLandsOnItsMode) {
  const GridSpec g = make_grid(64, 20.0);
  const int m = 5;
  CVector psi(g.n_points);
  for (int j = 0; j < g.n_points; ++j) psi[j] = std::polar(1.0, g.k_mode(m) * g.x(j));
  const CVector c = to_fourier(make_state(g, psi));
  for (int i = 0; i < g.n_points; ++i) {
    const double expected = (i - g.n_points / 2 == m) ? std::sqrt(64.0) : 0.0;
    EXPECT_NEAR(std::abs(c[i] - expected), 0.0, 1e-12);
  }
}

TEST(SpectralDerivative, PlaneWaveEigenfunction) {
  const GridSpec g = make_grid(128, 30.0);
  const int m = 7;
  const double k0 = g.k_mode(m);
  CVector psi(g.n_points);
  for (int j = 0; j < g.n_points; ++j) psi[j] = std::polar(1.0, k0 * g.x(j));
  const CVector d1 = spectral_derivative(make_state(g, psi), 1);
  const CVector d2 = spectral_derivative(make_state(g, psi), 2);
  EXPECT_LT((d1 - imag_unit * k0 * psi).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((d2 + k0 * k0 * psi).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(SpectralDerivative, ConstantHasZeroSecondDerivative) {
  const GridSpec g = make_grid(32, 5.0);
  const CVector psi = CVector::Constant(g.n_points, cplx{2.5, -1.0});
  EXPECT_LT(spectral_derivative(make_state(g, psi), 2).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(SpectralDerivative, GaussianMatchesCentralDifferences) {
  const GridSpec g = make_grid(4096, 200.0);
  CVector psi(g.n_points);
  for (int j = 0; j < g.n_points; ++j) psi[j] = std::exp(-g.x(j) * g.x(j) / 10.0);
  const CVector d = spectral_derivative(make_state(g, psi), 1);
  double worst = 0.0;
  for (int j = 1; j + 1 < g.n_points; ++j) {
    const cplx fd = (psi[j + 1] - psi[j - 1]) / (2.0 * g.dx());
    worst = std::max(worst, std::abs(fd - d[j]));
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(SpectralDerivative, Linear) {
  const GridSpec g = make_grid(256, 40.0);
  const CVector a = random_state(g.n_points, 5u), b = random_state(g.n_points, 6u);
  const cplx ca{1.5, -0.5}, cb{-0.25, 2.0};
  for (int order : {1, 2}) {
    const CVector lhs = spectral_derivative(make_state(g, ca * a + cb * b), order);
    const CVector rhs =
        ca * spectral_derivative(make_state(g, a), order) + cb * spectral_derivative(make_state(g, b), order);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12 * rhs.cwiseAbs().maxCoeff());
  }
}

TEST(SpectralDerivative, RejectsUnsupportedOrder) {
  const GridSpec g = make_grid(8, 1.0);
  const WavepacketState s = make_state(g, CVector::Zero(8));
  EXPECT_THROW(spectral_derivative(s, 3), ValidationError);
  EXPECT_THROW(spectral_derivative(s, 0), ValidationError);
}

TEST(TrigInterpolate, ReproducesGridAndBandLimitedFunctions) {
  const GridSpec g = make_grid(64, 12.0);
  CVector psi(g.n_points);
  auto f = [&](double x) { return std::polar(1.0, g.k_mode(3) * x) + 0.5 * std::cos(g.k_mode(7) * x); };
  for (int j = 0; j < g.n_points; ++j) psi[j] = f(g.x(j));
  const WavepacketState s = make_state(g, psi);
  for (int j = 0; j < g.n_points; j += 5) EXPECT_LT(std::abs(trig_interpolate(s, g.x(j)) - psi[j]), 1e-12);
  for (double x : {-5.93, -1.234, 0.1, 2.5, 5.99}) EXPECT_LT(std::abs(trig_interpolate(s, x) - f(x)), 1e-12);
}

TEST(WavepacketState, NormAndFiniteness) {
  const GridSpec g = make_grid(16, 8.0);
  CVector psi = CVector::Constant(16, 1.0 / std::sqrt(8.0));
  const WavepacketState s = make_state(g, psi);
  EXPECT_NEAR(s.norm(), 1.0, 1e-14);
  EXPECT_TRUE(s.finite());
  psi[3] = std::nan("");
  EXPECT_FALSE(make_state(g, psi).finite());
  EXPECT_THROW(make_state(g, CVector::Zero(15)), ValidationError);
}
