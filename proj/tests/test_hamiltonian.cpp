#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "sescap/hamiltonian.hpp"

using namespace sescap;

namespace {

const ContourParams kScaled{0.5, 0.9, 90.0, SwitchProfile::erf};
const GridSpec kGrid = make_grid(400, 200.0);

// Ground state of the test potential from a sinc-DVR diagonalization at
// N = 4096 on L = 200 (independent discretization, converged to ~1e-13).
constexpr double kE0 = -0.29795963785816;

cplx nearest(const CVector& ev, cplx target) {
  cplx best = ev[0];
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    if (std::abs(ev[j] - target) < std::abs(best - target)) best = ev[j];
  }
  return best;
}

}  // namespace

TEST(PotentialModel, TestWellBarrierShape) {
  const PotentialModel v = PotentialModel::test_well_barrier();
  EXPECT_DOUBLE_EQ(v(0.0), -0.8);
  // barrier maxima where d/dx[(x^2/2 - 0.8) e^{-x^2/10}] = 0, i.e. x^2 = 11.6
  const double xs = std::sqrt(11.6);
  EXPECT_GT(v(xs), 0.0);
  EXPECT_GT(v(xs), v(xs - 0.01));
  EXPECT_GT(v(xs), v(xs + 0.01));
  EXPECT_DOUBLE_EQ(v(xs), v(-xs));
  EXPECT_EQ(PotentialModel::free()(cplx{3.0, 4.0}), cplx(0.0, 0.0));
  EXPECT_EQ(PotentialModel::harmonic(2.0)(cplx{0.0, 1.0}), cplx(-2.0, 0.0));
}

TEST(AssembleHermitian, FreeParticleIntegerWavenumbers) {
  const HamiltonianMatrix h = assemble_hermitian(make_grid(8, 2 * pi), PotentialModel::free());
  EXPECT_TRUE(h.hermitian);
  const EigenDecomposition d = eigendecompose(h);
  const double expected[] = {0.0, 0.5, 0.5, 2.0, 2.0, 4.5, 4.5, 8.0};
  for (int j = 0; j < 8; ++j) {
    EXPECT_NEAR(d.eigenvalues[j].real(), expected[j], 1e-12);
    EXPECT_EQ(d.eigenvalues[j].imag(), 0.0);
  }
}

TEST(AssembleHermitian, HarmonicLowestLevels) {
  const HamiltonianMatrix h = assemble_hermitian(make_grid(128, 40.0), PotentialModel::harmonic(1.0));
  const EigenDecomposition d = eigendecompose(h);
  EXPECT_NEAR(d.eigenvalues[0].real(), 0.5, 1e-6);
  EXPECT_NEAR(d.eigenvalues[1].real(), 1.5, 1e-6);
  EXPECT_NEAR(d.eigenvalues[2].real(), 2.5, 1e-6);
}

TEST(AssembleHermitian, TestPotentialGroundState) {
  const HamiltonianMatrix h = assemble_hermitian(kGrid, PotentialModel::test_well_barrier());
  EXPECT_LT(adjoint_defect(h.matrix), 1e-10);
  const EigenDecomposition d = eigendecompose(h);
  const double e0 = d.eigenvalues[0].real();
  EXPECT_GT(e0, -0.8);
  EXPECT_LT(e0, 0.0);
  EXPECT_NEAR(e0, kE0, 1e-10);
}

TEST(AssembleNonHermitian, ThetaZeroEqualsHermitian) {
  ContourParams p = kScaled;
  p.theta = 0.0;
  const HamiltonianMatrix hh = assemble_hermitian(kGrid, PotentialModel::test_well_barrier());
  const HamiltonianMatrix hn = assemble_nonhermitian(kGrid, PotentialModel::test_well_barrier(), p);
  EXPECT_FALSE(hn.hermitian);
  EXPECT_LT((hn.matrix - hh.matrix).cwiseAbs().maxCoeff(), 1e-12);
  const CVector a = eigendecompose(hh).eigenvalues;
  const CVector b = eigendecompose(hn).eigenvalues;
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(AssembleNonHermitian, ComplexSymmetric) {
  for (auto profile : {SwitchProfile::erf, SwitchProfile::tanh}) {
    ContourParams p = kScaled;
    p.profile = profile;
    const HamiltonianMatrix h = assemble_nonhermitian(kGrid, PotentialModel::test_well_barrier(), p);
    EXPECT_LT(transpose_defect(h.matrix), 1e-8);
    EXPECT_GT(adjoint_defect(h.matrix), 1e-3);
  }
}

TEST(AssembleNonHermitian, FlippedV1BreaksSymmetry) {
  HamiltonianSpec s;
  s.contour = kScaled;
  s.flip_v1_sign = true;
  EXPECT_GT(transpose_defect(assemble(kGrid, s).matrix), 1e-3);
}

TEST(AssembleNonHermitian, BoundStateSurvivesScaling) {
  const HamiltonianMatrix h = assemble_nonhermitian(kGrid, PotentialModel::test_well_barrier(), kScaled);
  const EigenDecomposition d = eigendecompose(h);
  EXPECT_LT(d.max_residual, 1e-8);
  EXPECT_LT(d.max_orthonormality_defect, 1e-6);
  EXPECT_TRUE(d.self_orthogonal.empty());
  const cplx e05 = nearest(d.eigenvalues, kE0);
  EXPECT_LT(std::abs(e05 - kE0), 1e-4);

  ContourParams p3 = kScaled;
  p3.theta = 0.3;
  const cplx e03 =
      nearest(eigendecompose(assemble_nonhermitian(kGrid, PotentialModel::test_well_barrier(), p3)).eigenvalues, kE0);
  EXPECT_LT(std::abs(e05 - e03), 1e-6);
}

TEST(AssembleNonHermitian, FreeParticleRotatedContinuum) {
  // Scaling switched on right at the origin over most of the box:
  // continuum eigenvalues fall on the ray arg E = -2 theta.
  const double theta = 0.3;
  const GridSpec g = make_grid(400, 200.0);
  const HamiltonianMatrix h = assemble_nonhermitian(g, PotentialModel::free(), {theta, 2.0, 1.0, SwitchProfile::erf});
  const EigenDecomposition d = eigendecompose(h);
  std::vector<double> dev;
  for (int j = 0; j < d.size(); ++j) {
    if (std::abs(d.eigenvalues[j]) < 1e-10) continue;
    dev.push_back(std::abs(std::arg(d.eigenvalues[j]) + 2.0 * theta));
  }
  std::sort(dev.begin(), dev.end());
  const std::size_t central = static_cast<std::size_t>(0.8 * static_cast<double>(dev.size()));
  EXPECT_LT(dev[central - 1], 0.05);
}

TEST(Eigendecompose, HermitianTwoByTwo) {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  const EigenDecomposition d = eigendecompose(HamiltonianMatrix{m, true, nullptr, {}});
  EXPECT_NEAR(d.eigenvalues[0].real(), -1.0, 1e-15);
  EXPECT_NEAR(d.eigenvalues[1].real(), 1.0, 1e-15);
  EXPECT_EQ(d.product, InnerProduct::conjugated);
  EXPECT_LT(d.max_orthonormality_defect, 1e-15);
}

TEST(Eigendecompose, ComplexSymmetricTwoByTwo) {
  CMatrix m(2, 2);
  m << 0.0, imag_unit, imag_unit, 0.0;
  const EigenDecomposition d = eigendecompose(HamiltonianMatrix{m, false, nullptr, {}});
  EXPECT_LT(std::abs(d.eigenvalues[0] + imag_unit), 1e-14);
  EXPECT_LT(std::abs(d.eigenvalues[1] - imag_unit), 1e-14);
  EXPECT_EQ(d.product, InnerProduct::bilinear);
  const CMatrix gram = d.eigenvectors.transpose() * d.eigenvectors;
  EXPECT_LT((gram - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Eigendecompose, FlagsSelfOrthogonalVector) {
  // Jordan-like complex symmetric block at an exceptional point: the single
  // eigenvector (1, i) has vanishing c-norm.
  CMatrix m(2, 2);
  m << 1.0, imag_unit, imag_unit, -1.0;
  try {
    const EigenDecomposition d = eigendecompose(HamiltonianMatrix{m, false, nullptr, {}});
    EXPECT_FALSE(d.self_orthogonal.empty());
  } catch (const NumericalError&) {
    SUCCEED();  // a defective matrix may also fail the residual check outright
  }
}

TEST(Eigendecompose, RejectsNonFiniteAndMislabelled) {
  CMatrix m = CMatrix::Identity(2, 2);
  m(0, 1) = std::nan("");
  EXPECT_THROW(eigendecompose(HamiltonianMatrix{m, false, nullptr, {}}), NumericalError);
  CMatrix a(2, 2);
  a << 0.0, 1.0, 0.0, 0.0;
  EXPECT_THROW(eigendecompose(HamiltonianMatrix{a, true, nullptr, {}}), ValidationError);
}

TEST(Eigendecompose, NonHermitianResidualsOnEveryPair) {
  const HamiltonianMatrix h = assemble_nonhermitian(kGrid, PotentialModel::test_well_barrier(), kScaled);
  const EigenDecomposition d = eigendecompose(h);
  ASSERT_EQ(d.size(), 400);
  const CMatrix r = h.matrix * d.eigenvectors - d.eigenvectors * d.eigenvalues.asDiagonal();
  for (int j = 0; j < d.size(); ++j) EXPECT_LT(r.col(j).norm() / d.eigenvectors.col(j).norm(), 1e-8) << j;
  for (int j = 1; j < d.size(); ++j) {
    const bool ordered = d.eigenvalues[j - 1].real() < d.eigenvalues[j].real() ||
                         (d.eigenvalues[j - 1].real() == d.eigenvalues[j].real() &&
                          d.eigenvalues[j - 1].imag() <= d.eigenvalues[j].imag());
    EXPECT_TRUE(ordered);
  }
}

TEST(Assemble, MetadataAndValidation) {
  HamiltonianSpec s;
  s.contour = kScaled;
  s.dc = DcFieldParams{95.0, 2.0, true};
  const HamiltonianMatrix h = assemble(kGrid, s);
  EXPECT_EQ(h.metadata.at("potential"), "test_well_barrier");
  EXPECT_NE(h.metadata.at("contour").find("profile=erf"), std::string::npos);
  EXPECT_EQ(h.metadata.count("dc"), 1u);
  s.mass = 0.0;
  EXPECT_THROW(assemble(kGrid, s), ValidationError);
  s.mass = 1.0;
  s.dc = DcFieldParams{80.0, 2.0, true};  // field starting inside the unscaled region
  EXPECT_THROW(assemble(kGrid, s), ValidationError);
}
