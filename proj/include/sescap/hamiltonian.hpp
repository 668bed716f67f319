#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sescap/basis.hpp"
#include "sescap/cap_operator.hpp"
#include "sescap/dc_field.hpp"
#include "sescap/potential.hpp"

namespace sescap {

/// Everything that goes into one Hamiltonian matrix.
struct HamiltonianSpec {
  PotentialModel potential;
  std::optional<ContourParams> contour;  // SES reflection-free CAP when set
  std::optional<DcFieldParams> dc;
  std::optional<MonomialCap> monomial;
  double mass = 1.0;
  bool include_delta_v = true;
  int oversample = 4;
  /// Test hook: flips the sign of V1 so self-checks can prove they bite.
  bool flip_v1_sign = false;
};

struct HamiltonianMatrix {
  CMatrix matrix;
  bool hermitian = true;
  std::shared_ptr<const FourierBasis> basis;
  std::map<std::string, std::string> metadata;

  const GridSpec& grid() const { return basis->grid(); }
  int size() const { return static_cast<int>(matrix.rows()); }
};

namespace detail {

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

inline HamiltonianMatrix assemble(const GridSpec& grid, const HamiltonianSpec& spec) {
  require(std::isfinite(spec.mass) && spec.mass > 0.0, "hamiltonian: mass must be positive");
  if (spec.contour) validate_contour(*spec.contour, grid.box_length);
  if (spec.dc && spec.dc->enabled) validate_dc(*spec.dc, grid.box_length, spec.contour);
  if (spec.monomial) validate_monomial(*spec.monomial, grid.box_length);

  auto basis = std::make_shared<const FourierBasis>(grid, spec.oversample);
  const GridSpec& quad = basis->quadrature_grid();
  const int m = quad.n_points;

  CVector f0(m);
  for (int j = 0; j < m; ++j) f0[j] = spec.potential(quad.x(j));

  std::optional<CapOperator> cap;
  if (spec.contour) {
    cap = build_rf_cap(*spec.contour, quad, spec.mass);
    if (spec.include_delta_v) cap->delta_v = build_delta_v(spec.potential, *spec.contour, quad);
    if (spec.flip_v1_sign) cap->v1 = -cap->v1;
    f0 += cap->v0 + cap->delta_v;
  }
  if (spec.dc && spec.dc->enabled) {
    for (int j = 0; j < m; ++j) f0[j] += dc_value(*spec.dc, quad.x(j), spec.contour);
  }
  if (spec.monomial) {
    for (int j = 0; j < m; ++j) f0[j] += monomial_cap_value(*spec.monomial, quad.x(j));
  }
  if (!f0.allFinite()) throw NumericalError("hamiltonian: non-finite potential on the quadrature grid");

  HamiltonianMatrix h;
  h.basis = basis;
  h.matrix = basis->kinetic(spec.mass);
  if (cap) {
    h.matrix += basis->galerkin(f0, &cap->v1, &cap->v2);
  } else {
    h.matrix += basis->galerkin(f0);
  }
  h.hermitian = !spec.contour && !spec.monomial;
  if (h.hermitian) h.matrix = 0.5 * (h.matrix + h.matrix.adjoint()).eval();

  h.metadata["basis"] = "real_fourier";
  h.metadata["n_points"] = std::to_string(grid.n_points);
  h.metadata["box_length"] = detail::format_double(grid.box_length);
  h.metadata["oversample"] = std::to_string(spec.oversample);
  h.metadata["potential"] = spec.potential.tag();
  h.metadata["mass"] = detail::format_double(spec.mass);
  if (spec.contour) {
    h.metadata["contour"] = "theta=" + detail::format_double(spec.contour->theta) +
                            " lambda=" + detail::format_double(spec.contour->lambda) +
                            " x_cap=" + detail::format_double(spec.contour->x_cap) +
                            " profile=" + to_string(spec.contour->profile);
    h.metadata["delta_v"] = spec.include_delta_v ? "on" : "off";
  }
  if (spec.dc && spec.dc->enabled) {
    h.metadata["dc"] = "x_dc=" + detail::format_double(spec.dc->x_dc) +
                       " strength=" + detail::format_double(spec.dc->strength);
  }
  if (spec.monomial) {
    h.metadata["monomial"] = "strength=" + detail::format_double(spec.monomial->strength) +
                             " x0=" + detail::format_double(spec.monomial->x0) +
                             " n=" + std::to_string(spec.monomial->order);
  }
  return h;
}

inline HamiltonianMatrix assemble_hermitian(const GridSpec& grid, const PotentialModel& potential,
                                            double mass = 1.0) {
  HamiltonianSpec spec;
  spec.potential = potential;
  spec.mass = mass;
  return assemble(grid, spec);
}

inline HamiltonianMatrix assemble_nonhermitian(const GridSpec& grid, const PotentialModel& potential,
                                               const ContourParams& contour, double mass = 1.0) {
  HamiltonianSpec spec;
  spec.potential = potential;
  spec.contour = contour;
  spec.mass = mass;
  return assemble(grid, spec);
}

/// max |H - H^T| (complex symmetry) and max |H - H^dagger| (hermiticity).
inline double transpose_defect(const CMatrix& h) { return (h - h.transpose()).cwiseAbs().maxCoeff(); }
inline double adjoint_defect(const CMatrix& h) { return (h - h.adjoint()).cwiseAbs().maxCoeff(); }

enum class InnerProduct {
  conjugated,  // sum conj(a_n) b_n
  bilinear,    // c-product: sum a_n b_n
};

struct EigenDecomposition {
  CVector eigenvalues;
  CMatrix eigenvectors;  // columns, in basis coefficients
  InnerProduct product = InnerProduct::conjugated;
  std::shared_ptr<const FourierBasis> basis;
  std::vector<int> self_orthogonal;  // indices whose c-norm fell below 1e-8
  double max_residual = 0.0;
  double max_orthonormality_defect = 0.0;

  int size() const { return static_cast<int>(eigenvalues.size()); }

  /// Expansion coefficients a_j = <phi_j, coeffs> in the declared product.
  CVector project(const CVector& coeffs) const {
    return product == InnerProduct::conjugated ? CVector(eigenvectors.adjoint() * coeffs)
                                               : CVector(eigenvectors.transpose() * coeffs);
  }
};

/// Diagonalizes a Hamiltonian matrix.
///
/// Hermitian matrices get orthonormal eigenvectors. Everything else is treated
/// as complex symmetric: eigenvectors are scaled so that phi^T phi = 1, and
/// any vector whose c-norm vanishes (|phi^T phi| < 1e-8 with ||phi|| = 1) is
/// reported in `self_orthogonal` rather than rescaled, since it signals an
/// exceptional point.
inline EigenDecomposition eigendecompose(const HamiltonianMatrix& h) {
  const CMatrix& a = h.matrix;
  if (!a.allFinite()) throw NumericalError("eigendecompose: matrix has non-finite entries");
  const int n = static_cast<int>(a.rows());

  EigenDecomposition d;
  d.basis = h.basis;
  CVector values;
  CMatrix vectors;
  if (h.hermitian) {
    if (adjoint_defect(a) > 1e-10) throw ValidationError("eigendecompose: matrix flagged hermitian is not");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(a);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecompose: hermitian eigensolver failed");
    values = solver.eigenvalues().cast<cplx>();
    vectors = solver.eigenvectors();
    d.product = InnerProduct::conjugated;
  } else {
    Eigen::ComplexEigenSolver<CMatrix> solver(a, true);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecompose: complex eigensolver did not converge");
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
    d.product = InnerProduct::bilinear;
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    if (values[i].real() != values[j].real()) return values[i].real() < values[j].real();
    return values[i].imag() < values[j].imag();
  });
  d.eigenvalues.resize(n);
  d.eigenvectors.resize(n, n);
  for (int c = 0; c < n; ++c) {
    d.eigenvalues[c] = values[order[static_cast<std::size_t>(c)]];
    d.eigenvectors.col(c) = vectors.col(order[static_cast<std::size_t>(c)]);
  }

  if (d.product == InnerProduct::bilinear) {
    for (int c = 0; c < n; ++c) {
      auto v = d.eigenvectors.col(c);
      v /= v.norm();
      const cplx cnorm = (v.transpose() * v)(0, 0);
      if (std::abs(cnorm) < 1e-8) {
        d.self_orthogonal.push_back(c);
      } else {
        v /= std::sqrt(cnorm);
      }
    }
  }

  const CMatrix residual = a * d.eigenvectors - d.eigenvectors * d.eigenvalues.asDiagonal();
  for (int c = 0; c < n; ++c) {
    d.max_residual = std::max(d.max_residual, residual.col(c).norm() / d.eigenvectors.col(c).norm());
  }
  const CMatrix gram = d.product == InnerProduct::conjugated ? CMatrix(d.eigenvectors.adjoint() * d.eigenvectors)
                                                             : CMatrix(d.eigenvectors.transpose() * d.eigenvectors);
  d.max_orthonormality_defect = (gram - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();

  if (d.max_residual > 1e-8) {
    throw NumericalError("eigendecompose: eigenpair residual " + detail::format_double(d.max_residual) +
                         " exceeds 1e-8");
  }
  return d;
}

/// Grid representation of eigenvector j.
inline CVector eigenvector_on_grid(const EigenDecomposition& d, int j) {
  return d.basis->to_grid(d.eigenvectors.col(j));
}

}  // namespace sescap
