#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "sescap/boundary_aids.hpp"
#include "sescap/contour.hpp"
#include "sescap/fft.hpp"
#include "sescap/grid.hpp"
#include "sescap/hamiltonian.hpp"
#include "sescap/potential.hpp"

namespace sescap {

enum class PropagationMethod { split5, eigen, matrix_step };

inline std::string to_string(PropagationMethod m) {
  switch (m) {
    case PropagationMethod::split5: return "split5";
    case PropagationMethod::eigen: return "eigen";
    case PropagationMethod::matrix_step: return "matrix_step";
  }
  return "?";
}

inline PropagationMethod propagation_method_from_string(const std::string& s) {
  if (s == "split5") return PropagationMethod::split5;
  if (s == "eigen") return PropagationMethod::eigen;
  if (s == "matrix_step") return PropagationMethod::matrix_step;
  throw ValidationError("propagator: unknown method '" + s + "' (expected split5, eigen or matrix_step)");
}

enum class StepApproximant { pade, eigen, taylor };

struct PropagatorSpec {
  PropagationMethod method = PropagationMethod::eigen;
  double dt = 0.01;
  double t_final = 60.0;
  int snapshot_stride = 100;  // steps between stored snapshots
  bool dc_field = false;
  bool tbc = false;
  int tbc_jc = -1;  // radial index per side; -1 means n/2 - 1 (last row only)
  StepApproximant approximant = StepApproximant::pade;
  int taylor_order = 12;
};

inline int step_count(double dt, double t_final) {
  const double steps = t_final / dt;
  const long rounded = std::lround(steps);
  require(std::abs(steps - static_cast<double>(rounded)) < 1e-9 * std::max(1.0, steps),
          "propagator: t_final must be an integer multiple of dt");
  return static_cast<int>(rounded);
}

inline void validate_propagator(const PropagatorSpec& s) {
  require(std::isfinite(s.dt) && s.dt > 0.0, "propagator: dt must be positive");
  require(std::isfinite(s.t_final) && s.t_final >= s.dt, "propagator: t_final must be >= dt");
  require(s.snapshot_stride >= 1, "propagator: snapshot_stride must be >= 1");
  require(!s.tbc || s.method == PropagationMethod::matrix_step, "propagator: tbc requires method matrix_step");
  require(s.taylor_order >= 2 && s.taylor_order <= 40, "propagator: taylor_order must be in 2..40");
  step_count(s.dt, s.t_final);
}

struct Trajectory {
  std::vector<WavepacketState> snapshots;
  std::map<std::string, std::string> provenance;

  std::vector<double> times() const {
    std::vector<double> t;
    t.reserve(snapshots.size());
    for (const auto& s : snapshots) t.push_back(s.time);
    return t;
  }

  const WavepacketState& back() const { return snapshots.back(); }

  /// Snapshot whose time is within 1e-9 of t.
  const WavepacketState& at(double t) const {
    for (const auto& s : snapshots) {
      if (std::abs(s.time - t) <= 1e-9 * std::max(1.0, std::abs(t))) return s;
    }
    throw ValidationError("trajectory: no snapshot at t = " + detail::format_double(t));
  }

  void push(WavepacketState s) {
    if (!s.finite()) throw NumericalError("trajectory: non-finite amplitudes at t = " + detail::format_double(s.time));
    require(snapshots.empty() || s.time > snapshots.back().time, "trajectory: snapshot times must increase");
    snapshots.push_back(std::move(s));
  }
};

/// (2a/pi)^{1/4} exp(-a (z - x0)^2 + i p0 (z - x0)), evaluable off the real axis.
struct GaussianInitial {
  double a = 0.1;
  double p0 = 1.0;
  double x0 = 0.0;

  cplx operator()(cplx z) const {
    const cplx u = z - x0;
    return std::pow(2.0 * a / pi, 0.25) * std::exp(-a * u * u + imag_unit * p0 * u);
  }
  InitialFamily family() const { return InitialFamily::gaussian(); }
};

inline WavepacketState initial_gaussian(const GridSpec& grid, double a, double p0, double x0 = 0.0) {
  require(std::isfinite(a) && a > 0.0, "initial: width parameter a must be positive");
  require(std::isfinite(p0) && std::isfinite(x0), "initial: p0 and x0 must be finite");
  const GaussianInitial f{a, p0, x0};
  CVector psi(grid.n_points);
  for (int j = 0; j < grid.n_points; ++j) psi[j] = f(cplx{grid.x(j), 0.0});
  WavepacketState s = make_state(grid, std::move(psi));
  if (std::abs(s.norm() - 1.0) > 1e-6) {
    throw ValidationError("initial: Gaussian norm " + detail::format_double(s.norm()) +
                          " deviates from 1 by more than 1e-6; box too small for the width");
  }
  return s;
}

/// Scaled initial state  phi(F(x_j)) F'(x_j)^{1/2}.  The half-power of F'
/// carries the state into the representation in which the RF-CAP
/// Hamiltonian is complex symmetric; it is 1 wherever the contour is real.
inline WavepacketState transform_initial(const GaussianInitial& f, const std::optional<ContourParams>& contour,
                                         const GridSpec& grid) {
  CVector psi(grid.n_points);
  if (contour) {
    validate_contour(*contour, grid.box_length);
    validate_theta_against_initial(*contour, f.family());
  }
  for (int j = 0; j < grid.n_points; ++j) {
    const double x = grid.x(j);
    if (!contour) {
      psi[j] = f(cplx{x, 0.0});
      continue;
    }
    const ContourPoint c = contour_eval(*contour, x);
    psi[j] = f(c.F) * std::sqrt(c.F1);
    if (!std::isfinite(psi[j].real()) || !std::isfinite(psi[j].imag())) {
      throw NumericalError("transform_initial: overflow of the initial state at grid point j=" + std::to_string(j) +
                           " (x=" + detail::format_double(x) + ")");
    }
  }
  return make_state(grid, std::move(psi));
}

/// Sixth-order symmetric composition (Yoshida, solution A) of Strang steps.
struct Composition {
  static constexpr double w1 = -1.17767998417887;
  static constexpr double w2 = 0.235573213359357;
  static constexpr double w3 = 0.784513610477560;
  static constexpr double w0 = 1.0 - 2.0 * (w1 + w2 + w3);
  static constexpr std::array<double, 7> weights{w3, w2, w1, w0, w1, w2, w3};
  static std::string describe() {
    return "yoshida6 w0=" + detail::format_double(w0) + " w1=" + detail::format_double(w1) +
           " w2=" + detail::format_double(w2) + " w3=" + detail::format_double(w3);
  }
};

/// Split-operator propagation with a real potential on the state's grid.
/// Stores the initial state and every `stride`-th step.
inline Trajectory propagate_split5(const WavepacketState& initial, const PotentialModel& potential, double dt,
                                   double t_final, int stride = 1, double mass = 1.0) {
  require(std::isfinite(dt) && dt > 0.0 && t_final - initial.time >= dt, "split5: need dt > 0 and t_final >= dt");
  require(stride >= 1, "split5: stride must be >= 1");
  const GridSpec& g = initial.grid;
  const int n = g.n_points;
  const int steps = step_count(dt, t_final - initial.time);

  RVector v(n);
  for (int j = 0; j < n; ++j) v[j] = potential(g.x(j));
  RVector k2(n);
  for (int i = 0; i < n; ++i) {
    const double k = g.k_mode(g.mode_of_slot(i));
    k2[i] = k * k / (2.0 * mass);
  }

  // Half-kicks between consecutive Strang stages merge: (w_s + w_{s+1}) / 2.
  const auto& w = Composition::weights;
  std::vector<CVector> kick;
  std::vector<CVector> drift;
  auto phase = [](const RVector& f, double h) {
    CVector out(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) out[i] = std::polar(1.0, -f[i] * h);
    return out;
  };
  kick.push_back(phase(v, 0.5 * w[0] * dt));
  for (std::size_t s = 0; s < w.size(); ++s) {
    drift.push_back(phase(k2, w[s] * dt));
    const double next = s + 1 < w.size() ? w[s + 1] : 0.0;
    kick.push_back(phase(v, 0.5 * (w[s] + next) * dt));
  }

  FourierTransform fft(static_cast<std::size_t>(n));
  CVector psi = initial.amplitudes;
  Trajectory traj;
  traj.provenance["method"] = "split5";
  traj.provenance["composition"] = Composition::describe();
  traj.provenance["dt"] = detail::format_double(dt);
  traj.provenance["n_points"] = std::to_string(n);
  traj.provenance["box_length"] = detail::format_double(g.box_length);
  traj.provenance["potential"] = potential.tag();
  traj.push(WavepacketState{g, psi, initial.time});

  const double inv_n = 1.0 / n;
  for (int step = 1; step <= steps; ++step) {
    psi = psi.cwiseProduct(kick[0]);
    for (std::size_t s = 0; s < w.size(); ++s) {
      fft.load(psi);
      fft.forward_raw();
      auto buf = fft.buffer();
      for (int i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] *= drift[s][i] * inv_n;
      fft.inverse_raw();
      psi = fft.store().cwiseProduct(kick[s + 1]);
    }
    if (step % stride == 0 || step == steps) traj.push(WavepacketState{g, psi, initial.time + step * dt});
  }
  return traj;
}

/// Psi(t) = sum_j a_j exp(-i E_j t) phi_j with a_j in the decomposition's
/// product. Throws if the initial state is not reproduced to 1e-8 at t = 0.
inline Trajectory propagate_eigen(const EigenDecomposition& d, const WavepacketState& initial,
                                  const std::vector<double>& times) {
  const FourierBasis& basis = *d.basis;
  require(basis.grid() == initial.grid, "propagate_eigen: state and decomposition live on different grids");
  if (!d.self_orthogonal.empty()) {
    throw NumericalError("propagate_eigen: decomposition has " + std::to_string(d.self_orthogonal.size()) +
                         " self-orthogonal eigenvectors; expansion undefined");
  }
  const CVector beta = basis.from_grid(initial.amplitudes);
  // Projection refined against the residual: V^T (or V^dagger) is the
  // inverse of V only up to the eigenvectors' orthonormality defect.
  CVector a = d.project(beta);
  double recon = 0.0;
  for (int sweep = 0; sweep < 4; ++sweep) {
    const CVector r = beta - d.eigenvectors * a;
    recon = r.norm() / std::max(beta.norm(), 1e-300);
    if (recon < 1e-13) break;
    a += d.project(r);
  }
  if (recon > 1e-8) {
    throw NumericalError("propagate_eigen: initial state reconstruction error " + detail::format_double(recon) +
                         " exceeds 1e-8");
  }
  Trajectory traj;
  traj.provenance["method"] = "eigen";
  traj.provenance["product"] = d.product == InnerProduct::bilinear ? "c-product" : "conjugated";
  traj.provenance["n_points"] = std::to_string(initial.grid.n_points);
  traj.provenance["box_length"] = detail::format_double(initial.grid.box_length);
  for (double t : times) {
    const double dt = t - initial.time;
    CVector c(a.size());
    for (Eigen::Index j = 0; j < a.size(); ++j) c[j] = a[j] * std::exp(-imag_unit * d.eigenvalues[j] * dt);
    traj.push(WavepacketState{initial.grid, basis.to_grid(d.eigenvectors * c), t});
  }
  return traj;
}

/// Times t0, t0 + dt*stride, ..., t_final (always included).
inline std::vector<double> snapshot_times(double t0, double dt, double t_final, int stride) {
  const int steps = step_count(dt, t_final - t0);
  std::vector<double> t;
  for (int s = 0; s <= steps; ++s) {
    if (s % stride == 0 || s == steps) t.push_back(t0 + s * dt);
  }
  return t;
}

namespace detail {

inline CMatrix taylor_exp(const CMatrix& h, double dt, int order) {
  const int n = static_cast<int>(h.rows());
  const CMatrix a = (-imag_unit * dt) * h;
  CMatrix term = CMatrix::Identity(n, n);
  CMatrix sum = term;
  for (int k = 1; k <= order; ++k) {
    term = (a * term / static_cast<double>(k)).eval();
    sum += term;
  }
  return sum;
}

}  // namespace detail

/// One-step evolution matrix exp(-i H dt) in basis coefficients.
inline CMatrix step_matrix(const HamiltonianMatrix& h, double dt, StepApproximant approx, int taylor_order) {
  if (approx == StepApproximant::pade) return ((-imag_unit * dt) * h.matrix).exp();
  if (approx == StepApproximant::taylor) return detail::taylor_exp(h.matrix, dt, taylor_order);
  const EigenDecomposition d = eigendecompose(h);
  CVector e(d.size());
  for (int j = 0; j < d.size(); ++j) e[j] = std::exp(-imag_unit * d.eigenvalues[j] * dt);
  const CMatrix left = d.eigenvectors * e.asDiagonal();
  return d.product == InnerProduct::bilinear ? CMatrix(left * d.eigenvectors.transpose())
                                             : CMatrix(left * d.eigenvectors.adjoint());
}

/// Step error of the chosen approximant against a Pade matrix exponential.
/// Taylor is checked on a fixed 50-dim principal submatrix (random indices,
/// fixed seed); the eigen step depends on the conditioning of the whole
/// eigenbasis, so it is checked on the full matrix.
inline double matrix_step_error(const HamiltonianMatrix& h, double dt, StepApproximant approx, int taylor_order) {
  if (approx == StepApproximant::pade) return 0.0;
  if (approx == StepApproximant::eigen) {
    return (step_matrix(h, dt, approx, taylor_order) - ((-imag_unit * dt) * h.matrix).exp()).cwiseAbs().maxCoeff();
  }
  const int n = h.size();
  const int m = std::min(50, n);
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937 rng(20240613u);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(m));
  std::sort(idx.begin(), idx.end());
  CMatrix sub(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) sub(a, b) = h.matrix(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  }
  const CMatrix exact = ((-imag_unit * dt) * sub).exp();
  return (detail::taylor_exp(sub, dt, taylor_order) - exact).cwiseAbs().maxCoeff();
}

/// Grid-space one-step matrix U = S exp(-i H dt) A.
inline CMatrix grid_step_matrix(const HamiltonianMatrix& h, double dt, StepApproximant approx = StepApproximant::pade,
                                int taylor_order = 12) {
  const FourierBasis& b = *h.basis;
  return b.synthesis_matrix() * step_matrix(h, dt, approx, taylor_order) * b.analysis_matrix();
}

struct MatrixStepOptions {
  bool tbc = false;
  int tbc_jc = -1;
  double tbc_theta = 0.0;  // rotation used in the edge wavevector estimate
  StepApproximant approximant = StepApproximant::pade;
  int taylor_order = 12;
  double step_tolerance = 1e-9;
};

/// Iterates the grid-space one-step matrix; with tbc on, the rows beyond
/// radial index j_c are replaced each step by the outgoing extrapolation.
inline Trajectory propagate_matrix_step(const HamiltonianMatrix& h, const WavepacketState& initial, double dt,
                                        double t_final, int stride, const MatrixStepOptions& opt = {}) {
  const GridSpec& g = initial.grid;
  require(h.grid() == g, "matrix_step: state and Hamiltonian live on different grids");
  require(stride >= 1, "matrix_step: stride must be >= 1");
  const int steps = step_count(dt, t_final - initial.time);
  const double err = matrix_step_error(h, dt, opt.approximant, opt.taylor_order);
  if (err > opt.step_tolerance) {
    throw ValidationError("matrix_step: step error " + detail::format_double(err) + " exceeds " +
                          detail::format_double(opt.step_tolerance) + "; reduce dt or raise the Taylor order");
  }
  const int side = edge_side_points(g);
  const int j_c = opt.tbc_jc < 0 ? side - 1 : opt.tbc_jc;
  if (opt.tbc) require(j_c >= 2 && j_c <= side, "matrix_step: tbc j_c must be in 2..n/2");

  const CMatrix u = grid_step_matrix(h, dt, opt.approximant, opt.taylor_order);
  Trajectory traj;
  traj.provenance["method"] = "matrix_step";
  traj.provenance["approximant"] = opt.approximant == StepApproximant::pade    ? std::string("pade")
                                   : opt.approximant == StepApproximant::eigen ? std::string("eigen")
                                       : "taylor(" + std::to_string(opt.taylor_order) + ")";
  traj.provenance["step_error"] = detail::format_double(err);
  traj.provenance["dt"] = detail::format_double(dt);
  traj.provenance["tbc"] = opt.tbc ? "on j_c=" + std::to_string(j_c) : "off";
  traj.push(initial);

  const double norm0 = initial.norm();
  WavepacketState cur = initial;
  CVector next(g.n_points);
  for (int step = 1; step <= steps; ++step) {
    next.noalias() = u * cur.amplitudes;
    if (opt.tbc) tbc_apply_to_state(next, tbc_ratios(cur, j_c, opt.tbc_theta), g, j_c);
    cur.amplitudes.swap(next);
    cur.time = initial.time + step * dt;
    const double nrm = cur.norm();
    if (!std::isfinite(nrm) || nrm > 10.0 * norm0) {
      throw NumericalError("matrix_step: norm grew to " + detail::format_double(nrm) + " at t = " +
                           detail::format_double(cur.time) + " (initial " + detail::format_double(norm0) + ")");
    }
    if (step % stride == 0 || step == steps) traj.push(cur);
  }
  return traj;
}

struct ReferenceOptions {
  double box_length = 2000.0;
  int n_start = 8192;
  int n_max = 65536;
  double dt = 0.005;
  double tolerance = 1e-9;
  double region_halfwidth = 85.0;
  int stride = 200;
};

struct ReferenceResult {
  Trajectory trajectory;
  int n_points = 0;
  double last_change = 0.0;
  bool converged = false;
};

/// Large-box split-operator reference. Doubles N until the final
/// inner-region state moves by less than the tolerance; the finer of the
/// last pair is returned.
inline ReferenceResult converged_reference(const GaussianInitial& f, const PotentialModel& potential, double t_final,
                                           const ReferenceOptions& opt = {}) {
  require(opt.n_start >= 4 && opt.n_max >= 2 * opt.n_start, "reference: n_max must allow at least one doubling");
  ReferenceResult res;
  auto run = [&](int n) {
    const GridSpec g = make_grid(n, opt.box_length);
    return propagate_split5(initial_gaussian(g, f.a, f.p0, f.x0), potential, opt.dt, t_final, opt.stride);
  };
  Trajectory coarse = run(opt.n_start);
  for (int n = 2 * opt.n_start; n <= opt.n_max; n *= 2) {
    Trajectory fine = run(n);
    const WavepacketState& a = coarse.back();
    const WavepacketState& b = fine.back();
    double change = 0.0;
    for (int j = 0; j < a.grid.n_points; ++j) {
      if (std::abs(a.grid.x(j)) <= opt.region_halfwidth) {
        change = std::max(change, std::abs(a.amplitudes[j] - b.amplitudes[2 * j]));
      }
    }
    res.trajectory = std::move(fine);
    res.n_points = n;
    res.last_change = change;
    if (change < opt.tolerance) {
      res.converged = true;
      break;
    }
    coarse = res.trajectory;
  }
  res.trajectory.provenance["reference_n"] = std::to_string(res.n_points);
  res.trajectory.provenance["reference_change"] = detail::format_double(res.last_change);
  return res;
}

}  // namespace sescap
