#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sescap/boundary_aids.hpp"
#include "sescap/config.hpp"
#include "sescap/diagnostics.hpp"
#include "sescap/hamiltonian.hpp"
#include "sescap/propagation.hpp"

namespace sescap {

struct RunArtifacts {
  Trajectory trajectory;
  std::optional<ReferenceResult> reference;
  std::vector<ErrorSample> errors;  // inner-region error per snapshot (reference runs only)
  std::vector<ErrorSample> edge;    // edge amplitude per snapshot
  ReflectionReport final_bound;
  std::map<std::string, std::string> hamiltonian;
  std::optional<CVector> eigenvalues;
};

inline GaussianInitial make_initial(const InitialConfig& c) { return GaussianInitial{c.a, c.p0, c.x0}; }

/// Reference trajectory with snapshots at the run's snapshot interval.
inline ReferenceResult reference_for(const RunConfig& c, double t_final) {
  ReferenceOptions opt;
  opt.box_length = c.reference.box_length;
  opt.n_start = c.reference.n_start;
  opt.n_max = c.reference.n_max;
  opt.dt = c.reference.dt;
  opt.tolerance = c.reference.tolerance;
  opt.region_halfwidth = c.diagnostics.region_halfwidth;
  opt.stride = step_count(c.reference.dt, c.propagator.dt * c.propagator.stride);
  return converged_reference(make_initial(c.initial), make_potential(c.potential), t_final, opt);
}

/// Runs one configuration end to end: Hamiltonian, propagation, optional
/// reference and diagnostics. Nothing is written to disk here.
inline RunArtifacts run_config(const RunConfig& c) {
  validate_config(c);
  RunArtifacts out;
  const GridSpec g = make_grid(c.grid);
  const HamiltonianSpec hs = make_hamiltonian_spec(c);
  const PropagatorSpec ps = make_propagator_spec(c);
  const GaussianInitial f = make_initial(c.initial);
  const WavepacketState init = transform_initial(f, hs.contour, g);

  switch (ps.method) {
    case PropagationMethod::split5:
      out.trajectory = propagate_split5(init, hs.potential, ps.dt, ps.t_final, ps.snapshot_stride, hs.mass);
      break;
    case PropagationMethod::eigen: {
      const HamiltonianMatrix h = assemble(g, hs);
      out.hamiltonian = h.metadata;
      const EigenDecomposition d = eigendecompose(h);
      out.eigenvalues = d.eigenvalues;
      out.trajectory = propagate_eigen(d, init, snapshot_times(0.0, ps.dt, ps.t_final, ps.snapshot_stride));
      break;
    }
    case PropagationMethod::matrix_step: {
      const HamiltonianMatrix h = assemble(g, hs);
      out.hamiltonian = h.metadata;
      MatrixStepOptions mo;
      mo.tbc = ps.tbc;
      mo.tbc_jc = ps.tbc_jc;
      mo.tbc_theta = hs.contour ? hs.contour->theta : 0.0;
      mo.approximant = ps.approximant;
      mo.taylor_order = ps.taylor_order;
      out.trajectory = propagate_matrix_step(h, init, ps.dt, ps.t_final, ps.snapshot_stride, mo);
      break;
    }
  }

  out.edge = edge_amplitude(out.trajectory, c.diagnostics.x_edge);
  const double theta = hs.contour ? hs.contour->theta : 0.0;
  const double ell = hs.contour ? g.half_length() - hs.contour->x_cap : 0.0;
  if (c.reference.enabled) {
    out.reference = reference_for(c, ps.t_final);
    out.errors = inner_region_error(out.trajectory, out.reference->trajectory, c.diagnostics.region_halfwidth);
    out.final_bound = reflection_bound(outgoing_density(out.reference->trajectory.back(), c.diagnostics.x_edge), theta,
                                       ell, c.diagnostics.epsilon);
    out.final_bound.spectrum = "reference_outgoing";
  } else {
    out.final_bound = reflection_bound(momentum_spectrum(out.trajectory.back()), theta, ell, c.diagnostics.epsilon);
    out.final_bound.spectrum = "run_box";
  }
  out.final_bound.onset_threshold = c.diagnostics.onset_threshold;
  out.final_bound.onset = edge_onset(out.trajectory, c.diagnostics.x_edge, c.diagnostics.onset_threshold);
  return out;
}

// ---------------------------------------------------------------------------
// Invariant suite behind `check`. Each entry is cheap (desk scale).

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CheckOptions {
  bool flip_v1_sign = false;  // mutation hook: must make the symmetry check fail
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline CheckResult make_check(std::string name, bool ok, std::string detail) {
  return CheckResult{std::move(name), ok, std::move(detail)};
}

}  // namespace detail

inline std::vector<CheckResult> run_checks(const RunConfig& c, const CheckOptions& opt = {}) {
  using detail::make_check;
  using detail::sci;
  validate_config(c);
  std::vector<CheckResult> out;
  const GridSpec g = make_grid(c.grid);
  const PotentialModel pot = make_potential(c.potential);
  const ContourParams cp = make_contour(c.contour).value_or(ContourParams{});
  std::mt19937 rng(7u);
  std::normal_distribution<double> nd;

  // spectral_grid
  {
    CVector psi(g.n_points);
    for (auto& v : psi) v = cplx{nd(rng), nd(rng)};
    const WavepacketState s = make_state(g, psi);
    const double rt = (from_fourier(g, to_fourier(s)).amplitudes - psi).norm() / psi.norm();
    out.push_back(make_check("grid.round_trip", rt < 1e-12, "relative error " + sci(rt)));
    const double parseval = std::abs(to_fourier(s).squaredNorm() - psi.squaredNorm()) / psi.squaredNorm();
    out.push_back(make_check("grid.parseval", parseval < 1e-10, "relative mismatch " + sci(parseval)));
    CVector phi(g.n_points);
    for (auto& v : phi) v = cplx{nd(rng), nd(rng)};
    const cplx a{0.3, -1.2}, b{2.0, 0.5};
    const CVector lhs = spectral_derivative(make_state(g, a * psi + b * phi), 2);
    const CVector rhs = a * spectral_derivative(s, 2) + b * spectral_derivative(make_state(g, phi), 2);
    const double lin = (lhs - rhs).cwiseAbs().maxCoeff() / rhs.cwiseAbs().maxCoeff();
    out.push_back(make_check("grid.derivative_linear", lin < 1e-12, "relative deviation " + sci(lin)));
  }

  // contour
  {
    double inner = 0.0, sym = 0.0, fd = 0.0;
    for (int j = 0; j < g.n_points; ++j) {
      const double x = g.x(j);
      const ContourPoint p = contour_eval(cp, x);
      if (std::abs(x) <= cp.x_cap - 10.0 / cp.lambda) inner = std::max(inner, std::abs(p.F - x));
      sym = std::max(sym, std::abs(contour_eval(cp, -x).F + p.F));
    }
    std::uniform_real_distribution<double> ux(-g.half_length(), g.half_length());
    const double h = 1e-4;
    for (int i = 0; i < 100; ++i) {
      const double x = ux(rng);
      const ContourPoint p = contour_eval(cp, x), pp = contour_eval(cp, x + h), pm = contour_eval(cp, x - h);
      fd = std::max({fd, std::abs((pp.F - pm.F) / (2 * h) - p.F1), std::abs((pp.F1 - pm.F1) / (2 * h) - p.F2),
                     std::abs((pp.F2 - pm.F2) / (2 * h) - p.F3)});
    }
    out.push_back(make_check("contour.inner_fidelity", inner < 1e-7, "max |F-x| inside " + sci(inner)));
    out.push_back(make_check("contour.odd_symmetry", sym < 1e-12, "max |F(-x)+F(x)| " + sci(sym)));
    out.push_back(make_check("contour.derivatives_fd", fd < 1e-6, "max FD deviation " + sci(fd)));
    double prev = std::numeric_limits<double>::infinity();
    bool mono = true;
    const cplx rot = std::polar(1.0, cp.theta);
    for (double x = cp.x_cap + 10.0 / cp.lambda; x < 1e4; x *= 1.5) {
      const double d = std::abs(contour_eval(cp, x).F / x - rot);
      if (d > prev) mono = false;
      prev = d;
    }
    out.push_back(make_check("contour.asymptotic_slope", mono, "|F/x - e^{i theta}| monotone, last " + sci(prev)));
  }

  // cap_operator
  {
    const CapOperator cap = build_rf_cap(cp, g, c.potential.mass);
    const CapOperator cap2 = build_rf_cap(cp, g, 2.0 * c.potential.mass);
    double vanish = 0.0, scale = 0.0;
    for (int j = 0; j < g.n_points; ++j) {
      if (std::abs(g.x(j)) <= cp.x_cap - 10.0 / cp.lambda) {
        vanish = std::max({vanish, std::abs(cap.v0[j]), std::abs(cap.v1[j]), std::abs(cap.v2[j])});
      }
      scale = std::max({scale, std::abs(2.0 * cap2.v0[j] - cap.v0[j]), std::abs(2.0 * cap2.v1[j] - cap.v1[j]),
                        std::abs(2.0 * cap2.v2[j] - cap.v2[j])});
    }
    out.push_back(make_check("cap.inner_vanishing", vanish < 1e-10, "max |v| inside " + sci(vanish)));
    out.push_back(make_check("cap.mass_scaling", scale < 1e-12, "max |2 v(2M) - v(M)| " + sci(scale)));
  }

  // hamiltonian
  HamiltonianSpec hs;
  hs.potential = pot;
  hs.mass = c.potential.mass;
  const HamiltonianMatrix hh = assemble(g, hs);
  const EigenDecomposition dh = eigendecompose(hh);
  out.push_back(make_check("hamiltonian.hermitian", adjoint_defect(hh.matrix) < 1e-10,
                           "max |H - H^dagger| " + sci(adjoint_defect(hh.matrix))));
  hs.contour = cp;
  hs.flip_v1_sign = opt.flip_v1_sign;
  const HamiltonianMatrix hn = assemble(g, hs);
  const double tdef = transpose_defect(hn.matrix);
  out.push_back(make_check("hamiltonian.complex_symmetric", tdef < 1e-8, "max |H - H^T| " + sci(tdef)));
  {
    HamiltonianSpec h0 = hs;
    h0.contour->theta = 0.0;
    h0.flip_v1_sign = false;
    const double d0 = (assemble(g, h0).matrix - hh.matrix).cwiseAbs().maxCoeff();
    out.push_back(make_check("hamiltonian.theta0_equivalence", d0 < 1e-12, "max entry difference " + sci(d0)));
  }
  if (tdef < 1e-8) {
    const EigenDecomposition dn = eigendecompose(hn);
    out.push_back(make_check("hamiltonian.residuals", dn.max_residual < 1e-8, "max residual " + sci(dn.max_residual)));
    out.push_back(make_check("hamiltonian.c_orthonormality", dn.max_orthonormality_defect < 1e-6,
                             "max Gram defect " + sci(dn.max_orthonormality_defect)));
    auto nearest = [](const CVector& ev, cplx target) {
      cplx best = ev[0];
      for (Eigen::Index j = 0; j < ev.size(); ++j) {
        if (std::abs(ev[j] - target) < std::abs(best - target)) best = ev[j];
      }
      return best;
    };
    const cplx e0 = dh.eigenvalues[0];
    const cplx e05 = nearest(dn.eigenvalues, e0);
    HamiltonianSpec h3 = hs;
    h3.contour->theta = 0.3;
    const cplx e03 = nearest(eigendecompose(assemble(g, h3)).eigenvalues, e0);
    out.push_back(make_check("hamiltonian.bound_state_theta_stability", std::abs(e05 - e03) < 1e-6,
                             "|E0(0.5) - E0(0.3)| " + sci(std::abs(e05 - e03))));
    out.push_back(make_check("hamiltonian.bound_state_matches_hermitian", std::abs(e05 - e0) < 1e-4,
                             "|E0(NH) - E0(H)| " + sci(std::abs(e05 - e0))));
  } else {
    out.push_back(make_check("hamiltonian.residuals", false, "skipped: matrix is not complex symmetric"));
  }

  // propagation
  {
    const WavepacketState init = initial_gaussian(g, c.initial.a, c.initial.p0, c.initial.x0);
    const Trajectory tr = propagate_split5(init, pot, 0.01, 60.0, 6000);
    const double drift = std::abs(tr.back().norm() - init.norm());
    out.push_back(make_check("propagation.split5_norm", drift < 1e-8, "norm drift over t=60 " + sci(drift)));
    const Trajectory te = propagate_eigen(dh, init, {0.0, 10.0});
    const Trajectory ts = propagate_split5(init, pot, 0.01, 10.0, 1000);
    const double agree = inner_region_error(te.back(), ts.back(), g.half_length());
    out.push_back(make_check("propagation.eigen_vs_split5", agree < 1e-6, "max difference at t=10 " + sci(agree)));
    const double recon = (te.snapshots[0].amplitudes - init.amplitudes).cwiseAbs().maxCoeff();
    out.push_back(make_check("propagation.eigen_t0", recon < 1e-8, "max |Psi(0) - psi0| " + sci(recon)));
    const double eh = std::abs(te.back().norm() - 1.0);
    out.push_back(make_check("propagation.hermitian_norm", eh < 1e-8, "eigen norm drift " + sci(eh)));
  }

  // boundary_aids
  {
    HamiltonianSpec hd = hs;
    hd.flip_v1_sign = false;
    hd.dc = DcFieldParams{c.dc.x_dc, c.dc.strength, true};
    if (transpose_defect(assemble(g, hd).matrix) < 1e-8) {
      const BoundStateCheck b = check_bound_states(eigendecompose(assemble(g, hd)), cp.x_cap);
      out.push_back(make_check("aids.dc_bound_states", b.passed(1e-6) && !b.bound.empty(),
                               std::to_string(b.bound.size()) + " bound-like, max |Im E| " + sci(b.max_abs_imag)));
    }
    const double v100 = dc_value(DcFieldParams{95.0, 2.0, true}, 100.0).real();
    out.push_back(make_check("aids.dc_value", std::abs(v100 + 5.0) < 1e-14, "V_dc(100) = " + sci(v100)));
  }

  // diagnostics
  {
    CVector psi(g.n_points), phi(g.n_points);
    for (int j = 0; j < g.n_points; ++j) {
      psi[j] = cplx{nd(rng), nd(rng)};
      phi[j] = cplx{nd(rng), nd(rng)};
    }
    const GridSpec g2 = make_grid(2 * g.n_points, g.box_length);
    const WavepacketState a = make_state(g, psi);
    const RVector x2 = g2.positions();
    const WavepacketState b =
        make_state(g2, trig_interpolate(make_state(g, phi), std::span<const double>(x2.data(), x2.size())));
    const double e1 = inner_region_error(a, b, 0.4 * g.box_length);
    const double e2 = inner_region_error(b, a, 0.4 * g.box_length);
    out.push_back(make_check("diagnostics.error_symmetric", std::abs(e1 - e2) <= 1e-14 * e1,
                             "|e(a,b) - e(b,a)| " + sci(std::abs(e1 - e2))));
    const ReflectionReport r0 = reflection_bound(momentum_spectrum(a), 0.0, 10.0);
    const CVector c0 = to_fourier(a);
    double lim = 0.0;
    for (Eigen::Index i = 0, p = 0; i < c0.size(); ++i) {
      if (g.wavenumbers()[i] > 0.0) lim = std::max(lim, std::abs(r0.bound[p++] - std::abs(c0[i])));
    }
    out.push_back(make_check("diagnostics.theta0_bound_limit", lim == 0.0, "max deviation " + sci(lim)));
  }
  return out;
}

}  // namespace sescap
