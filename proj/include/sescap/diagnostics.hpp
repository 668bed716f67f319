#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sescap/grid.hpp"
#include "sescap/propagation.hpp"

namespace sescap {

/// Box Fourier amplitudes C(k): unitary coefficients indexed by signed k
/// in ascending order. Positive k stand in for outgoing C, negative for D.
struct MomentumSpectrum {
  RVector k;
  CVector c;
};

inline MomentumSpectrum momentum_spectrum(const WavepacketState& state) {
  return MomentumSpectrum{state.grid.wavenumbers(), to_fourier(state)};
}

/// Continuum amplitude density C(k) with psi(x) = \int dk C(k) e^{ikx}:
///   C(k_n) = dx / (2 pi) sum_j psi_j exp(-i k_n x_j).
/// Unlike momentum_spectrum it does not depend on the grid resolution.
inline MomentumSpectrum amplitude_density(const WavepacketState& state) {
  MomentumSpectrum s = momentum_spectrum(state);
  s.c *= state.grid.dx() * std::sqrt(static_cast<double>(state.grid.n_points)) / (2.0 * pi);
  return s;
}

/// The part of a state with |x| >= x_edge (zero elsewhere): on a box larger
/// than the simulation box this is the wave that has already left it.
inline WavepacketState exterior_part(const WavepacketState& state, double x_edge) {
  WavepacketState out = state;
  for (int j = 0; j < state.grid.n_points; ++j) {
    if (std::abs(state.grid.x(j)) < x_edge) out.amplitudes[j] = 0.0;
  }
  return out;
}

/// One side only: x >= x_edge for the right edge, x <= -x_edge for the left.
inline WavepacketState exterior_part(const WavepacketState& state, double x_edge, bool right) {
  WavepacketState out = state;
  for (int j = 0; j < state.grid.n_points; ++j) {
    const double x = state.grid.x(j);
    if (right ? x < x_edge : x > -x_edge) out.amplitudes[j] = 0.0;
  }
  return out;
}

/// Outgoing amplitude density per edge, reported on k > 0: the larger of
/// C_right(k) (wave beyond +x_edge) and C_left(-k) (wave beyond -x_edge).
/// Keeping the sides apart avoids interference nodes between the two
/// edges, which never meet.
inline MomentumSpectrum outgoing_density(const WavepacketState& state, double x_edge) {
  const MomentumSpectrum r = amplitude_density(exterior_part(state, x_edge, true));
  const MomentumSpectrum l = amplitude_density(exterior_part(state, x_edge, false));
  const Eigen::Index n = r.k.size();
  std::vector<double> ks;
  std::vector<cplx> cs;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (r.k[i] <= 0.0) continue;
    const cplx left = l.c[n - i];  // k ascending from -N/2: -k_i sits at n - i
    ks.push_back(r.k[i]);
    cs.push_back(std::abs(left) > std::abs(r.c[i]) ? left : r.c[i]);
  }
  MomentumSpectrum out;
  out.k = Eigen::Map<RVector>(ks.data(), static_cast<Eigen::Index>(ks.size()));
  out.c = Eigen::Map<CVector>(cs.data(), static_cast<Eigen::Index>(cs.size()));
  return out;
}

struct ReflectionReport {
  RVector k;        // positive wavenumbers
  RVector bound;    // |C(k)| exp(-k sin(theta) ell)
  double max_bound = 0.0;
  double k_at_max = 0.0;
  std::vector<int> violating;  // indices into k with bound > epsilon
  bool violations_low_k_interval = true;  // violating set is {0..m} (smallest k first)
  double epsilon = 1e-6;
  double theta = 0.0;
  double absorber_length = 0.0;
  double onset = std::numeric_limits<double>::infinity();
  double onset_threshold = 0.0;
  std::string spectrum;  // which C(k) was used, for the report header
};

/// Reflection criterion  |C(k)| exp(-k sin(theta) ell) <= epsilon  over k > 0,
/// with ell the extent of the scaled tail.
inline ReflectionReport reflection_bound(const MomentumSpectrum& s, double theta, double absorber_length,
                                         double epsilon = 1e-6) {
  require(std::isfinite(theta) && theta >= 0.0 && theta < pi / 2, "reflection_bound: theta must lie in [0, pi/2)");
  require(absorber_length >= 0.0, "reflection_bound: absorber length must be >= 0");
  require(epsilon > 0.0, "reflection_bound: epsilon must be positive");
  ReflectionReport r;
  r.epsilon = epsilon;
  r.theta = theta;
  r.absorber_length = absorber_length;
  std::vector<double> ks, bs;
  for (Eigen::Index i = 0; i < s.k.size(); ++i) {
    if (s.k[i] <= 0.0) continue;
    ks.push_back(s.k[i]);
    bs.push_back(std::abs(s.c[i]) * std::exp(-s.k[i] * std::sin(theta) * absorber_length));
  }
  r.k = Eigen::Map<RVector>(ks.data(), static_cast<Eigen::Index>(ks.size()));
  r.bound = Eigen::Map<RVector>(bs.data(), static_cast<Eigen::Index>(bs.size()));
  for (std::size_t i = 0; i < bs.size(); ++i) {
    if (bs[i] > r.max_bound) {
      r.max_bound = bs[i];
      r.k_at_max = ks[i];
    }
    if (bs[i] > epsilon) r.violating.push_back(static_cast<int>(i));
  }
  for (std::size_t i = 0; i < r.violating.size(); ++i) {
    if (r.violating[i] != static_cast<int>(i)) r.violations_low_k_interval = false;
  }
  return r;
}

enum class ErrorNorm { max, l2 };

/// Error between two states over |x| <= halfwidth. The coarser state is
/// resampled onto the finer grid by trigonometric interpolation, so the
/// result does not depend on the argument order.
inline double inner_region_error(const WavepacketState& a, const WavepacketState& b, double halfwidth,
                                 ErrorNorm norm = ErrorNorm::max) {
  require(halfwidth > 0.0, "inner_region_error: halfwidth must be positive");
  const bool a_finer = a.grid.dx() < b.grid.dx() ||
                       (a.grid.dx() == b.grid.dx() && a.grid.n_points >= b.grid.n_points);
  const WavepacketState& fine = a_finer ? a : b;
  const WavepacketState& coarse = a_finer ? b : a;
  std::vector<double> xs;
  std::vector<int> idx;
  for (int j = 0; j < fine.grid.n_points; ++j) {
    const double x = fine.grid.x(j);
    if (std::abs(x) <= halfwidth) {
      xs.push_back(x);
      idx.push_back(j);
    }
  }
  require(std::abs(halfwidth) <= coarse.grid.half_length() + 1e-12,
          "inner_region_error: region extends beyond the coarser box");
  const CVector other = fine.grid == coarse.grid ? CVector() : trig_interpolate(coarse, xs);
  double out = 0.0;
  for (std::size_t p = 0; p < idx.size(); ++p) {
    const cplx c = fine.grid == coarse.grid ? coarse.amplitudes[idx[p]] : other[static_cast<Eigen::Index>(p)];
    const double d = std::abs(fine.amplitudes[idx[p]] - c);
    out = norm == ErrorNorm::max ? std::max(out, d) : out + d * d;
  }
  return norm == ErrorNorm::max ? out : std::sqrt(out * fine.grid.dx());
}

struct ErrorSample {
  double t;
  double error;
};

inline std::vector<ErrorSample> inner_region_error(const Trajectory& candidate, const Trajectory& reference,
                                                   double halfwidth, ErrorNorm norm = ErrorNorm::max) {
  require(candidate.snapshots.size() == reference.snapshots.size(),
          "inner_region_error: trajectories have different snapshot counts");
  std::vector<ErrorSample> out;
  for (std::size_t i = 0; i < candidate.snapshots.size(); ++i) {
    const double ta = candidate.snapshots[i].time;
    const double tb = reference.snapshots[i].time;
    if (std::abs(ta - tb) > 1e-9 * std::max(1.0, std::abs(ta))) {
      throw ValidationError("inner_region_error: snapshot time mismatch " + detail::format_double(ta) + " vs " +
                            detail::format_double(tb));
    }
    out.push_back({ta, inner_region_error(candidate.snapshots[i], reference.snapshots[i], halfwidth, norm)});
  }
  return out;
}

/// max(|psi(x_edge)|, |psi(-x_edge)|) for each snapshot.
inline std::vector<ErrorSample> edge_amplitude(const Trajectory& traj, double x_edge) {
  std::vector<ErrorSample> out;
  const double xs[2] = {-x_edge, x_edge};
  for (const auto& s : traj.snapshots) {
    const CVector v = trig_interpolate(s, std::span<const double>(xs, 2));
    out.push_back({s.time, std::max(std::abs(v[0]), std::abs(v[1]))});
  }
  return out;
}

/// First snapshot time at which the edge amplitude exceeds the threshold;
/// +infinity if it never does.
inline double edge_onset(const Trajectory& traj, double x_edge, double threshold) {
  for (const auto& e : edge_amplitude(traj, x_edge)) {
    if (e.error > threshold) return e.t;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace sescap
