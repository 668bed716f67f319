#pragma once

#include <cmath>
#include <string>

#include "sescap/types.hpp"

namespace sescap {

/// Shape of the switch g(x) that turns the complex rotation on past +-x_cap.
///   erf : g = 1 + [erf(lambda(x-x_cap)) - erf(lambda(x+x_cap))]/2   (Gaussian tails)
///   tanh: g = 1 + [tanh(lambda(x-x_cap)) - tanh(lambda(x+x_cap))]/2 (exponential tails)
enum class SwitchProfile { erf, tanh };

inline std::string to_string(SwitchProfile p) { return p == SwitchProfile::erf ? "erf" : "tanh"; }

inline SwitchProfile switch_profile_from_string(const std::string& s) {
  if (s == "erf") return SwitchProfile::erf;
  if (s == "tanh") return SwitchProfile::tanh;
  throw ValidationError("contour: unknown switch profile '" + s + "' (expected erf or tanh)");
}

struct ContourParams {
  double theta = 0.5;
  double lambda = 0.9;
  double x_cap = 90.0;
  SwitchProfile profile = SwitchProfile::erf;
};

/// F and its first three derivatives at one real point.
struct ContourPoint {
  cplx F;
  cplx F1;
  cplx F2;
  cplx F3;
};

inline void validate_contour(const ContourParams& p, double box_length) {
  require(std::isfinite(p.theta) && p.theta >= 0.0 && p.theta < pi / 2,
          "contour: theta must satisfy 0 <= theta < pi/2");
  require(std::isfinite(p.lambda) && p.lambda > 0.0, "contour: lambda must be positive");
  require(std::isfinite(p.x_cap) && p.x_cap > 0.0 && p.x_cap < 0.5 * box_length,
          "contour: x_cap must satisfy 0 < x_cap < L/2");
}

namespace detail {

struct SwitchValues {
  double g;   // switch
  double g1;  // g'
  double g2;  // g''
  double G;   // integral_0^x g(s) ds
};

// |x - c| - |x + c| without cancellation in the inner region.
inline double abs_gap(double x, double c) {
  if (x >= c) return -2.0 * c;
  if (x <= -c) return 2.0 * c;
  return -2.0 * x;
}

inline SwitchValues erf_switch(double x, double lambda, double c) {
  const double u1 = lambda * (x - c);
  const double u2 = lambda * (x + c);
  const double inv_sqrt_pi = 1.0 / std::sqrt(pi);
  const double e1 = std::exp(-u1 * u1);
  const double e2 = std::exp(-u2 * u2);
  SwitchValues s{};
  s.g = 1.0 + 0.5 * (std::erf(u1) - std::erf(u2));
  s.g1 = lambda * inv_sqrt_pi * (e1 - e2);
  s.g2 = -2.0 * lambda * lambda * lambda * inv_sqrt_pi * ((x - c) * e1 - (x + c) * e2);
  // integral of erf(u) is u erf(u) + exp(-u^2)/sqrt(pi) = |u| + phi(|u|)
  auto phi = [inv_sqrt_pi](double a) { return -a * std::erfc(a) + std::exp(-a * a) * inv_sqrt_pi; };
  s.G = x + 0.5 * abs_gap(x, c) + (phi(std::abs(u1)) - phi(std::abs(u2))) / (2.0 * lambda);
  return s;
}

inline SwitchValues tanh_switch(double x, double lambda, double c) {
  const double u1 = lambda * (x - c);
  const double u2 = lambda * (x + c);
  auto sech2 = [](double u) {
    const double e = std::exp(-2.0 * std::abs(u));
    return 4.0 * e / ((1.0 + e) * (1.0 + e));
  };
  const double t1 = std::tanh(u1), t2 = std::tanh(u2);
  const double s1 = sech2(u1), s2 = sech2(u2);
  SwitchValues s{};
  s.g = 1.0 + 0.5 * (t1 - t2);
  s.g1 = 0.5 * lambda * (s1 - s2);
  s.g2 = -lambda * lambda * (t1 * s1 - t2 * s2);
  // log cosh(u) = |u| + log1p(exp(-2|u|)) - log 2
  auto psi = [](double a) { return std::log1p(std::exp(-2.0 * a)); };
  s.G = x + 0.5 * abs_gap(x, c) + (psi(std::abs(u1)) - psi(std::abs(u2))) / (2.0 * lambda);
  return s;
}

}  // namespace detail

/// Smooth-exterior-scaling path F(x) = x + (e^{i theta} - 1) G(x), G' = g,
/// symmetric about x = 0 with rotated tails beyond +-x_cap.
inline ContourPoint contour_eval(const ContourParams& p, double x) {
  const detail::SwitchValues s = p.profile == SwitchProfile::erf
                                     ? detail::erf_switch(x, p.lambda, p.x_cap)
                                     : detail::tanh_switch(x, p.lambda, p.x_cap);
  const cplx rot = std::polar(1.0, p.theta) - 1.0;
  return ContourPoint{x + rot * s.G, 1.0 + rot * s.g, rot * s.g1, rot * s.g2};
}

/// Family of initial states exp(-a x^N); the scaled state stays square
/// integrable only for theta < pi/N.
struct InitialFamily {
  int exponent = 2;
  static InitialFamily gaussian() { return {2}; }
};

inline double critical_theta(InitialFamily family) { return pi / family.exponent; }

inline bool theta_admissible(const ContourParams& p, InitialFamily family) {
  return p.theta < critical_theta(family);
}

inline void validate_theta_against_initial(const ContourParams& p, InitialFamily family) {
  require(family.exponent >= 1, "contour: initial family exponent must be >= 1");
  if (!theta_admissible(p, family)) {
    throw ValidationError("contour: theta = " + std::to_string(p.theta) + " >= pi/" +
                          std::to_string(family.exponent) +
                          "; the scaled initial state is not square integrable");
  }
}

}  // namespace sescap
