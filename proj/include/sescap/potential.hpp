#pragma once

#include <cmath>
#include <string>
#include <type_traits>
#include <variant>

#include "sescap/types.hpp"

namespace sescap {

/// Well between two symmetric barriers: V(x) = (x^2/2 - 0.8) exp(-0.1 x^2).
struct TestWellBarrier {};

struct FreeParticle {};

/// V(x) = omega^2 x^2 / 2.
struct Harmonic {
  double omega = 1.0;
};

/// Analytic potential; every model must be evaluable off the real axis.
class PotentialModel {
 public:
  using Kind = std::variant<TestWellBarrier, FreeParticle, Harmonic>;

  PotentialModel() = default;
  PotentialModel(Kind kind) : kind_(kind) {}  // NOLINT: implicit by design of the variant wrapper

  static PotentialModel test_well_barrier() { return {TestWellBarrier{}}; }
  static PotentialModel free() { return {FreeParticle{}}; }
  static PotentialModel harmonic(double omega) { return {Harmonic{omega}}; }

  cplx operator()(cplx z) const {
    return std::visit(
        [z](const auto& m) -> cplx {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, TestWellBarrier>) {
            return (0.5 * z * z - 0.8) * std::exp(-0.1 * z * z);
          } else if constexpr (std::is_same_v<M, FreeParticle>) {
            return cplx{0.0};
          } else {
            return 0.5 * m.omega * m.omega * z * z;
          }
        },
        kind_);
  }

  double operator()(double x) const { return (*this)(cplx{x, 0.0}).real(); }

  std::string tag() const {
    return std::visit(
        [](const auto& m) -> std::string {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, TestWellBarrier>) {
            return "test_well_barrier";
          } else if constexpr (std::is_same_v<M, FreeParticle>) {
            return "free";
          } else {
            return "harmonic(omega=" + std::to_string(m.omega) + ")";
          }
        },
        kind_);
  }

  const Kind& kind() const { return kind_; }

 private:
  Kind kind_ = TestWellBarrier{};
};

inline RVector sample_potential(const PotentialModel& v, const RVector& xs) {
  RVector out(xs.size());
  for (Eigen::Index j = 0; j < xs.size(); ++j) out[j] = v(xs[j]);
  return out;
}

}  // namespace sescap
