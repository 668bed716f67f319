#pragma once

#include <cmath>
#include <mutex>
#include <span>
#include <utility>

#include <fftw3.h>

#include "sescap/types.hpp"

namespace sescap {

namespace detail {
// FFTW's planner is not re-entrant.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// In-place complex DFT of fixed length over an owned, FFTW-aligned buffer.
///
/// `forward()` / `inverse()` apply the unitary convention (1/sqrt(n) each way).
/// The raw variants skip the scaling so hot loops can fold it elsewhere.
class FourierTransform {
 public:
  explicit FourierTransform(std::size_t n) : n_(n) {
    std::lock_guard lock(detail::fftw_planner_mutex());
    data_ = fftw_alloc_complex(n_);
    if (data_ == nullptr) throw NumericalError("fftw_alloc_complex failed");
    forward_ = fftw_plan_dft_1d(static_cast<int>(n_), data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(static_cast<int>(n_), data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  FourierTransform(FourierTransform&& other) noexcept
      : n_(other.n_),
        data_(std::exchange(other.data_, nullptr)),
        forward_(std::exchange(other.forward_, nullptr)),
        backward_(std::exchange(other.backward_, nullptr)) {}

  FourierTransform& operator=(FourierTransform&& other) noexcept {
    if (this != &other) {
      release();
      n_ = other.n_;
      data_ = std::exchange(other.data_, nullptr);
      forward_ = std::exchange(other.forward_, nullptr);
      backward_ = std::exchange(other.backward_, nullptr);
    }
    return *this;
  }

  ~FourierTransform() { release(); }

  std::size_t size() const { return n_; }

  std::span<cplx> buffer() { return {reinterpret_cast<cplx*>(data_), n_}; }
  std::span<const cplx> buffer() const { return {reinterpret_cast<const cplx*>(data_), n_}; }

  void forward_raw() { fftw_execute(forward_); }
  void inverse_raw() { fftw_execute(backward_); }

  void forward() {
    forward_raw();
    scale(1.0 / std::sqrt(static_cast<double>(n_)));
  }
  void inverse() {
    inverse_raw();
    scale(1.0 / std::sqrt(static_cast<double>(n_)));
  }

  void load(const CVector& v) {
    auto buf = buffer();
    for (std::size_t i = 0; i < n_; ++i) buf[i] = v[static_cast<Eigen::Index>(i)];
  }
  CVector store() const {
    CVector v(static_cast<Eigen::Index>(n_));
    auto buf = buffer();
    for (std::size_t i = 0; i < n_; ++i) v[static_cast<Eigen::Index>(i)] = buf[i];
    return v;
  }

 private:
  void scale(double s) {
    for (auto& c : buffer()) c *= s;
  }
  void release() {
    if (data_ == nullptr) return;
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(data_);
    data_ = nullptr;
  }

  std::size_t n_;
  fftw_complex* data_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace sescap
