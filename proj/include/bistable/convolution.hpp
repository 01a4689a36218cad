#pragma once

// Discrete convolution with a symmetric kernel under constant continuation
// of the field beyond both edges.
//
//   out[i] = sum_j w[j] f[clamp(i - j)]
//
// Outputs whose whole stencil sees one constant value reproduce that value
// exactly, so the spatially constant equilibria are exact fixed points.
// The direct path sums deviations from f[i] and keeps relative accuracy in
// regions where the field is tiny; the FFT path carries an absolute
// round-off floor near 1e-16 there, which grows at an unstable zero state.

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "bistable/errors.hpp"
#include "bistable/kernels.hpp"

namespace bistable {

enum class ConvolutionMethod { fft, direct };

namespace detail {

// FFTW planning and plan destruction are not thread safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

struct FftwPlanDestroy {
  void operator()(fftw_plan p) const {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};
using FftwPlan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, FftwPlanDestroy>;

/// Smallest n' >= n of the form 2^a 3^b 5^c 7^d.
inline std::size_t next_fast_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t f : {2u, 3u, 5u, 7u})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

}  // namespace detail

/// Reference O(N (2J+1)) summation.
inline void convolve_direct(const DiscreteKernel& k, std::span<const double> in, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(in.size());
  const int J = k.half_width();
  const auto w = k.weights();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double ref = in[static_cast<std::size_t>(i)];
    double s = 0.0;
    for (int j = -J; j <= J; ++j) {
      const std::ptrdiff_t src = std::clamp<std::ptrdiff_t>(i - j, 0, n - 1);
      s += w[static_cast<std::size_t>(j + J)] * (in[static_cast<std::size_t>(src)] - ref);
    }
    out[static_cast<std::size_t>(i)] = ref + s;
  }
}

namespace detail {

// Copies in[i] to out[i] wherever in is constant on [i - J, i + J] (edges
// continued).
inline void restore_plateaus(std::span<const double> in, std::span<double> out, std::size_t J) {
  const std::size_t n = in.size();
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start;
    while (end + 1 < n && in[end + 1] == in[start]) ++end;
    // Run [start, end]; edges extend runs touching them indefinitely.
    const std::size_t lo = start == 0 ? 0 : start + J;
    const std::size_t hi = end == n - 1 ? n - 1 : (end >= J ? end - J : 0);
    if (end == n - 1 || end >= J)
      for (std::size_t i = lo; i <= hi && i < n; ++i) out[i] = in[i];
    start = end + 1;
  }
}

}  // namespace detail

/// Convolution of length-N fields with one kernel. The FFT path pads the
/// field by J edge cells on each side and uses a transform of length
/// >= N + 2J; the kernel is wrapped circularly so that no aliasing reaches
/// the N retained outputs. Immutable after construction; apply() may be
/// called concurrently.
class Convolver {
 public:
  Convolver(const DiscreteKernel& kernel, std::size_t n, ConvolutionMethod method = ConvolutionMethod::fft)
      : kernel_(kernel), n_(n), method_(method) {
    if (n < 1) throw ConfigurationError("convolver needs at least one grid point");
    if (method_ == ConvolutionMethod::fft) plan();
  }

  std::size_t size() const { return n_; }
  ConvolutionMethod method() const { return method_; }
  const DiscreteKernel& kernel() const { return kernel_; }
  std::size_t transform_size() const { return p_; }

  void apply(std::span<const double> in, std::span<double> out) const {
    if (in.size() != n_ || out.size() != n_)
      throw ConfigurationError("convolver: field length does not match grid");
    if (method_ == ConvolutionMethod::direct) {
      convolve_direct(kernel_, in, out);
      return;
    }
    const std::size_t J = static_cast<std::size_t>(kernel_.half_width());
    const std::size_t nc = p_ / 2 + 1;
    detail::FftwBuffer<double> buf(fftw_alloc_real(p_));
    detail::FftwBuffer<fftw_complex> spec(fftw_alloc_complex(nc));
    const double ref = in[0];
    for (std::size_t m = 0; m < p_; ++m) {
      double v = 0.0;
      if (m < n_ + 2 * J) {
        const std::size_t src = m < J ? 0 : std::min(m - J, n_ - 1);
        v = in[src] - ref;
      }
      buf[m] = v;
    }
    fftw_execute_dft_r2c(forward_.get(), buf.get(), spec.get());
    for (std::size_t q = 0; q < nc; ++q) {
      const std::complex<double> a(spec[q][0], spec[q][1]);
      const std::complex<double> r = a * kernel_hat_[q];
      spec[q][0] = r.real();
      spec[q][1] = r.imag();
    }
    fftw_execute_dft_c2r(inverse_.get(), spec.get(), buf.get());
    const double scale = 1.0 / static_cast<double>(p_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = ref + buf[i + J] * scale;
    detail::restore_plateaus(in, out, J);
  }

  std::vector<double> operator()(std::span<const double> in) const {
    std::vector<double> out(in.size());
    apply(in, out);
    return out;
  }

 private:
  void plan() {
    const std::size_t J = static_cast<std::size_t>(kernel_.half_width());
    p_ = detail::next_fast_size(n_ + 2 * J);
    const std::size_t nc = p_ / 2 + 1;
    detail::FftwBuffer<double> buf(fftw_alloc_real(p_));
    detail::FftwBuffer<fftw_complex> spec(fftw_alloc_complex(nc));
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      const int len = static_cast<int>(p_);
      forward_.reset(fftw_plan_dft_r2c_1d(len, buf.get(), spec.get(), FFTW_ESTIMATE));
      inverse_.reset(fftw_plan_dft_c2r_1d(len, spec.get(), buf.get(), FFTW_ESTIMATE));
    }
    if (!forward_ || !inverse_) throw ConfigurationError("FFTW planning failed");

    std::fill(buf.get(), buf.get() + p_, 0.0);
    const auto w = kernel_.weights();
    const auto Ji = static_cast<std::ptrdiff_t>(J);
    for (std::ptrdiff_t j = -Ji; j <= Ji; ++j) {
      const auto idx = static_cast<std::size_t>((j + static_cast<std::ptrdiff_t>(p_)) % static_cast<std::ptrdiff_t>(p_));
      buf[idx] += w[static_cast<std::size_t>(j + Ji)];
    }
    fftw_execute_dft_r2c(forward_.get(), buf.get(), spec.get());
    kernel_hat_.resize(nc);
    for (std::size_t q = 0; q < nc; ++q) kernel_hat_[q] = {spec[q][0], spec[q][1]};
  }

  DiscreteKernel kernel_;
  std::size_t n_;
  ConvolutionMethod method_;
  std::size_t p_ = 0;
  std::vector<std::complex<double>> kernel_hat_;
  detail::FftwPlan forward_;
  detail::FftwPlan inverse_;
};

}  // namespace bistable
