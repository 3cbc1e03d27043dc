#include "umbir/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace umbir::fft {
namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename Make> fftw_plan make_plan(Make make) {
  const std::lock_guard lock(planner_mutex());
  return make();
}

void destroy(fftw_plan plan) {
  const std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

} // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) {
    p <<= 1U;
  }
  return p;
}

std::vector<std::complex<double>> forward_real(std::span<const double> x,
                                               std::size_t n) {
  std::vector<double> in(n, 0.0);
  std::copy_n(x.begin(), std::min(n, x.size()), in.begin());
  std::vector<std::complex<double>> out(n / 2 + 1);
  auto *out_ptr = reinterpret_cast<fftw_complex *>(out.data());
  fftw_plan plan = make_plan([&] {
    return fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out_ptr,
                                FFTW_ESTIMATE);
  });
  fftw_execute(plan);
  destroy(plan);
  return out;
}

std::vector<double> inverse_real(std::span<const std::complex<double>> spectrum,
                                 std::size_t n) {
  // c2r destroys its input.
  std::vector<std::complex<double>> in(n / 2 + 1, 0.0);
  std::copy_n(spectrum.begin(), std::min(in.size(), spectrum.size()),
              in.begin());
  std::vector<double> out(n);
  auto *in_ptr = reinterpret_cast<fftw_complex *>(in.data());
  fftw_plan plan = make_plan([&] {
    return fftw_plan_dft_c2r_1d(static_cast<int>(n), in_ptr, out.data(),
                                FFTW_ESTIMATE);
  });
  fftw_execute(plan);
  destroy(plan);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto &v : out) {
    v *= scale;
  }
  return out;
}

std::vector<double> envelope(std::span<const double> x) {
  if (x.empty()) {
    return {};
  }
  const std::size_t n = next_pow2(2 * x.size());
  std::vector<std::complex<double>> buf(n, 0.0);
  std::copy(x.begin(), x.end(), buf.begin());
  auto *ptr = reinterpret_cast<fftw_complex *>(buf.data());
  fftw_plan fwd = make_plan([&] {
    return fftw_plan_dft_1d(static_cast<int>(n), ptr, ptr, FFTW_FORWARD,
                            FFTW_ESTIMATE);
  });
  fftw_plan inv = make_plan([&] {
    return fftw_plan_dft_1d(static_cast<int>(n), ptr, ptr, FFTW_BACKWARD,
                            FFTW_ESTIMATE);
  });
  fftw_execute(fwd);
  // Analytic signal: keep DC and Nyquist, double positive bins, drop negative.
  for (std::size_t k = 1; k < n / 2; ++k) {
    buf[k] *= 2.0;
  }
  for (std::size_t k = n / 2 + 1; k < n; ++k) {
    buf[k] = 0.0;
  }
  fftw_execute(inv);
  destroy(fwd);
  destroy(inv);
  std::vector<double> env(x.size());
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < x.size(); ++i) {
    env[i] = std::abs(buf[i]) * scale;
  }
  return env;
}

} // namespace umbir::fft
