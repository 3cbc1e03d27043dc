#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace umbir::fft {

/// Real-to-complex transform of `x` zero-padded (or truncated) to length n.
/// Returns the n/2 + 1 non-negative frequency bins, unnormalized.
[[nodiscard]] std::vector<std::complex<double>>
forward_real(std::span<const double> x, std::size_t n);

/// Inverse of forward_real for a length-n signal, normalized by 1/n.
[[nodiscard]] std::vector<double>
inverse_real(std::span<const std::complex<double>> spectrum, std::size_t n);

/// Magnitude of the analytic signal (Hilbert envelope).
[[nodiscard]] std::vector<double> envelope(std::span<const double> x);

[[nodiscard]] std::size_t next_pow2(std::size_t n);

} // namespace umbir::fft
