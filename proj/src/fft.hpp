#pragma once

// Thin FFTW wrapper. Plans are created once per length under a lock and then
// executed through the thread-safe new-array interface.

#include <complex>
#include <cstddef>
#include <span>

namespace hsdoa::detail {

/// out[k] = sum_n in[n] e^{-j 2 pi k n / N}, k = 0..N/2. `out` holds N/2 + 1.
void rfft(std::span<const double> in, std::span<std::complex<double>> out);

/// Unnormalized inverse of rfft: out[n] = sum over the Hermitian-extended spectrum.
/// Imaginary parts of the DC and Nyquist bins are ignored.
void irfft(std::span<const std::complex<double>> in, std::span<double> out);

/// Unnormalized complex inverse DFT, out[n] = sum_k in[k] e^{+j 2 pi k n / N}.
void ifft(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

}  // namespace hsdoa::detail
