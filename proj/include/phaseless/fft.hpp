#pragma once

#include <complex>
#include <span>
#include <vector>

namespace phaseless {

using cd = std::complex<double>;

// In-place unnormalized DFT of arbitrary length: X[k] = sum_n x[n] e^{-2 pi j k n / len}.
// Powers of two use an iterative radix-2 kernel, every other length goes through
// Bluestein's chirp-z reduction. inverse=true flips the exponent sign, still
// unnormalized.
void fft_inplace(std::span<cd> data, bool inverse = false);

std::vector<cd> fft(std::span<const cd> data);
// Normalized inverse (divides by the length).
std::vector<cd> ifft(std::span<const cd> data);

// Row-major 2D transform, unnormalized in both directions.
void fft2_inplace(std::span<cd> data, std::size_t rows, std::size_t cols, bool inverse = false);

}  // namespace phaseless
