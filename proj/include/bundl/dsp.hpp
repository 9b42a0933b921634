// Minimal spectral utilities: Goertzel-style single-bin DFT power, band
// power over integer DFT bins, and a periodogram peak search. Enough for
// feature extraction and for verifying simulator output; no FFT library
// needed at these sizes.

#pragma once

#include <cstddef>
#include <span>

namespace bundl {

// |X_k|^2 of the length-N DFT of x at integer bin k (Goertzel recurrence).
double dft_bin_power(std::span<const double> x, std::size_t k);

// Sum of single-sided periodogram power over DFT bins whose frequency
// k*fs/N lies in [f_lo, f_hi). Scale: (2/N^2)|X_k|^2 per bin (bin 0 and
// Nyquist excluded), so a unit sine at an exact bin yields ~0.5.
double band_power(std::span<const double> x, double fs, double f_lo, double f_hi);
double band_power(std::span<const float> x, double fs, double f_lo, double f_hi);

// Frequency in [f_lo, f_hi] with maximal |X(f)|^2, scanned on a grid of
// step df (direct complex correlation, not bin-quantized).
double periodogram_peak_hz(std::span<const double> x, double fs, double f_lo, double f_hi,
                           double df = 0.05);
double periodogram_peak_hz(std::span<const float> x, double fs, double f_lo, double f_hi,
                           double df = 0.05);

// Mean squared amplitude of a signal (power).
double mean_square(std::span<const double> x);
double mean_square(std::span<const float> x);

}  // namespace bundl
