#pragma once

#include <complex>
#include <span>
#include <vector>

#include "smcmc/errors.hpp"

namespace smcmc {

/// Periodogram ordinates of one observed series on the interior frequency
/// grid omega_k = 2 pi k / (n delta_t), k = 1 .. n/2 - 1 (DC and Nyquist
/// excluded). s_k estimates the two-sided spectral density at omega_k.
struct SpectralData {
  std::vector<double> omega;
  std::vector<double> s;
  double delta_t = 0.0;
  int n_samples = 0;
};

/// S_k = (delta_t / n) |DFT(y)_k|^2 on the interior grid. Requires even
/// n >= 4 so the grid is non-empty and Nyquist is a proper bin.
SpectralData periodogram(std::span<const double> y, double delta_t);

/// Welch spectral estimate with Hann-windowed segments, 50% overlap, and a
/// pointwise 95% confidence interval from the scaled chi-squared law with
/// 2 * n_segments degrees of freedom.
struct WelchEstimate {
  std::vector<double> omega;
  std::vector<double> estimate;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  int n_segments = 0;
};

WelchEstimate welch_psd(std::span<const double> y, double delta_t, int segment_length = 256);

namespace detail {

// Iterative radix-2 transform (inverse is unscaled); length must be a power
// of two. General lengths go through the naive O(n^2) transform instead.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse);
std::vector<std::complex<double>> dft(std::span<const double> y);
bool is_pow2(std::size_t n);

}  // namespace detail

}  // namespace smcmc
