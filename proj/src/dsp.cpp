#include "bundl/dsp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bundl {

namespace {

// Power at arbitrary angular frequency w (rad/sample): |sum x[n] e^{-iwn}|^2.
// The unit phasor is advanced by recurrence; drift is negligible at the
// signal lengths used here.
template <typename T>
double correlate_power(std::span<const T> x, double w) {
  const double c = std::cos(w), s = std::sin(w);
  double pr = 1.0, pi = 0.0;  // e^{-iwn}
  double re = 0.0, im = 0.0;
  for (const T v : x) {
    re += v * pr;
    im += v * pi;
    const double nr = pr * c + pi * s;
    pi = pi * c - pr * s;
    pr = nr;
  }
  return re * re + im * im;
}

template <typename T>
double band_power_impl(std::span<const T> x, double fs, double f_lo, double f_hi) {
  if (x.empty()) throw std::invalid_argument("band_power: empty signal");
  if (!(f_lo < f_hi) || f_lo < 0.0) throw std::invalid_argument("band_power: bad band");
  const std::size_t n = x.size();
  std::vector<double> tmp;
  std::span<const double> xd;
  if constexpr (std::is_same_v<T, double>) {
    xd = x;
  } else {
    tmp.assign(x.begin(), x.end());
    xd = tmp;
  }
  const double scale = 2.0 / (static_cast<double>(n) * static_cast<double>(n));
  double total = 0.0;
  for (std::size_t k = 1; 2 * k < n; ++k) {  // bins strictly below Nyquist
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    if (f >= f_hi) break;
    if (f >= f_lo) total += scale * dft_bin_power(xd, k);
  }
  return total;
}

template <typename T>
double peak_impl(std::span<const T> x, double fs, double f_lo, double f_hi, double df) {
  if (x.empty()) throw std::invalid_argument("periodogram_peak_hz: empty signal");
  if (!(f_lo < f_hi) || f_lo <= 0.0 || df <= 0.0)
    throw std::invalid_argument("periodogram_peak_hz: bad range");
  double best_f = f_lo, best_p = -1.0;
  for (double f = f_lo; f <= f_hi + 1e-12; f += df) {
    const double p = correlate_power(x, 2.0 * std::numbers::pi * f / fs);
    if (p > best_p) {
      best_p = p;
      best_f = f;
    }
  }
  return best_f;
}

}  // namespace

double dft_bin_power(std::span<const double> x, std::size_t k) {
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("dft_bin_power: empty signal");
  const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
  const double coeff = 2.0 * std::cos(w);
  double s1 = 0.0, s2 = 0.0;
  for (const double v : x) {
    const double s0 = v + coeff * s1 - s2;
    s2 = s1;
    s1 = s0;
  }
  return s1 * s1 + s2 * s2 - coeff * s1 * s2;
}

double band_power(std::span<const double> x, double fs, double f_lo, double f_hi) {
  return band_power_impl(x, fs, f_lo, f_hi);
}

double band_power(std::span<const float> x, double fs, double f_lo, double f_hi) {
  return band_power_impl(x, fs, f_lo, f_hi);
}

double periodogram_peak_hz(std::span<const double> x, double fs, double f_lo, double f_hi,
                           double df) {
  return peak_impl(x, fs, f_lo, f_hi, df);
}

double periodogram_peak_hz(std::span<const float> x, double fs, double f_lo, double f_hi,
                           double df) {
  return peak_impl(x, fs, f_lo, f_hi, df);
}

double mean_square(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (const double v : x) s += v * v;
  return s / static_cast<double>(x.size());
}

double mean_square(std::span<const float> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (const float v : x) s += static_cast<double>(v) * static_cast<double>(v);
  return s / static_cast<double>(x.size());
}

}  // namespace bundl
