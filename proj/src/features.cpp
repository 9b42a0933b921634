#include "bundl/features.hpp"

#include <cmath>
#include <stdexcept>

#include "bundl/dsp.hpp"

namespace bundl {

namespace {

struct Band {
  double lo, hi;
};

// Classic clinical bands.
constexpr Band kBands[4] = {{1.0, 4.0}, {4.0, 8.0}, {8.0, 13.0}, {13.0, 30.0}};

}  // namespace

const char* feature_name(std::size_t slot) {
  switch (slot) {
    case 0: return "bp_delta";
    case 1: return "bp_theta";
    case 2: return "bp_alpha";
    case 3: return "bp_beta";
    case 4: return "line_length";
    case 5: return "variance";
  }
  throw std::invalid_argument("feature_name: bad slot");
}

std::vector<double> extract_features(const Recording& rec, std::size_t window_index,
                                     double window_len_s) {
  const auto win = static_cast<std::size_t>(std::llround(window_len_s * rec.sample_rate_hz));
  if (win == 0 || (window_index + 1) * win > rec.n_samples)
    throw std::invalid_argument("extract_features: window out of range");
  std::vector<double> out(rec.n_channels * kFeaturesPerChannel);
  std::vector<double> buf(win);
  for (std::size_t c = 0; c < rec.n_channels; ++c) {
    const float* src = rec.signal.data() + c * rec.n_samples + window_index * win;
    for (std::size_t i = 0; i < win; ++i) buf[i] = src[i];
    double* f = out.data() + c * kFeaturesPerChannel;
    for (int b = 0; b < 4; ++b)
      f[b] = band_power(std::span<const double>(buf), rec.sample_rate_hz, kBands[b].lo,
                        kBands[b].hi);
    double ll = 0.0, sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < win; ++i) {
      if (i > 0) ll += std::abs(buf[i] - buf[i - 1]);
      sum += buf[i];
      sq += buf[i] * buf[i];
    }
    const double mean = sum / static_cast<double>(win);
    f[4] = ll;
    f[5] = sq / static_cast<double>(win) - mean * mean;
  }
  return out;
}

FeatureMatrix compute_features(const Recording& rec, double window_len_s) {
  const auto win = static_cast<std::size_t>(std::llround(window_len_s * rec.sample_rate_hz));
  if (win == 0 || rec.n_samples % win != 0)
    throw std::invalid_argument("compute_features: window length must divide the recording");
  FeatureMatrix out;
  out.n_windows = rec.n_samples / win;
  out.dim = rec.n_channels * kFeaturesPerChannel;
  out.values.resize(out.n_windows * out.dim);
  for (std::size_t w = 0; w < out.n_windows; ++w) {
    const auto f = extract_features(rec, w, window_len_s);
    std::copy(f.begin(), f.end(), out.values.begin() + static_cast<long>(w * out.dim));
  }
  return out;
}

SubjectStats compute_subject_stats(const std::vector<const FeatureMatrix*>& recordings) {
  if (recordings.empty())
    throw std::invalid_argument("compute_subject_stats: no recordings");
  const std::size_t dim = recordings.front()->dim;
  std::size_t n = 0;
  std::vector<double> sum(dim, 0.0), sq(dim, 0.0);
  for (const auto* fm : recordings) {
    if (fm->dim != dim) throw std::invalid_argument("compute_subject_stats: dim mismatch");
    for (std::size_t w = 0; w < fm->n_windows; ++w) {
      const auto r = fm->row(w);
      for (std::size_t j = 0; j < dim; ++j) {
        sum[j] += r[j];
        sq[j] += r[j] * r[j];
      }
    }
    n += fm->n_windows;
  }
  if (n == 0) throw std::invalid_argument("compute_subject_stats: no windows");
  SubjectStats st;
  st.mean.resize(dim);
  st.stddev.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    st.mean[j] = sum[j] / static_cast<double>(n);
    const double var = sq[j] / static_cast<double>(n) - st.mean[j] * st.mean[j];
    st.stddev[j] = std::sqrt(var > 0.0 ? var : 0.0);
    if (st.stddev[j] < 1e-8) st.stddev[j] = 1e-8;
  }
  return st;
}

void standardize(FeatureMatrix& features, const SubjectStats& stats) {
  if (features.dim != stats.mean.size())
    throw std::invalid_argument("standardize: dim mismatch");
  for (std::size_t w = 0; w < features.n_windows; ++w) {
    auto r = features.row(w);
    for (std::size_t j = 0; j < features.dim; ++j) r[j] = (r[j] - stats.mean[j]) / stats.stddev[j];
  }
}

}  // namespace bundl
