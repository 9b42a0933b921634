// Hand-crafted window features: four band powers (delta, theta, alpha,
// beta), line length, and variance per channel, concatenated channel-major
// (19 channels x 6 = 114 values for the standard montage). Features are
// standardized per subject with statistics pooled over that subject's own
// windows, so subject statistics never mix data across subjects.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bundl/eegsim.hpp"

namespace bundl {

inline constexpr std::size_t kFeaturesPerChannel = 6;

// Names of the per-channel feature slots, in layout order.
const char* feature_name(std::size_t slot);

// Row-major matrix of raw (unstandardized) window features.
struct FeatureMatrix {
  std::size_t n_windows = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<double> row(std::size_t w) { return {values.data() + w * dim, dim}; }
  std::span<const double> row(std::size_t w) const { return {values.data() + w * dim, dim}; }
};

// Raw feature vector of one window (window_index * window_len_s seconds in).
std::vector<double> extract_features(const Recording& rec, std::size_t window_index,
                                     double window_len_s);

// Features for every whole window of the recording.
FeatureMatrix compute_features(const Recording& rec, double window_len_s);

// Per-feature mean and standard deviation pooled over a subject's windows.
struct SubjectStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population std, floored at 1e-8
};

SubjectStats compute_subject_stats(const std::vector<const FeatureMatrix*>& recordings);

// In-place (x - mean) / std.
void standardize(FeatureMatrix& features, const SubjectStats& stats);

}  // namespace bundl
