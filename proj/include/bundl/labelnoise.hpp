// Window labeling and controlled label corruption. Clean annotations are
// half-open intervals; training consumes fixed-length window labels where a
// window is positive when at least half of it overlaps a labeled interval.
// All interval arithmetic happens on an integer grid of `quantum_s` seconds
// (one sample period by default) so labeling is exact and reproducible.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bundl/types.hpp"

namespace bundl {

enum class NoiseKind { clean, random, over, under };

const char* to_string(NoiseKind kind);
NoiseKind noise_kind_from(const std::string& name);

// Filename-friendly tag, e.g. over_0.30, random_0.10 ("clean" has none).
std::string noise_tag(NoiseKind kind, double severity);

struct LabelTrack {
  double window_len_s = 1.0;
  std::vector<int> labels;          // one 0/1 label per window
  std::vector<Interval> intervals;  // interval view consistent with `labels`
};

// Labels every window of a recording from annotation intervals using the
// >= 50% overlap rule. window_len_s must divide len_s exactly (on the
// quantum grid); throws std::invalid_argument otherwise.
LabelTrack window_labels(const std::vector<Interval>& intervals, double len_s,
                         double window_len_s, double quantum_s = 0.005);

// Applies one corruption scheme to a clean track.
//  - clean:  identity; severity is ignored.
//  - random: each window label flips independently with probability
//    `severity`; intervals are re-derived from the flipped windows.
//  - over:  the single annotation interval grows by severity * duration,
//    split evenly between the two sides (odd quantum goes to the offset
//    side). Growth clips at the recording edge — the excess is reassigned
//    to the opposite side — and each side extends at most 60 s.
//  - under: the interval shrinks by severity * duration, split evenly
//    (odd quantum trimmed from the offset side), never below a 29 s floor.
// over/under require exactly one interval and re-derive window labels from
// the perturbed interval. Non-clean kinds require severity in (0, 1).
LabelTrack corrupt(const LabelTrack& clean, NoiseKind kind, double severity, uint64_t seed,
                   double len_s, double quantum_s = 0.005);

}  // namespace bundl
