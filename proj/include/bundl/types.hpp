// Small shared value types.

#pragma once

#include <stdexcept>
#include <vector>

namespace bundl {

// Half-open time interval [onset_s, offset_s) in seconds.
struct Interval {
  double onset_s = 0.0;
  double offset_s = 0.0;

  double duration() const { return offset_s - onset_s; }
  bool operator==(const Interval&) const = default;
};

// Validates that intervals are well formed, sorted, non-overlapping, and
// contained in [0, len_s]. Throws std::invalid_argument otherwise.
void check_intervals(const std::vector<Interval>& ivs, double len_s);

// Seconds of overlap between two half-open intervals.
inline double overlap_s(const Interval& a, const Interval& b) {
  const double lo = a.onset_s > b.onset_s ? a.onset_s : b.onset_s;
  const double hi = a.offset_s < b.offset_s ? a.offset_s : b.offset_s;
  return hi > lo ? hi - lo : 0.0;
}

}  // namespace bundl
