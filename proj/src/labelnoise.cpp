#include "bundl/labelnoise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "bundl/rng.hpp"

namespace bundl {

namespace {

long long to_q(double seconds, double quantum_s) {
  return std::llround(seconds / quantum_s);
}

// Window labels from integer-quantum intervals; exact arithmetic.
std::vector<int> labels_from_q(const std::vector<std::pair<long long, long long>>& ivs_q,
                               long long len_q, long long win_q) {
  const std::size_t n_windows = static_cast<std::size_t>(len_q / win_q);
  std::vector<long long> covered(n_windows, 0);
  for (const auto& [on, off] : ivs_q) {
    const long long w_first = on / win_q;
    const long long w_last = (off - 1) / win_q;
    for (long long w = w_first; w <= w_last; ++w) {
      const long long lo = std::max(on, w * win_q);
      const long long hi = std::min(off, (w + 1) * win_q);
      if (hi > lo) covered[static_cast<std::size_t>(w)] += hi - lo;
    }
  }
  std::vector<int> labels(n_windows);
  for (std::size_t w = 0; w < n_windows; ++w) labels[w] = 2 * covered[w] >= win_q ? 1 : 0;
  return labels;
}

}  // namespace

const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::clean: return "clean";
    case NoiseKind::random: return "random";
    case NoiseKind::over: return "over";
    case NoiseKind::under: return "under";
  }
  throw std::invalid_argument("bad NoiseKind");
}

NoiseKind noise_kind_from(const std::string& name) {
  if (name == "clean") return NoiseKind::clean;
  if (name == "random") return NoiseKind::random;
  if (name == "over") return NoiseKind::over;
  if (name == "under") return NoiseKind::under;
  throw std::invalid_argument("unknown noise kind: " + name);
}

std::string noise_tag(NoiseKind kind, double severity) {
  if (kind == NoiseKind::clean) return "clean";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%.2f", to_string(kind), severity);
  return buf;
}

LabelTrack window_labels(const std::vector<Interval>& intervals, double len_s,
                         double window_len_s, double quantum_s) {
  if (quantum_s <= 0.0 || window_len_s <= 0.0 || len_s <= 0.0)
    throw std::invalid_argument("window_labels: non-positive length");
  check_intervals(intervals, len_s);
  const long long len_q = to_q(len_s, quantum_s);
  const long long win_q = to_q(window_len_s, quantum_s);
  if (win_q <= 0 || len_q % win_q != 0)
    throw std::invalid_argument("window_labels: window length must divide recording length");

  std::vector<std::pair<long long, long long>> ivs_q;
  ivs_q.reserve(intervals.size());
  for (const auto& iv : intervals)
    ivs_q.emplace_back(to_q(iv.onset_s, quantum_s), to_q(iv.offset_s, quantum_s));

  LabelTrack track;
  track.window_len_s = window_len_s;
  track.labels = labels_from_q(ivs_q, len_q, win_q);
  track.intervals = intervals;
  return track;
}

LabelTrack corrupt(const LabelTrack& clean, NoiseKind kind, double severity, uint64_t seed,
                   double len_s, double quantum_s) {
  if (kind == NoiseKind::clean) return clean;
  if (!(severity > 0.0 && severity < 1.0))
    throw std::invalid_argument("corrupt: severity must lie in (0, 1)");

  if (kind == NoiseKind::random) {
    LabelTrack noisy;
    noisy.window_len_s = clean.window_len_s;
    noisy.labels = clean.labels;
    Rng rng(seed);
    for (auto& l : noisy.labels)
      if (rng.bernoulli(severity)) l = 1 - l;
    // Interval view at window resolution: maximal runs of positive windows.
    for (std::size_t w = 0; w < noisy.labels.size();) {
      if (noisy.labels[w] == 0) {
        ++w;
        continue;
      }
      std::size_t e = w;
      while (e < noisy.labels.size() && noisy.labels[e] == 1) ++e;
      noisy.intervals.push_back({static_cast<double>(w) * clean.window_len_s,
                                 static_cast<double>(e) * clean.window_len_s});
      w = e;
    }
    return noisy;
  }

  if (clean.intervals.size() != 1)
    throw std::invalid_argument("corrupt: over/under need exactly one annotation interval");
  const Interval iv = clean.intervals[0];
  const long long len_q = to_q(len_s, quantum_s);
  const long long on_q = to_q(iv.onset_s, quantum_s);
  const long long off_q = to_q(iv.offset_s, quantum_s);
  const long long dur_q = off_q - on_q;
  const long long delta_q = std::llround(severity * static_cast<double>(dur_q));

  long long new_on = on_q, new_off = off_q;
  if (kind == NoiseKind::over) {
    long long pre = delta_q / 2;
    long long post = delta_q - pre;  // odd quantum extends the offset side
    const long long pre_room = on_q;
    const long long post_room = len_q - off_q;
    long long pre_use = std::min(pre, pre_room);
    long long post_use = std::min(post, post_room);
    // Growth clipped at a recording edge moves to the other side.
    const long long spill_pre = pre - pre_use;
    const long long spill_post = post - post_use;
    post_use = std::min(post_use + spill_pre, post_room);
    pre_use = std::min(pre_use + spill_post, pre_room);
    const long long cap_q = to_q(60.0, quantum_s);
    pre_use = std::min(pre_use, cap_q);
    post_use = std::min(post_use, cap_q);
    new_on = on_q - pre_use;
    new_off = off_q + post_use;
  } else {  // under
    const long long floor_q = to_q(29.0, quantum_s);
    const long long new_dur = std::max(floor_q, dur_q - delta_q);
    const long long shrink = dur_q - new_dur;
    const long long pre = shrink / 2;
    const long long post = shrink - pre;  // odd quantum trimmed from the offset side
    new_on = on_q + pre;
    new_off = off_q - post;
  }

  std::vector<Interval> noisy_ivs{{static_cast<double>(new_on) * quantum_s,
                                   static_cast<double>(new_off) * quantum_s}};
  return window_labels(noisy_ivs, len_s, clean.window_len_s, quantum_s);
}

}  // namespace bundl
