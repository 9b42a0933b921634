// Deterministic random streams. Every random decision in this project is
// drawn from an Rng seeded through derive_seed(base, {stream, ids...}), so
// results are reproducible bit-for-bit across runs and platforms. The
// generator is xoshiro256++ seeded via splitmix64; distribution transforms
// are implemented here rather than with std:: distributions, whose output
// is implementation-defined.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace bundl {

inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Named sub-streams; values only need to be distinct.
enum class Stream : uint64_t {
  subject = 0x101,
  record = 0x102,
  sources = 0x103,
  mix = 0x104,
  waveform = 0x105,
  noise_floor = 0x106,
  corrupt = 0x107,
  param_init = 0x108,
  pretrain_shuffle = 0x109,
  pretrain_mask = 0x10a,
  shuffle = 0x10b,
  train_mask = 0x10c,
  mc = 0x10d,
  fold = 0x10e,
  inner_split = 0x10f,
  eval_mc = 0x110,
};

// Hash-folds a path of ids onto a base seed. Distinct paths give
// statistically independent streams.
inline uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> path) {
  uint64_t h = base ^ 0x6A09E667F3BCC909ull;
  for (uint64_t p : path) {
    uint64_t s = p;
    h ^= splitmix64(s);
    uint64_t t = h;
    h = splitmix64(t);
  }
  return h;
}

inline uint64_t derive_seed(uint64_t base, Stream stream, std::initializer_list<uint64_t> path = {}) {
  uint64_t h = derive_seed(base, {static_cast<uint64_t>(stream)});
  for (uint64_t p : path) h = derive_seed(h, {p});
  return h;
}

class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& w : state_) w = splitmix64(x);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  uint64_t next() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n) (Lemire's multiply-shift with rejection).
  uint64_t bounded(uint64_t n) {
    uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<uint64_t>(m);
    if (lo < n) {
      const uint64_t t = (0 - n) % n;
      while (lo < t) {
        x = next();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  // Inclusive range.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(bounded(static_cast<uint64_t>(hi - lo + 1)));
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via the polar method; the spare deviate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double k = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * k;
    has_spare_ = true;
    return u * k;
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bundl
