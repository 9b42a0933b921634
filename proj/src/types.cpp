#include "bundl/types.hpp"

#include <cmath>
#include <string>

namespace bundl {

void check_intervals(const std::vector<Interval>& ivs, double len_s) {
  double prev_off = 0.0;
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    const auto& iv = ivs[i];
    if (!std::isfinite(iv.onset_s) || !std::isfinite(iv.offset_s) || iv.onset_s < 0.0 ||
        iv.offset_s <= iv.onset_s || iv.offset_s > len_s)
      throw std::invalid_argument("interval " + std::to_string(i) + " out of range");
    if (i > 0 && iv.onset_s < prev_off)
      throw std::invalid_argument("intervals overlap or are unsorted at index " +
                                  std::to_string(i));
    prev_off = iv.offset_s;
  }
}

}  // namespace bundl
