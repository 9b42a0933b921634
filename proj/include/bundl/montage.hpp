// Electrode geometry for the standard 19-channel 10-20 scalp montage.
// Electrodes live on the unit sphere; spatial spread of a source is a
// Gaussian kernel in great-circle distance.

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace bundl {

struct Electrode {
  std::string name;
  std::array<double, 3> pos;  // unit vector, x right, y front, z up
};

struct Montage {
  std::vector<Electrode> electrodes;
  double sample_rate_hz = 200.0;

  std::size_t size() const { return electrodes.size(); }
  // Index of a named electrode; throws std::invalid_argument if unknown.
  std::size_t index_of(const std::string& name) const;
};

// The 19 electrodes of the international 10-20 system at 200 Hz.
Montage standard_1020();

// Great-circle distance (radians) between electrodes i and j.
double great_circle(const Montage& m, std::size_t i, std::size_t j);

// Spatial gain of a source at electrode `origin` seen at electrode `c`:
// g(c) = exp(-d(c, origin)^2 / sigma^2) with d in radians.
double spatial_gain(const Montage& m, std::size_t origin, std::size_t c, double sigma_rad);

// Channel indices of the anterior (frontal/frontopolar) and posterior
// (parietal/occipital/posterior-temporal) groups used to place slow-wave
// noise sources.
std::vector<std::size_t> anterior_channels(const Montage& m);
std::vector<std::size_t> posterior_channels(const Montage& m);

}  // namespace bundl
