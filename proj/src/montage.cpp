#include "bundl/montage.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bundl {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// polar = angle from the vertex (Cz), azimuth = 0 at the nasion, positive
// toward the right ear. Inion direction is azimuth 180.
struct Placement {
  const char* name;
  double polar_deg;
  double azimuth_deg;
};

// Standard 10-20 positions on an idealized spherical head.
constexpr Placement kPlacements[] = {
    {"Fp1", 90.0, -18.0}, {"Fp2", 90.0, 18.0},   {"F3", 60.0, -39.0},
    {"F4", 60.0, 39.0},   {"C3", 45.0, -90.0},   {"C4", 45.0, 90.0},
    {"P3", 60.0, -141.0}, {"P4", 60.0, 141.0},   {"O1", 90.0, -162.0},
    {"O2", 90.0, 162.0},  {"F7", 90.0, -54.0},   {"F8", 90.0, 54.0},
    {"T3", 90.0, -90.0},  {"T4", 90.0, 90.0},    {"T5", 90.0, -126.0},
    {"T6", 90.0, 126.0},  {"Fz", 45.0, 0.0},     {"Cz", 0.0, 0.0},
    {"Pz", 45.0, 180.0},
};

}  // namespace

Montage standard_1020() {
  Montage m;
  m.electrodes.reserve(std::size(kPlacements));
  for (const auto& p : kPlacements) {
    const double th = p.polar_deg * kDeg;
    const double az = p.azimuth_deg * kDeg;
    m.electrodes.push_back(
        {p.name, {std::sin(th) * std::sin(az), std::sin(th) * std::cos(az), std::cos(th)}});
  }
  return m;
}

std::size_t Montage::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < electrodes.size(); ++i)
    if (electrodes[i].name == name) return i;
  throw std::invalid_argument("unknown electrode: " + name);
}

double great_circle(const Montage& m, std::size_t i, std::size_t j) {
  const auto& a = m.electrodes.at(i).pos;
  const auto& b = m.electrodes.at(j).pos;
  double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  if (dot > 1.0) dot = 1.0;
  if (dot < -1.0) dot = -1.0;
  return std::acos(dot);
}

double spatial_gain(const Montage& m, std::size_t origin, std::size_t c, double sigma_rad) {
  const double d = great_circle(m, origin, c);
  return std::exp(-(d * d) / (sigma_rad * sigma_rad));
}

std::vector<std::size_t> anterior_channels(const Montage& m) {
  std::vector<std::size_t> out;
  for (const char* n : {"Fp1", "Fp2", "F3", "F4", "F7", "F8", "Fz"}) out.push_back(m.index_of(n));
  return out;
}

std::vector<std::size_t> posterior_channels(const Montage& m) {
  std::vector<std::size_t> out;
  for (const char* n : {"P3", "P4", "O1", "O2", "T5", "T6", "Pz"}) out.push_back(m.index_of(n));
  return out;
}

}  // namespace bundl
