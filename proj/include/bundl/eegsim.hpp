// Synthetic multichannel scalp EEG with a single seizure per recording plus
// structured interference (epileptiform spikes, slow waves, background
// rhythms) and Gaussian burst noise. Sources are point events at an origin
// electrode, spread across the montage by a Gaussian great-circle kernel,
// and summed; the Gaussian field is rescaled so the structured-to-Gaussian
// power ratio hits a target SNR drawn from the configured band.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bundl/montage.hpp"
#include "bundl/types.hpp"

namespace bundl {

enum class SnrBand { high, mid, low };

const char* to_string(SnrBand band);
SnrBand snr_band_from(const std::string& name);
// Target SNR range in dB: high [3.1, 6.0], mid [0.92, 3.1], low [-1.6, 0.92].
std::pair<double, double> snr_range_db(SnrBand band);

enum class SourceKind { seizure, spike, slow_wave, background, gaussian };

const char* to_string(SourceKind kind);

struct SourceEvent {
  SourceKind kind = SourceKind::background;
  std::size_t channel = 0;  // origin electrode
  double onset_s = 0.0;
  double duration_s = 0.0;
  double f_lo_hz = 0.0;  // oscillation band (informational for gaussian)
  double f_hi_hz = 0.0;
  double amplitude = 1.0;
};

struct SimConfig {
  uint64_t seed = 1;
  int n_subjects = 1;
  int rec_min = 1;
  int rec_max = 10;
  double recording_len_s = 600.0;
  double window_len_s = 1.0;
  SnrBand snr = SnrBand::mid;
  double spatial_sigma_rad = 0.6;
  // Seizure rhythm and duration bounds.
  double seiz_f_lo_hz = 2.5;
  double seiz_f_hi_hz = 4.0;
  double seiz_dur_min_s = 29.0;
  double seiz_dur_max_s = 491.0;
  // Structured power split: seizure field carries this multiple of the
  // combined power of all other structured sources.
  double seizure_power_ratio = 2.0;
};

struct Recording {
  int subject = 0;
  int record = 0;
  std::size_t n_channels = 0;
  std::size_t n_samples = 0;
  double sample_rate_hz = 200.0;
  std::vector<float> signal;  // channel-major: signal[c * n_samples + t]
  std::vector<Interval> clean_intervals;
  double snr_db = 0.0;  // realized structured-to-Gaussian ratio
  std::vector<SourceEvent> events;
};

// Draws the full event list for one recording: one seizure (fixed origin
// channel per subject), 1-5 spike trains, one slow wave, two background
// rhythms (posterior alpha, frontal beta), and Gaussian bursts at every
// source location plus 30 s windows on both sides of the seizure onset.
std::vector<SourceEvent> synthesize_sources(const SimConfig& cfg, const Montage& m,
                                            std::size_t seizure_channel, uint64_t seed);

// Structured and Gaussian scalp fields before summation, channel-major
// doubles, plus the realized SNR after the Gaussian field is scaled to a
// target drawn from the configured band. Throws std::runtime_error when the
// structured field has zero power; a zero-power Gaussian field falls back
// to full-recording white noise before scaling.
struct MixResult {
  std::vector<double> structured;
  std::vector<double> gaussian;
  double snr_db = 0.0;
};

MixResult mix_fields(const std::vector<SourceEvent>& events, const Montage& m,
                     const SimConfig& cfg, uint64_t seed);

// Full recording: mixes fields and sums into float samples.
Recording mix_to_scalp(const std::vector<SourceEvent>& events, const Montage& m,
                       const SimConfig& cfg, uint64_t seed);

// All recordings of one subject (recording count drawn in [rec_min, rec_max],
// seizure channel fixed across the subject's recordings).
std::vector<Recording> generate_subject(const SimConfig& cfg, const Montage& m, int subject_id);

// Streams every recording of the corpus through `sink`, one at a time, so
// callers never hold more than one signal in memory.
void generate_corpus(const SimConfig& cfg, const Montage& m,
                     const std::function<void(Recording&&)>& sink);

}  // namespace bundl
