#include "bundl/eegsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bundl/dsp.hpp"
#include "bundl/rng.hpp"

namespace bundl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long long to_samples(double seconds, double fs) { return std::llround(seconds * fs); }

// Linear attack/release envelope; ramp never exceeds a quarter of the event.
double ramp_envelope(double t, double dur, double ramp) {
  const double r = std::min(ramp, dur / 4.0);
  if (r <= 0.0) return 1.0;
  return std::min({1.0, t / r, (dur - t) / r});
}

void add_decaying_pulse(std::vector<double>& wav, double fs, double t0, double amp, double tau) {
  const auto n0 = static_cast<long long>(std::ceil(t0 * fs));
  const long long n1 = std::min<long long>(static_cast<long long>(wav.size()),
                                           to_samples(t0 + 5.0 * tau, fs));
  for (long long n = std::max<long long>(n0, 0); n < n1; ++n) {
    const double t = static_cast<double>(n) / fs - t0;
    wav[static_cast<std::size_t>(n)] += amp * std::exp(-t / tau);
  }
}

// Seizure rhythm: a sharp 3-harmonic oscillation in the configured band with
// a decaying spike riding each cycle peak, under an attack/release envelope.
std::vector<double> seizure_waveform(const SourceEvent& e, double fs, Rng& rng) {
  const auto n = static_cast<std::size_t>(to_samples(e.duration_s, fs));
  std::vector<double> wav(n, 0.0);
  const double f0 = rng.uniform(e.f_lo_hz + 0.1, e.f_hi_hz - 0.1);
  const double phi = rng.uniform(0.0, kTwoPi);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double w = kTwoPi * f0 * t + phi;
    wav[i] = std::sin(w) + 0.5 * std::sin(2.0 * w) + (1.0 / 3.0) * std::sin(3.0 * w);
  }
  // Cycle peaks of the fundamental: w = pi/2 (mod 2*pi).
  const double t_first = std::fmod(0.5 * std::numbers::pi - phi + kTwoPi, kTwoPi) / (kTwoPi * f0);
  for (double tp = t_first; tp < e.duration_s; tp += 1.0 / f0)
    add_decaying_pulse(wav, fs, tp, rng.uniform(1.0, 2.0), 0.04);
  for (std::size_t i = 0; i < n; ++i)
    wav[i] *= e.amplitude * ramp_envelope(static_cast<double>(i) / fs, e.duration_s, 5.0);
  return wav;
}

// Interictal-like spike train: one-sided positive pulses at a rate drawn
// from the event band.
std::vector<double> spike_waveform(const SourceEvent& e, double fs, Rng& rng) {
  const auto n = static_cast<std::size_t>(to_samples(e.duration_s, fs));
  std::vector<double> wav(n, 0.0);
  const double rate = rng.uniform(e.f_lo_hz, e.f_hi_hz);
  const double t_first = rng.uniform(0.0, 1.0 / rate);
  for (double tp = t_first; tp < e.duration_s; tp += 1.0 / rate)
    add_decaying_pulse(wav, fs, tp, 1.0, 0.02);
  for (std::size_t i = 0; i < n; ++i)
    wav[i] *= e.amplitude * ramp_envelope(static_cast<double>(i) / fs, e.duration_s, 0.5);
  return wav;
}

std::vector<double> slow_wave_waveform(const SourceEvent& e, double fs, Rng& rng) {
  const auto n = static_cast<std::size_t>(to_samples(e.duration_s, fs));
  std::vector<double> wav(n);
  const double f0 = rng.uniform(e.f_lo_hz, e.f_hi_hz);
  const double phi = rng.uniform(0.0, kTwoPi);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    wav[i] = e.amplitude * std::sin(kTwoPi * f0 * t + phi) * ramp_envelope(t, e.duration_s, 2.0);
  }
  return wav;
}

// Band-limited background: a bank of equal-amplitude random-phase sines on a
// 0.25 Hz grid across the band, advanced by phasor recurrence. Total power
// is amplitude^2 / 2, matching a plain sine of the same amplitude.
std::vector<double> background_waveform(const SourceEvent& e, double fs, Rng& rng) {
  const auto n = static_cast<std::size_t>(to_samples(e.duration_s, fs));
  std::vector<double> wav(n, 0.0);
  constexpr double kStep = 0.25;
  std::vector<double> freqs;
  for (double f = e.f_lo_hz + 0.5 * kStep; f < e.f_hi_hz; f += kStep) freqs.push_back(f);
  if (freqs.empty()) freqs.push_back(0.5 * (e.f_lo_hz + e.f_hi_hz));
  const double amp = e.amplitude / std::sqrt(static_cast<double>(freqs.size()));
  for (const double f : freqs) {
    const double c = std::cos(kTwoPi * f / fs), s = std::sin(kTwoPi * f / fs);
    const double phi = rng.uniform(0.0, kTwoPi);
    double pr = std::cos(phi), pi = std::sin(phi);
    for (std::size_t i = 0; i < n; ++i) {
      wav[i] += amp * pi;  // amp * sin(w t + phi)
      const double nr = pr * c - pi * s;
      pi = pr * s + pi * c;
      pr = nr;
    }
  }
  return wav;
}

std::vector<double> gaussian_waveform(const SourceEvent& e, double fs, Rng& rng) {
  const auto n = static_cast<std::size_t>(to_samples(e.duration_s, fs));
  std::vector<double> wav(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    wav[i] = e.amplitude * rng.normal() * ramp_envelope(t, e.duration_s, 1.0);
  }
  return wav;
}

std::vector<double> synth_waveform(const SourceEvent& e, double fs, Rng& rng) {
  switch (e.kind) {
    case SourceKind::seizure: return seizure_waveform(e, fs, rng);
    case SourceKind::spike: return spike_waveform(e, fs, rng);
    case SourceKind::slow_wave: return slow_wave_waveform(e, fs, rng);
    case SourceKind::background: return background_waveform(e, fs, rng);
    case SourceKind::gaussian: return gaussian_waveform(e, fs, rng);
  }
  throw std::invalid_argument("bad SourceKind");
}

void validate_events(const std::vector<SourceEvent>& events, const Montage& m,
                     const SimConfig& cfg) {
  for (const auto& e : events) {
    if (e.channel >= m.size()) throw std::invalid_argument("source event: bad channel");
    if (!(e.onset_s >= 0.0) || !(e.duration_s > 0.0) ||
        e.onset_s + e.duration_s > cfg.recording_len_s + 1e-9)
      throw std::invalid_argument("source event: bad onset/duration");
    if (!(e.f_lo_hz < e.f_hi_hz)) throw std::invalid_argument("source event: bad band");
    if (!(e.amplitude >= 0.0)) throw std::invalid_argument("source event: bad amplitude");
  }
}

// Adds wav (scaled by the spatial kernel) to every channel of a
// channel-major field. Gains below 1e-4 are skipped.
void spread_into(std::vector<double>& field, const std::vector<double>& wav,
                 const SourceEvent& e, const Montage& m, const SimConfig& cfg,
                 std::size_t n_samples) {
  const auto t0 = static_cast<std::size_t>(to_samples(e.onset_s, m.sample_rate_hz));
  const std::size_t len = std::min(wav.size(), n_samples - std::min(t0, n_samples));
  for (std::size_t c = 0; c < m.size(); ++c) {
    const double g = spatial_gain(m, e.channel, c, cfg.spatial_sigma_rad);
    if (g < 1e-4) continue;
    double* dst = field.data() + c * n_samples + t0;
    for (std::size_t i = 0; i < len; ++i) dst[i] += g * wav[i];
  }
}

}  // namespace

const char* to_string(SnrBand band) {
  switch (band) {
    case SnrBand::high: return "high";
    case SnrBand::mid: return "mid";
    case SnrBand::low: return "low";
  }
  throw std::invalid_argument("bad SnrBand");
}

SnrBand snr_band_from(const std::string& name) {
  if (name == "high") return SnrBand::high;
  if (name == "mid") return SnrBand::mid;
  if (name == "low") return SnrBand::low;
  throw std::invalid_argument("unknown SNR band: " + name);
}

std::pair<double, double> snr_range_db(SnrBand band) {
  switch (band) {
    case SnrBand::high: return {3.1, 6.0};
    case SnrBand::mid: return {0.92, 3.1};
    case SnrBand::low: return {-1.6, 0.92};
  }
  throw std::invalid_argument("bad SnrBand");
}

const char* to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::seizure: return "seizure";
    case SourceKind::spike: return "spike";
    case SourceKind::slow_wave: return "slow_wave";
    case SourceKind::background: return "background";
    case SourceKind::gaussian: return "gaussian";
  }
  throw std::invalid_argument("bad SourceKind");
}

std::vector<SourceEvent> synthesize_sources(const SimConfig& cfg, const Montage& m,
                                            std::size_t seizure_channel, uint64_t seed) {
  if (seizure_channel >= m.size()) throw std::invalid_argument("bad seizure channel");
  if (cfg.recording_len_s < cfg.seiz_dur_max_s)
    throw std::invalid_argument("recording too short for the longest seizure");
  const double fs = m.sample_rate_hz;
  const long long total = to_samples(cfg.recording_len_s, fs);
  Rng rng(seed);
  std::vector<SourceEvent> events;

  // Draws a sample-aligned onset so the event fits in the recording.
  auto place = [&](double dur_s) {
    const long long dur = to_samples(dur_s, fs);
    const long long onset = rng.uniform_int(0, total - dur);
    return std::pair<double, double>{static_cast<double>(onset) / fs,
                                     static_cast<double>(dur) / fs};
  };

  // One seizure, origin fixed per subject by the caller.
  {
    const long long dur = to_samples(rng.uniform(cfg.seiz_dur_min_s, cfg.seiz_dur_max_s), fs);
    const long long onset = rng.uniform_int(0, total - dur);
    events.push_back({SourceKind::seizure, seizure_channel, static_cast<double>(onset) / fs,
                      static_cast<double>(dur) / fs, cfg.seiz_f_lo_hz, cfg.seiz_f_hi_hz, 1.0});
  }

  // Nominal event lengths are capped by the recording so short recordings
  // stay generatable; at the default length every cap is inactive.
  const double len = cfg.recording_len_s;

  // 1-5 interictal spike trains, anywhere, each under 10 s.
  const int n_spikes = static_cast<int>(rng.uniform_int(1, 5));
  std::vector<std::size_t> noise_channels;
  for (int i = 0; i < n_spikes; ++i) {
    const auto ch = static_cast<std::size_t>(rng.bounded(m.size()));
    const long long dur = static_cast<long long>(
        std::floor(rng.uniform(std::min(5.0, len), std::min(10.0, len)) * fs));
    const long long onset = rng.uniform_int(0, total - dur);
    events.push_back({SourceKind::spike, ch, static_cast<double>(onset) / fs,
                      static_cast<double>(dur) / fs, 6.0, 14.0, 1.0});
    noise_channels.push_back(ch);
  }

  // One slow wave on an anterior or posterior electrode.
  {
    auto sites = anterior_channels(m);
    for (auto c : posterior_channels(m)) sites.push_back(c);
    const std::size_t ch = sites[rng.bounded(sites.size())];
    const auto [onset, dur] = place(rng.uniform(std::min(5.0, len), std::min(60.0, len)));
    events.push_back({SourceKind::slow_wave, ch, onset, dur, 1.0, 3.0, 1.0});
    noise_channels.push_back(ch);
  }

  // Whole-recording background rhythms: posterior alpha, frontal beta.
  events.push_back({SourceKind::background, m.index_of("Pz"), 0.0, cfg.recording_len_s, 8.0,
                    13.0, 1.0});
  events.push_back({SourceKind::background, m.index_of("Fz"), 0.0, cfg.recording_len_s, 13.0,
                    30.0, 0.5});

  // Gaussian bursts at every seizure/noise source site plus the central pair.
  const double nyq = fs / 2.0;
  std::vector<std::size_t> burst_sites{seizure_channel};
  for (auto c : noise_channels) burst_sites.push_back(c);
  burst_sites.push_back(m.index_of("C3"));
  burst_sites.push_back(m.index_of("C4"));
  for (const auto ch : burst_sites) {
    const auto [onset, dur] = place(rng.uniform(std::min(120.0, len), std::min(300.0, len)));
    events.push_back({SourceKind::gaussian, ch, onset, dur, 0.0, nyq, 1.0});
  }
  // Extra bursts hugging the seizure onset from both sides.
  const double seiz_on = events[0].onset_s;
  const double pre_start = std::max(0.0, seiz_on - 30.0);
  if (seiz_on - pre_start > 0.0)
    events.push_back({SourceKind::gaussian, seizure_channel, pre_start, seiz_on - pre_start, 0.0,
                      nyq, 1.0});
  const double post_end = std::min(cfg.recording_len_s, seiz_on + 30.0);
  if (post_end - seiz_on > 0.0)
    events.push_back({SourceKind::gaussian, seizure_channel, seiz_on, post_end - seiz_on, 0.0,
                      nyq, 1.0});

  validate_events(events, m, cfg);
  return events;
}

MixResult mix_fields(const std::vector<SourceEvent>& events, const Montage& m,
                     const SimConfig& cfg, uint64_t seed) {
  validate_events(events, m, cfg);
  const double fs = m.sample_rate_hz;
  const auto n_samples = static_cast<std::size_t>(to_samples(cfg.recording_len_s, fs));
  const std::size_t field_len = m.size() * n_samples;

  std::vector<double> seiz_field(field_len, 0.0);
  std::vector<double> other_field(field_len, 0.0);
  std::vector<double> gauss_field(field_len, 0.0);

  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    Rng wrng(derive_seed(seed, Stream::waveform, {i}));
    const auto wav = synth_waveform(e, fs, wrng);
    auto& target = e.kind == SourceKind::gaussian
                       ? gauss_field
                       : (e.kind == SourceKind::seizure ? seiz_field : other_field);
    spread_into(target, wav, e, m, cfg, n_samples);
  }

  // Fix the structured power split: seizure field power is
  // seizure_power_ratio times the combined power of the other sources.
  const double p_seiz = mean_square(std::span<const double>(seiz_field));
  const double p_other = mean_square(std::span<const double>(other_field));
  if (p_seiz <= 0.0) throw std::runtime_error("mix_fields: seizure field has zero power");
  const double seiz_scale =
      p_other > 0.0 ? std::sqrt(cfg.seizure_power_ratio * p_other / p_seiz) : 1.0;

  MixResult out;
  out.structured = std::move(other_field);
  for (std::size_t i = 0; i < field_len; ++i) out.structured[i] += seiz_scale * seiz_field[i];

  const double p_struct = mean_square(std::span<const double>(out.structured));
  if (p_struct <= 0.0)
    throw std::runtime_error("mix_fields: structured field has zero power, SNR undefined");

  Rng mrng(derive_seed(seed, Stream::mix));
  const auto [lo, hi] = snr_range_db(cfg.snr);
  const double target_snr_db = mrng.uniform(lo, hi);
  const double p_needed = p_struct / std::pow(10.0, target_snr_db / 10.0);

  double p_gauss = mean_square(std::span<const double>(gauss_field));
  if (p_gauss <= 0.0) {
    // Degenerate Gaussian sources: fall back to white noise over the whole
    // recording so the SNR target is still meaningful.
    Rng nrng(derive_seed(seed, Stream::noise_floor));
    for (auto& v : gauss_field) v = nrng.normal();
    p_gauss = mean_square(std::span<const double>(gauss_field));
  }
  const double g_scale = std::sqrt(p_needed / p_gauss);
  for (auto& v : gauss_field) v *= g_scale;
  out.gaussian = std::move(gauss_field);
  out.snr_db =
      10.0 * std::log10(p_struct / mean_square(std::span<const double>(out.gaussian)));
  return out;
}

Recording mix_to_scalp(const std::vector<SourceEvent>& events, const Montage& m,
                       const SimConfig& cfg, uint64_t seed) {
  auto mix = mix_fields(events, m, cfg, seed);
  Recording rec;
  rec.n_channels = m.size();
  rec.n_samples = static_cast<std::size_t>(to_samples(cfg.recording_len_s, m.sample_rate_hz));
  rec.sample_rate_hz = m.sample_rate_hz;
  rec.signal.resize(mix.structured.size());
  for (std::size_t i = 0; i < mix.structured.size(); ++i)
    rec.signal[i] = static_cast<float>(mix.structured[i] + mix.gaussian[i]);
  rec.snr_db = mix.snr_db;
  rec.events = events;
  for (const auto& e : events)
    if (e.kind == SourceKind::seizure)
      rec.clean_intervals.push_back({e.onset_s, e.onset_s + e.duration_s});
  check_intervals(rec.clean_intervals, cfg.recording_len_s);
  return rec;
}

std::vector<Recording> generate_subject(const SimConfig& cfg, const Montage& m, int subject_id) {
  std::vector<Recording> out;
  Rng srng(derive_seed(cfg.seed, Stream::subject, {static_cast<uint64_t>(subject_id)}));
  const auto n_rec = static_cast<int>(srng.uniform_int(cfg.rec_min, cfg.rec_max));
  const auto seiz_ch = static_cast<std::size_t>(srng.bounded(m.size()));
  for (int r = 0; r < n_rec; ++r) {
    const uint64_t src_seed =
        derive_seed(cfg.seed, Stream::sources, {static_cast<uint64_t>(subject_id),
                                                static_cast<uint64_t>(r)});
    const uint64_t mix_seed =
        derive_seed(cfg.seed, Stream::record, {static_cast<uint64_t>(subject_id),
                                               static_cast<uint64_t>(r)});
    const auto events = synthesize_sources(cfg, m, seiz_ch, src_seed);
    Recording rec = mix_to_scalp(events, m, cfg, mix_seed);
    rec.subject = subject_id;
    rec.record = r;
    out.push_back(std::move(rec));
  }
  return out;
}

void generate_corpus(const SimConfig& cfg, const Montage& m,
                     const std::function<void(Recording&&)>& sink) {
  if (cfg.n_subjects <= 0) throw std::invalid_argument("generate_corpus: n_subjects must be > 0");
  if (cfg.rec_min < 1 || cfg.rec_max < cfg.rec_min)
    throw std::invalid_argument("generate_corpus: bad recording count range");
  for (int s = 0; s < cfg.n_subjects; ++s)
    for (auto& rec : generate_subject(cfg, m, s)) sink(std::move(rec));
}

}  // namespace bundl
