// On-disk corpus container and its in-memory feature view.
//
// Layout of a corpus directory:
//   manifest.json            montage, generator config echo, recording index
//   signals/sNNN_rNN.f32     channel-major little-endian float32 samples
//   labels_<tag>.json        one label file per annotation variant
//
// The feature view (CorpusView) holds standardized per-window features and
// interval annotations only — signals are streamed once and dropped.

#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bundl/eegsim.hpp"
#include "bundl/features.hpp"
#include "bundl/labelnoise.hpp"
#include "bundl/train.hpp"

#include <json.hpp>

namespace bundl {

struct RecordingMeta {
  int subject = 0;
  int record = 0;
  std::size_t n_channels = 0;
  std::size_t n_samples = 0;
  double sample_rate_hz = 200.0;
  std::string file;  // signal path relative to the corpus directory
  double snr_db = std::numeric_limits<double>::quiet_NaN();  // NaN = unknown
  std::vector<Interval> clean_intervals;
};

struct Manifest {
  Montage montage;
  double window_len_s = 1.0;
  nlohmann::json config;  // full generator/ingest configuration echo
  std::vector<RecordingMeta> recordings;
};

Manifest read_manifest(const std::filesystem::path& dir);
void write_manifest(const std::filesystem::path& dir, const Manifest& manifest);

void write_signal(const std::filesystem::path& dir, const RecordingMeta& meta,
                  std::span<const float> signal);
std::vector<float> read_signal(const std::filesystem::path& dir, const RecordingMeta& meta);
// Full Recording (metadata + signal) for one manifest entry.
Recording load_recording(const std::filesystem::path& dir, const Manifest& manifest,
                         std::size_t index);

// A set of per-recording label tracks under one tag ("clean", "over_0.30"...).
struct LabelSet {
  std::string tag;
  nlohmann::json config;  // corruption parameters echo
  double window_len_s = 1.0;
  std::vector<LabelTrack> tracks;  // aligned with Manifest::recordings
};

void write_labels(const std::filesystem::path& dir, const LabelSet& labels);
LabelSet read_labels(const std::filesystem::path& dir, const std::string& tag);
std::vector<std::string> list_label_tags(const std::filesystem::path& dir);

// Clean tracks derived from the manifest's annotation intervals.
LabelSet clean_labels(const Manifest& manifest);

// Signal-free training view.
struct CorpusView {
  double window_len_s = 1.0;
  std::size_t dim = 0;
  std::vector<int> subject_of;  // per recording
  std::vector<int> record_of;
  std::vector<double> rec_len_s;
  std::vector<FeatureMatrix> features;  // standardized per subject
  std::vector<std::vector<Interval>> clean_intervals;

  std::size_t n_recordings() const { return features.size(); }
  std::vector<int> subjects() const;  // unique, sorted
};

// Accumulates recordings one at a time (so only one signal is resident),
// then standardizes each subject with its own pooled statistics.
class CorpusBuilder {
 public:
  explicit CorpusBuilder(double window_len_s) { view_.window_len_s = window_len_s; }
  void add(const Recording& rec);
  CorpusView finish();

 private:
  CorpusView view_;
  bool finished_ = false;
};

// Reads manifest + signals and assembles the standardized feature view.
// Progress lines go to *progress when given.
CorpusView load_corpus_features(const std::filesystem::path& dir,
                                std::ostream* progress = nullptr);

// Training dataset restricted to the given subjects, with labels drawn from
// one LabelSet. Recording indices inside `windows` are local; corpus_rec
// maps them back, and rec_window_begin[r]..rec_window_begin[r+1] is the
// window range of local recording r.
struct DatasetBundle {
  WindowDataset windows;
  std::vector<std::size_t> corpus_rec;
  std::vector<std::size_t> rec_window_begin;

  // Per-recording slices of a parallel per-window vector (e.g. probs).
  std::vector<std::vector<double>> per_recording(std::span<const double> values) const;
};

DatasetBundle make_dataset(const CorpusView& corpus, const LabelSet& labels,
                           std::span<const int> subjects);

}  // namespace bundl
