#include "bundl/container.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

namespace bundl {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestName = "manifest.json";

nlohmann::json intervals_to_json(const std::vector<Interval>& ivs) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& iv : ivs) a.push_back({iv.onset_s, iv.offset_s});
  return a;
}

std::vector<Interval> intervals_from_json(const nlohmann::json& a) {
  std::vector<Interval> out;
  for (const auto& e : a) out.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
  return out;
}

nlohmann::json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw std::runtime_error("unparseable JSON in " + path.string());
  return j;
}

void store_json_file(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

Manifest read_manifest(const fs::path& dir) {
  const auto j = load_json_file(dir / kManifestName);
  if (j.value("format", "") != "bundl-corpus")
    throw std::runtime_error("not a corpus directory: " + dir.string());
  Manifest m;
  const auto& mj = j.at("montage");
  m.montage.sample_rate_hz = mj.at("sample_rate_hz").get<double>();
  for (const auto& e : mj.at("electrodes")) {
    Electrode el;
    el.name = e.at("name").get<std::string>();
    const auto& p = e.at("pos");
    el.pos = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
    m.montage.electrodes.push_back(std::move(el));
  }
  m.window_len_s = j.at("window_len_s").get<double>();
  m.config = j.value("config", nlohmann::json::object());
  for (const auto& r : j.at("recordings")) {
    RecordingMeta rm;
    rm.subject = r.at("subject").get<int>();
    rm.record = r.at("record").get<int>();
    rm.n_channels = r.at("n_channels").get<std::size_t>();
    rm.n_samples = r.at("n_samples").get<std::size_t>();
    rm.sample_rate_hz = r.at("sample_rate_hz").get<double>();
    rm.file = r.at("file").get<std::string>();
    rm.snr_db = r.at("snr_db").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                         : r.at("snr_db").get<double>();
    rm.clean_intervals = intervals_from_json(r.at("clean_intervals"));
    m.recordings.push_back(std::move(rm));
  }
  return m;
}

void write_manifest(const fs::path& dir, const Manifest& manifest) {
  nlohmann::json electrodes = nlohmann::json::array();
  for (const auto& e : manifest.montage.electrodes)
    electrodes.push_back({{"name", e.name}, {"pos", {e.pos[0], e.pos[1], e.pos[2]}}});
  nlohmann::json recordings = nlohmann::json::array();
  for (const auto& r : manifest.recordings) {
    nlohmann::json rj{{"subject", r.subject},
                      {"record", r.record},
                      {"n_channels", r.n_channels},
                      {"n_samples", r.n_samples},
                      {"sample_rate_hz", r.sample_rate_hz},
                      {"file", r.file},
                      {"clean_intervals", intervals_to_json(r.clean_intervals)}};
    if (std::isnan(r.snr_db))
      rj["snr_db"] = nullptr;
    else
      rj["snr_db"] = r.snr_db;
    recordings.push_back(std::move(rj));
  }
  const nlohmann::json j{{"format", "bundl-corpus"},
                         {"version", 1},
                         {"montage",
                          {{"sample_rate_hz", manifest.montage.sample_rate_hz},
                           {"electrodes", electrodes}}},
                         {"window_len_s", manifest.window_len_s},
                         {"config", manifest.config},
                         {"recordings", recordings}};
  fs::create_directories(dir);
  store_json_file(dir / kManifestName, j);
}

void write_signal(const fs::path& dir, const RecordingMeta& meta, std::span<const float> signal) {
  if (signal.size() != meta.n_channels * meta.n_samples)
    throw std::invalid_argument("write_signal: size does not match metadata");
  const fs::path path = dir / meta.file;
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(signal.data()),
            static_cast<std::streamsize>(signal.size() * sizeof(float)));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<float> read_signal(const fs::path& dir, const RecordingMeta& meta) {
  const fs::path path = dir / meta.file;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<float> signal(meta.n_channels * meta.n_samples);
  in.read(reinterpret_cast<char*>(signal.data()),
          static_cast<std::streamsize>(signal.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(signal.size() * sizeof(float)))
    throw std::runtime_error("truncated signal file " + path.string());
  return signal;
}

Recording load_recording(const fs::path& dir, const Manifest& manifest, std::size_t index) {
  const auto& meta = manifest.recordings.at(index);
  Recording rec;
  rec.subject = meta.subject;
  rec.record = meta.record;
  rec.n_channels = meta.n_channels;
  rec.n_samples = meta.n_samples;
  rec.sample_rate_hz = meta.sample_rate_hz;
  rec.snr_db = meta.snr_db;
  rec.clean_intervals = meta.clean_intervals;
  rec.signal = read_signal(dir, meta);
  return rec;
}

void write_labels(const fs::path& dir, const LabelSet& labels) {
  nlohmann::json tracks = nlohmann::json::array();
  for (const auto& t : labels.tracks)
    tracks.push_back({{"labels", t.labels}, {"intervals", intervals_to_json(t.intervals)}});
  const nlohmann::json j{{"format", "bundl-labels"},
                         {"version", 1},
                         {"tag", labels.tag},
                         {"config", labels.config},
                         {"window_len_s", labels.window_len_s},
                         {"tracks", tracks}};
  store_json_file(dir / ("labels_" + labels.tag + ".json"), j);
}

LabelSet read_labels(const fs::path& dir, const std::string& tag) {
  const auto j = load_json_file(dir / ("labels_" + tag + ".json"));
  if (j.value("format", "") != "bundl-labels")
    throw std::runtime_error("not a label file: labels_" + tag + ".json");
  LabelSet set;
  set.tag = j.at("tag").get<std::string>();
  set.config = j.value("config", nlohmann::json::object());
  set.window_len_s = j.at("window_len_s").get<double>();
  for (const auto& t : j.at("tracks")) {
    LabelTrack track;
    track.window_len_s = set.window_len_s;
    track.labels = t.at("labels").get<std::vector<int>>();
    track.intervals = intervals_from_json(t.at("intervals"));
    set.tracks.push_back(std::move(track));
  }
  return set;
}

std::vector<std::string> list_label_tags(const fs::path& dir) {
  std::vector<std::string> tags;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.starts_with("labels_") && name.ends_with(".json"))
      tags.push_back(name.substr(7, name.size() - 12));
  }
  std::sort(tags.begin(), tags.end());
  return tags;
}

LabelSet clean_labels(const Manifest& manifest) {
  LabelSet set;
  set.tag = "clean";
  set.window_len_s = manifest.window_len_s;
  set.config = {{"kind", "clean"}};
  for (const auto& r : manifest.recordings) {
    const double len_s = static_cast<double>(r.n_samples) / r.sample_rate_hz;
    set.tracks.push_back(window_labels(r.clean_intervals, len_s, manifest.window_len_s));
  }
  return set;
}

std::vector<int> CorpusView::subjects() const {
  std::set<int> s(subject_of.begin(), subject_of.end());
  return {s.begin(), s.end()};
}

void CorpusBuilder::add(const Recording& rec) {
  if (finished_) throw std::logic_error("CorpusBuilder: already finished");
  view_.subject_of.push_back(rec.subject);
  view_.record_of.push_back(rec.record);
  view_.rec_len_s.push_back(static_cast<double>(rec.n_samples) / rec.sample_rate_hz);
  view_.clean_intervals.push_back(rec.clean_intervals);
  view_.features.push_back(compute_features(rec, view_.window_len_s));
  if (view_.dim == 0) view_.dim = view_.features.back().dim;
  if (view_.features.back().dim != view_.dim)
    throw std::invalid_argument("CorpusBuilder: feature dim mismatch across recordings");
}

CorpusView CorpusBuilder::finish() {
  if (finished_) throw std::logic_error("CorpusBuilder: already finished");
  finished_ = true;
  // Standardize every subject with statistics pooled over that subject's
  // own recordings only.
  std::map<int, std::vector<std::size_t>> by_subject;
  for (std::size_t r = 0; r < view_.features.size(); ++r)
    by_subject[view_.subject_of[r]].push_back(r);
  for (const auto& [subject, recs] : by_subject) {
    std::vector<const FeatureMatrix*> mats;
    for (const auto r : recs) mats.push_back(&view_.features[r]);
    const auto stats = compute_subject_stats(mats);
    for (const auto r : recs) standardize(view_.features[r], stats);
  }
  return std::move(view_);
}

CorpusView load_corpus_features(const fs::path& dir, std::ostream* progress) {
  const Manifest manifest = read_manifest(dir);
  CorpusBuilder builder(manifest.window_len_s);
  for (std::size_t i = 0; i < manifest.recordings.size(); ++i) {
    builder.add(load_recording(dir, manifest, i));
    if (progress)
      *progress << "features " << (i + 1) << "/" << manifest.recordings.size() << "\n";
  }
  return builder.finish();
}

std::vector<std::vector<double>> DatasetBundle::per_recording(
    std::span<const double> values) const {
  if (values.size() != windows.size())
    throw std::invalid_argument("per_recording: size mismatch");
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r + 1 < rec_window_begin.size(); ++r)
    out.emplace_back(values.begin() + static_cast<long>(rec_window_begin[r]),
                     values.begin() + static_cast<long>(rec_window_begin[r + 1]));
  return out;
}

DatasetBundle make_dataset(const CorpusView& corpus, const LabelSet& labels,
                           std::span<const int> subjects) {
  if (labels.tracks.size() != corpus.n_recordings())
    throw std::invalid_argument("make_dataset: label set does not match corpus");
  if (labels.window_len_s != corpus.window_len_s)
    throw std::invalid_argument("make_dataset: window length mismatch");
  const std::set<int> chosen(subjects.begin(), subjects.end());
  DatasetBundle bundle;
  bundle.windows.dim = corpus.dim;
  bundle.rec_window_begin.push_back(0);
  for (std::size_t r = 0; r < corpus.n_recordings(); ++r) {
    if (!chosen.contains(corpus.subject_of[r])) continue;
    const auto& fm = corpus.features[r];
    const auto& track = labels.tracks[r];
    if (track.labels.size() != fm.n_windows)
      throw std::invalid_argument("make_dataset: label count mismatch on recording " +
                                  std::to_string(r));
    const std::size_t local = bundle.corpus_rec.size();
    for (std::size_t w = 0; w < fm.n_windows; ++w)
      bundle.windows.push(fm.row(w), static_cast<double>(track.labels[w]), local,
                          (static_cast<double>(w) + 0.5) * corpus.window_len_s);
    bundle.windows.rec_intervals.push_back(track.intervals);
    bundle.windows.rec_len_s.push_back(corpus.rec_len_s[r]);
    bundle.corpus_rec.push_back(r);
    bundle.rec_window_begin.push_back(bundle.windows.size());
  }
  if (bundle.windows.size() == 0)
    throw std::invalid_argument("make_dataset: no windows for the requested subjects");
  return bundle;
}

}  // namespace bundl
