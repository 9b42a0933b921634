// bundl-lab: command-line front end over the corpus container. Subcommands
// cover corpus simulation, external-data ingestion, label corruption, model
// training, evaluation, method x noise x SNR sweeps, and report viewing.
//
// Conventions: progress and diagnostics go to standard error, reports go to
// files (the `report` viewer prints to standard output). Exit codes:
// 0 success, 1 runtime failure, 2 usage/config error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bundl/container.hpp"
#include "bundl/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bundl;

namespace {

// Mistakes in flags, configs, or referenced paths exit with code 2; anything
// else that throws is a runtime failure and exits with code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- small shared helpers ----

void ensure_fresh_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir) && !fs::is_directory(dir))
    throw UsageError(dir.string() + " exists and is not a directory");
  if (fs::is_directory(dir) && !fs::is_empty(dir) && !force)
    throw UsageError("refusing to write into non-empty " + dir.string() + " (use --force)");
  fs::create_directories(dir);
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

Manifest read_manifest_or_usage(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.json"))
    throw UsageError(dir.string() + " is not a corpus directory (manifest.json missing)");
  return read_manifest(dir);
}

LabelSet read_labels_or_usage(const fs::path& dir, const std::string& tag) {
  if (!fs::exists(dir / ("labels_" + tag + ".json")))
    throw UsageError(dir.string() + " has no label set '" + tag + "' (labels_" + tag +
                     ".json missing)");
  return read_labels(dir, tag);
}

Method parse_method(const std::string& name) {
  try {
    return method_from(name);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

// "auto" matches the z prior to the label corruption family: over-segmented
// labels fix z0, under-segmented labels fix z1, random flips estimate both
// sides, and anything else keeps the over prior (annotators who mark
// generous margins are the default assumption).
ZPrior resolve_prior(const std::string& spec, const std::string& labels_tag) {
  if (spec != "auto") {
    try {
      return z_prior_from(spec);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  if (labels_tag.rfind("over", 0) == 0) return ZPrior::over;
  if (labels_tag.rfind("under", 0) == 0) return ZPrior::under;
  if (labels_tag.rfind("random", 0) == 0) return ZPrior::symmetric;
  return ZPrior::over;
}

std::vector<int> pick_subjects(const CorpusView& corpus, const std::vector<int>& requested) {
  if (requested.empty()) return corpus.subjects();
  const auto all = corpus.subjects();
  for (const int s : requested)
    if (std::find(all.begin(), all.end(), s) == all.end())
      throw UsageError("subject " + std::to_string(s) + " is not present in the dataset");
  return requested;
}

std::vector<int> int_labels(const WindowDataset& data) {
  std::vector<int> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data.p_g[i] >= 0.5 ? 1 : 0;
  return out;
}

std::string json_num(const json& v) {
  if (v.is_null()) return "";
  std::ostringstream s;
  s << v.get<double>();
  return s.str();
}

json log_json(const std::vector<EpochLog>& log) {
  json out = json::array();
  for (const auto& e : log)
    out.push_back({{"epoch", e.epoch},
                   {"mean_loss", e.mean_loss},
                   {"mean_z", e.mean_z},
                   {"wall_ms", e.wall_ms}});
  return out;
}

double recording_len_s(const RecordingMeta& meta) {
  return static_cast<double>(meta.n_samples) / meta.sample_rate_hz;
}

// ---- simulate ----

struct SimulateArgs {
  std::string out;
  int subjects = 12;
  uint64_t seed = 1;
  std::string snr = "mid";
  double duration = 600.0;
  double window = 1.0;
  int rec_min = 1;
  int rec_max = 10;
  bool all_variants = false;
  bool force = false;
};

struct NoiseVariant {
  NoiseKind kind;
  double severity;
};

// The seven standard corruption variants of the benchmark.
constexpr NoiseVariant kStandardVariants[] = {
    {NoiseKind::random, 0.10}, {NoiseKind::over, 0.10},  {NoiseKind::over, 0.30},
    {NoiseKind::over, 0.50},   {NoiseKind::under, 0.10}, {NoiseKind::under, 0.30},
    {NoiseKind::under, 0.50}};

json sim_config_json(const SimConfig& cfg) {
  return json{{"command", "simulate"},
              {"seed", cfg.seed},
              {"n_subjects", cfg.n_subjects},
              {"rec_min", cfg.rec_min},
              {"rec_max", cfg.rec_max},
              {"recording_len_s", cfg.recording_len_s},
              {"window_len_s", cfg.window_len_s},
              {"snr", to_string(cfg.snr)},
              {"spatial_sigma_rad", cfg.spatial_sigma_rad},
              {"seiz_f_lo_hz", cfg.seiz_f_lo_hz},
              {"seiz_f_hi_hz", cfg.seiz_f_hi_hz},
              {"seiz_dur_min_s", cfg.seiz_dur_min_s},
              {"seiz_dur_max_s", cfg.seiz_dur_max_s},
              {"seizure_power_ratio", cfg.seizure_power_ratio}};
}

// Writes signals + manifest + clean labels for one corpus directory.
Manifest build_corpus(const fs::path& dir, const SimConfig& cfg) {
  const Montage m = standard_1020();
  Manifest manifest;
  manifest.montage = m;
  manifest.window_len_s = cfg.window_len_s;
  manifest.config = sim_config_json(cfg);
  generate_corpus(cfg, m, [&](Recording&& rec) {
    RecordingMeta meta;
    meta.subject = rec.subject;
    meta.record = rec.record;
    meta.n_channels = rec.n_channels;
    meta.n_samples = rec.n_samples;
    meta.sample_rate_hz = rec.sample_rate_hz;
    char name[40];
    std::snprintf(name, sizeof(name), "signals/s%03d_r%02d.f32", rec.subject, rec.record);
    meta.file = name;
    meta.snr_db = rec.snr_db;
    meta.clean_intervals = rec.clean_intervals;
    write_signal(dir, meta, rec.signal);
    std::cerr << "subject " << rec.subject << " record " << rec.record << "  snr " << rec.snr_db
              << " dB\n";
    manifest.recordings.push_back(std::move(meta));
  });
  write_manifest(dir, manifest);
  write_labels(dir, clean_labels(manifest));
  return manifest;
}

LabelSet corrupt_label_set(const Manifest& manifest, const LabelSet& base, NoiseKind kind,
                           double severity, uint64_t seed, std::string tag = "") {
  if (base.tracks.size() != manifest.recordings.size())
    throw UsageError("label set '" + base.tag + "' does not match the manifest");
  if (tag.empty()) tag = noise_tag(kind, severity);
  LabelSet noisy;
  noisy.tag = tag;
  noisy.window_len_s = base.window_len_s;
  noisy.config = json{{"command", "corrupt"},
                      {"from", base.tag},
                      {"kind", to_string(kind)},
                      {"severity", severity},
                      {"seed", seed}};
  for (std::size_t r = 0; r < base.tracks.size(); ++r)
    noisy.tracks.push_back(corrupt(base.tracks[r], kind, severity,
                                   derive_seed(seed, Stream::corrupt, {r}),
                                   recording_len_s(manifest.recordings[r])));
  return noisy;
}

void write_standard_variants(const fs::path& dir, const Manifest& manifest, uint64_t seed) {
  const LabelSet clean = clean_labels(manifest);
  for (std::size_t i = 0; i < std::size(kStandardVariants); ++i) {
    const auto& v = kStandardVariants[i];
    write_labels(dir, corrupt_label_set(manifest, clean, v.kind, v.severity,
                                        derive_seed(seed, Stream::corrupt, {i})));
    std::cerr << "labels " << noise_tag(v.kind, v.severity) << "\n";
  }
}

int cmd_simulate(const SimulateArgs& a) {
  SimConfig cfg;
  cfg.seed = a.seed;
  cfg.n_subjects = a.subjects;
  cfg.rec_min = a.rec_min;
  cfg.rec_max = a.rec_max;
  cfg.recording_len_s = a.duration;
  cfg.window_len_s = a.window;
  try {
    cfg.snr = snr_band_from(a.snr);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (a.subjects < 1) throw UsageError("--subjects must be at least 1");
  if (a.duration < cfg.seiz_dur_max_s)
    throw UsageError("--duration must be at least " + std::to_string(cfg.seiz_dur_max_s) +
                     " s so the longest seizure fits");

  const fs::path out = a.out;
  ensure_fresh_dir(out, a.force);
  if (!a.all_variants) {
    build_corpus(out, cfg);
    std::cerr << "corpus written to " << out.string() << "\n";
    return 0;
  }
  // One corpus per SNR band sharing the same seed (identical sources,
  // different noise floors), each with the seven corruption variants.
  for (const SnrBand band : {SnrBand::low, SnrBand::mid, SnrBand::high}) {
    SimConfig c = cfg;
    c.snr = band;
    const fs::path dir = out / (std::string("snr_") + to_string(band));
    ensure_fresh_dir(dir, a.force);
    const Manifest manifest = build_corpus(dir, c);
    write_standard_variants(dir, manifest, cfg.seed);
    std::cerr << "corpus written to " << dir.string() << "\n";
  }
  return 0;
}

// ---- ingest ----

struct IngestArgs {
  std::string spec;
  std::string out;
  bool force = false;
};

// One recording's samples as channel-major float32. `.f32` files hold raw
// little-endian channel-major frames; `.csv` files hold one sample instant
// per line with one column per channel.
std::vector<float> read_input_signal(const fs::path& path, std::size_t n_channels) {
  if (!fs::exists(path)) throw UsageError("missing signal file " + path.string());
  if (path.extension() == ".f32") {
    const auto bytes = fs::file_size(path);
    if (bytes == 0 || bytes % (sizeof(float) * n_channels) != 0)
      throw UsageError(path.string() + ": byte size " + std::to_string(bytes) +
                       " is not a whole number of " + std::to_string(n_channels) +
                       "-channel float32 frames");
    std::vector<float> signal(bytes / sizeof(float));
    std::ifstream in(path, std::ios::binary);
    in.read(reinterpret_cast<char*>(signal.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return signal;
  }
  if (path.extension() == ".csv") {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<float> rows;  // sample-major while parsing
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::size_t fields = 0, pos = 0;
      while (true) {
        const std::size_t comma = line.find(',', pos);
        const std::string field = line.substr(pos, comma - pos);
        try {
          rows.push_back(std::stof(field));
        } catch (const std::exception&) {
          throw UsageError(path.string() + " line " + std::to_string(line_no) +
                           ": cannot parse '" + field + "' as a number");
        }
        ++fields;
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (fields != n_channels)
        throw UsageError(path.string() + " line " + std::to_string(line_no) + ": expected " +
                         std::to_string(n_channels) + " channels, got " + std::to_string(fields));
    }
    const std::size_t n_samples = rows.size() / n_channels;
    if (n_samples == 0) throw UsageError(path.string() + ": no samples");
    std::vector<float> signal(rows.size());
    for (std::size_t t = 0; t < n_samples; ++t)
      for (std::size_t c = 0; c < n_channels; ++c)
        signal[c * n_samples + t] = rows[t * n_channels + c];
    return signal;
  }
  throw UsageError(path.string() + ": unsupported signal format (use .f32 or .csv)");
}

int cmd_ingest(const IngestArgs& a) {
  const fs::path spec_path = a.spec;
  const json spec = read_json_file(spec_path);
  const fs::path base = spec_path.parent_path();
  const Montage m = standard_1020();
  const double fs_hz = spec.value("sample_rate_hz", 200.0);
  const double window_len_s = spec.value("window_len_s", 1.0);
  if (fs_hz <= 0.0 || window_len_s <= 0.0)
    throw UsageError("ingest spec: sample_rate_hz and window_len_s must be positive");
  if (!spec.contains("recordings") || !spec["recordings"].is_array() ||
      spec["recordings"].empty())
    throw UsageError("ingest spec: recordings array is missing or empty");

  const fs::path out = a.out;
  ensure_fresh_dir(out, a.force);
  Manifest manifest;
  manifest.montage = m;
  manifest.window_len_s = window_len_s;
  manifest.config = json{{"command", "ingest"}, {"spec_file", spec_path.string()}, {"spec", spec}};
  LabelSet given;
  given.tag = "given";
  given.window_len_s = window_len_s;
  given.config = json{{"command", "ingest"}, {"spec_file", spec_path.string()}};

  std::vector<std::pair<int, int>> seen;
  for (const json& rj : spec["recordings"]) {
    RecordingMeta meta;
    try {
      meta.subject = rj.at("subject").get<int>();
    } catch (const json::exception&) {
      throw UsageError("ingest spec: every recording needs an integer 'subject'");
    }
    meta.record = rj.value("record", 0);
    if (std::find(seen.begin(), seen.end(), std::pair{meta.subject, meta.record}) != seen.end())
      throw UsageError("ingest spec: duplicate subject/record pair " +
                       std::to_string(meta.subject) + "/" + std::to_string(meta.record));
    seen.emplace_back(meta.subject, meta.record);
    meta.n_channels = m.electrodes.size();
    meta.sample_rate_hz = fs_hz;
    if (!rj.contains("file")) throw UsageError("ingest spec: every recording needs a 'file'");
    const fs::path src = base / rj.at("file").get<std::string>();
    if (rj.contains("n_channels") && rj["n_channels"].get<std::size_t>() != m.electrodes.size())
      throw UsageError(src.string() + " declares " + rj["n_channels"].dump() +
                       " channels; the montage has " + std::to_string(m.electrodes.size()));

    const std::vector<float> signal = read_input_signal(src, m.electrodes.size());
    meta.n_samples = signal.size() / m.electrodes.size();
    const double len_s = static_cast<double>(meta.n_samples) / fs_hz;
    const long long win_samples = std::llround(window_len_s * fs_hz);
    if (win_samples <= 0 || meta.n_samples % static_cast<std::size_t>(win_samples) != 0)
      throw UsageError(src.string() + ": " + std::to_string(meta.n_samples) +
                       " samples is not a whole number of " + std::to_string(window_len_s) +
                       " s windows");

    std::vector<Interval> intervals;
    for (const json& ij : rj.value("intervals", json::array())) {
      if (!ij.is_array() || ij.size() != 2)
        throw UsageError(src.string() + ": intervals must be [onset, offset] pairs");
      const Interval iv{ij[0].get<double>(), ij[1].get<double>()};
      if (!(iv.onset_s >= 0.0) || !(iv.offset_s <= len_s))
        throw UsageError(src.string() + ": interval [" + std::to_string(iv.onset_s) + ", " +
                         std::to_string(iv.offset_s) + ") exceeds the " + std::to_string(len_s) +
                         " s recording");
      intervals.push_back(iv);
    }
    try {
      check_intervals(intervals, len_s);
    } catch (const std::exception& e) {
      throw UsageError(src.string() + ": " + e.what());
    }

    char name[40];
    std::snprintf(name, sizeof(name), "signals/s%03d_r%02d.f32", meta.subject, meta.record);
    meta.file = name;
    write_signal(out, meta, signal);
    given.tracks.push_back(window_labels(intervals, len_s, window_len_s));
    // No ground truth on ingested data: the given annotations live in the
    // "given" label set and the manifest carries no clean intervals.
    manifest.recordings.push_back(std::move(meta));
    std::cerr << "ingested subject " << manifest.recordings.back().subject << " record "
              << manifest.recordings.back().record << " (" << len_s << " s)\n";
  }
  write_manifest(out, manifest);
  write_labels(out, given);
  std::cerr << "corpus written to " << out.string() << "\n";
  return 0;
}

// ---- corrupt ----

struct CorruptArgs {
  std::string dataset;
  std::string kind;
  double severity = 0.0;
  uint64_t seed = 1;
  std::string from = "clean";
  std::string tag;
  bool force = false;
};

int cmd_corrupt(const CorruptArgs& a) {
  NoiseKind kind;
  try {
    kind = noise_kind_from(a.kind);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (kind != NoiseKind::clean && !(a.severity > 0.0 && a.severity < 1.0))
    throw UsageError("--severity must lie in (0, 1) for kind '" + a.kind + "'");

  const fs::path dir = a.dataset;
  const Manifest manifest = read_manifest_or_usage(dir);
  const LabelSet base = read_labels_or_usage(dir, a.from);
  const std::string tag =
      !a.tag.empty() ? a.tag : (kind == NoiseKind::clean ? "clean" : noise_tag(kind, a.severity));
  if (fs::exists(dir / ("labels_" + tag + ".json")) && !a.force)
    throw UsageError("label set '" + tag + "' already exists (use --force to overwrite)");

  write_labels(dir, corrupt_label_set(manifest, base, kind, a.severity, a.seed, tag));
  std::cerr << "wrote labels_" << tag << ".json (" << manifest.recordings.size()
            << " recordings)\n";
  return 0;
}

// ---- train ----

struct TrainArgs {
  std::string dataset;
  std::string labels = "clean";
  std::string out;
  std::string method = "bundl";
  std::string z_prior = "auto";
  double z_fixed = 0.001;
  uint64_t seed = 1;
  std::vector<std::size_t> hidden = {64, 32};
  double dropout = 0.2;
  int epochs = 30;
  int pretrain_epochs = 5;
  int batch_size = 256;
  int n_mc = 20;
  double lr = 1e-3;
  double label_clamp = 0.001;
  double pretrain_margin = 30.0;
  int sa_warmup = 5;
  double sa_alpha = 0.7;
  double sa_ema_decay = 0.9;
  double nal_diag = 2.0;
  std::vector<int> subjects;
};

TrainConfig train_config_from(const TrainArgs& a, ZPrior prior) {
  TrainConfig cfg;
  cfg.method = parse_method(a.method);
  cfg.seed = a.seed;
  cfg.hidden = a.hidden;
  cfg.dropout_rate = a.dropout;
  cfg.epochs = a.epochs;
  cfg.pretrain_epochs = a.pretrain_epochs;
  cfg.batch_size = a.batch_size;
  cfg.lr = a.lr;
  cfg.n_mc = a.n_mc;
  cfg.label_clamp = a.label_clamp;
  cfg.pretrain_margin_s = a.pretrain_margin;
  cfg.z_policy = ZPolicy::from_prior(prior, a.z_fixed);
  cfg.sa_warmup_epochs = a.sa_warmup;
  cfg.sa_alpha = a.sa_alpha;
  cfg.sa_ema_decay = a.sa_ema_decay;
  cfg.nal_diag_logit = a.nal_diag;
  return cfg;
}

int cmd_train(const TrainArgs& a) {
  const fs::path dir = a.dataset;
  read_manifest_or_usage(dir);  // usage check before the heavy load
  const CorpusView corpus = load_corpus_features(dir, &std::cerr);
  const LabelSet labels = read_labels_or_usage(dir, a.labels);
  const std::vector<int> subjects = pick_subjects(corpus, a.subjects);
  const ZPrior prior = resolve_prior(a.z_prior, a.labels);
  const TrainConfig cfg = train_config_from(a, prior);

  const DatasetBundle ds = make_dataset(corpus, labels, subjects);
  std::cerr << "training " << a.method << " on " << ds.windows.size() << " windows from "
            << subjects.size() << " subjects\n";
  const TrainResult result = train_method(ds.windows, cfg, &std::cerr);

  json meta{{"command", "train"},
            {"dataset", a.dataset},
            {"labels", a.labels},
            {"method", to_string(cfg.method)},
            {"seed", cfg.seed},
            {"hidden", cfg.hidden},
            {"dropout_rate", cfg.dropout_rate},
            {"epochs", cfg.epochs},
            {"pretrain_epochs", cfg.pretrain_epochs},
            {"batch_size", cfg.batch_size},
            {"lr", cfg.lr},
            {"n_mc", cfg.n_mc},
            {"label_clamp", cfg.label_clamp},
            {"pretrain_margin_s", cfg.pretrain_margin_s},
            {"z_prior", to_string(prior)},
            {"z_fixed", a.z_fixed},
            {"sa_warmup_epochs", cfg.sa_warmup_epochs},
            {"sa_alpha", cfg.sa_alpha},
            {"sa_ema_decay", cfg.sa_ema_decay},
            {"nal_diag_logit", cfg.nal_diag_logit},
            {"subjects", subjects},
            {"pretrain_log", log_json(result.pretrain_log)},
            {"train_log", log_json(result.train_log)}};
  if (cfg.method == Method::nal) meta["nal_matrix"] = result.nal_matrix;
  save_params(result.params, a.out, meta);
  std::cerr << "model written to " << a.out << "\n";
  return 0;
}

// ---- evaluate ----

struct EvaluateArgs {
  std::string model;
  std::string dataset;
  std::string labels = "clean";
  std::string out;
  double threshold = 0.5;
  int smooth_width = 0;
  uint64_t seed = 1;
  std::vector<int> subjects;
};

int cmd_evaluate(const EvaluateArgs& a) {
  if (!(a.threshold > 0.0 && a.threshold < 1.0))
    throw UsageError("--threshold must lie in (0, 1)");
  if (a.smooth_width > 1 && a.smooth_width % 2 == 0)
    throw UsageError("--smooth-width must be odd");
  if (!fs::exists(a.model)) throw UsageError("missing model file " + a.model);

  json meta;
  const MlpParams params = load_params(a.model, &meta);
  const fs::path dir = a.dataset;
  read_manifest_or_usage(dir);
  const CorpusView corpus = load_corpus_features(dir, &std::cerr);
  if (params.dims.front() != corpus.dim)
    throw UsageError("model expects " + std::to_string(params.dims.front()) +
                     " features, dataset provides " + std::to_string(corpus.dim));
  const LabelSet labels = read_labels_or_usage(dir, a.labels);
  const std::vector<int> subjects = pick_subjects(corpus, a.subjects);
  const DatasetBundle ds = make_dataset(corpus, labels, subjects);

  const std::vector<double> probs = predict_all(params, ds.windows);
  auto per_rec = ds.per_recording(probs);
  if (a.smooth_width > 1)
    for (auto& rec_probs : per_rec) rec_probs = smooth_probs(rec_probs, a.smooth_width);
  std::vector<std::vector<Interval>> events, truth;
  for (std::size_t r = 0; r < per_rec.size(); ++r) {
    events.push_back(events_from_probs(per_rec[r], a.threshold, corpus.window_len_s));
    truth.push_back(labels.tracks[ds.corpus_rec[r]].intervals);
  }
  const EventMetrics em = seizure_metrics(events, truth, ds.windows.rec_len_s);

  // Transition diagnostic under the model's own uncertainty policy.
  const ZPrior prior = resolve_prior(meta.value("z_prior", std::string("over")), a.labels);
  const ZPolicy policy = ZPolicy::from_prior(prior, meta.value("z_fixed", 0.001));
  const int n_mc = meta.value("n_mc", 20);
  const TransitionMatrix tm = transition_matrix(params, ds.windows, policy, n_mc, a.seed);

  json model_echo = meta;
  model_echo.erase("pretrain_log");  // wall-clock noise has no place in reports
  model_echo.erase("train_log");
  const json report{
      {"config",
       {{"command", "evaluate"},
        {"model", a.model},
        {"dataset", a.dataset},
        {"labels", a.labels},
        {"threshold", a.threshold},
        {"smooth_width", a.smooth_width},
        {"seed", a.seed},
        {"subjects", subjects}}},
      {"model", model_echo},
      {"window",
       {{"n_windows", ds.windows.size()},
        {"auroc", auroc(probs, int_labels(ds.windows))},
        {"auprc", auprc(probs, int_labels(ds.windows))}}},
      {"events", to_json(em)},
      {"transition", to_json(tm)}};

  const fs::path out = a.out;
  write_text(out / "report.json", report.dump(2) + "\n");
  std::ostringstream t;
  t << "y_hat,p_clean_0,p_clean_1,n_windows\n";
  t << "0," << tm.rows[0][0] << ',' << tm.rows[0][1] << ',' << tm.n0 << "\n";
  t << "1," << tm.rows[1][0] << ',' << tm.rows[1][1] << ',' << tm.n1 << "\n";
  write_text(out / "transition.csv", t.str());
  std::cerr << "auroc " << report["window"]["auroc"].get<double>() << "  sensitivity "
            << em.sensitivity << "  fpr " << em.fpr_min_per_hour << "  report in " << out.string()
            << "\n";
  return 0;
}

// ---- sweep ----

struct SweepArgs {
  std::string root;
  std::string out;
  std::vector<std::string> methods = {"bundl", "cel", "selfadapt", "nal"};
  std::vector<std::string> noise;  // empty: every non-clean label set present
  std::vector<std::string> snr = {"low", "mid", "high"};
  int jobs = 1;
  uint64_t seed = 1;
  int folds = 5;
  int repeats = 1;
  double inner_frac = 0.2;
  double fpr_limit = 3.0;
  std::vector<double> lr_grid = {1e-3};
  std::string z_prior = "auto";
  double z_fixed = 0.001;
  std::vector<std::size_t> hidden = {64, 32};
  double dropout = 0.2;
  int epochs = 30;
  int pretrain_epochs = 5;
  int batch_size = 256;
  int n_mc = 20;
};

std::string corpus_snr_label(const Manifest& manifest) {
  if (manifest.config.is_object() && manifest.config.contains("snr"))
    return manifest.config["snr"].get<std::string>();
  return "corpus";
}

int cmd_sweep(const SweepArgs& a) {
  for (const auto& m : a.methods) parse_method(m);  // validate before any work

  // Corpora: the root itself, or the snr_<band> children that
  // `simulate --all-variants` lays out.
  std::vector<std::pair<std::string, fs::path>> corpora;
  const fs::path root = a.root;
  if (fs::exists(root / "manifest.json")) {
    corpora.emplace_back(corpus_snr_label(read_manifest(root)), root);
  } else {
    for (const auto& band : a.snr) {
      const fs::path dir = root / ("snr_" + band);
      if (fs::exists(dir / "manifest.json")) corpora.emplace_back(band, dir);
    }
  }
  if (corpora.empty())
    throw UsageError("no corpus under " + root.string() +
                     " (expected manifest.json or snr_<band>/manifest.json)");

  // Features and label sets load once per corpus; cells share them read-only.
  struct CorpusData {
    std::string snr;
    fs::path dir;
    CorpusView view;
    LabelSet clean;
    std::map<std::string, LabelSet> noisy;
    std::vector<std::string> tags;
  };
  std::vector<CorpusData> data;
  for (const auto& [snr, dir] : corpora) {
    CorpusData d;
    d.snr = snr;
    d.dir = dir;
    std::cerr << "loading " << dir.string() << "\n";
    d.view = load_corpus_features(dir, &std::cerr);
    if (!fs::exists(dir / "labels_clean.json"))
      throw UsageError(dir.string() + " has no clean labels; sweep needs a clean reference");
    d.clean = read_labels(dir, "clean");
    d.tags = a.noise;
    if (d.tags.empty())
      for (const auto& t : list_label_tags(dir))
        if (t != "clean") d.tags.push_back(t);
    if (d.tags.empty())
      throw UsageError(dir.string() + " has no noisy label sets; run corrupt first");
    for (const auto& t : d.tags) d.noisy[t] = read_labels_or_usage(dir, t);
    data.push_back(std::move(d));
  }

  struct Cell {
    const CorpusData* corpus;
    std::string tag, method;
    fs::path dir;
  };
  std::vector<Cell> cells;
  for (const auto& d : data)
    for (const auto& t : d.tags)
      for (const auto& m : a.methods)
        cells.push_back({&d, t, m, fs::path(a.out) / "cells" / (d.snr + "_" + t + "_" + m)});
  std::cerr << cells.size() << " cells\n";

  const int jobs = std::max(1, a.jobs);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failures{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& cell = cells[i];
      const std::string name = cell.corpus->snr + "/" + cell.tag + "/" + cell.method;
      if (fs::exists(cell.dir / ".done")) {
        std::lock_guard lock(log_mutex);
        std::cerr << "cell " << name << " already done, skipping\n";
        continue;
      }
      try {
        const auto& d = *cell.corpus;
        TrainConfig cfg;
        cfg.method = parse_method(cell.method);
        cfg.seed = a.seed;
        cfg.hidden = a.hidden;
        cfg.dropout_rate = a.dropout;
        cfg.epochs = a.epochs;
        cfg.pretrain_epochs = a.pretrain_epochs;
        cfg.batch_size = a.batch_size;
        cfg.n_mc = a.n_mc;
        const ZPrior prior = resolve_prior(a.z_prior, cell.tag);
        cfg.z_policy = ZPolicy::from_prior(prior, a.z_fixed);
        CvConfig cv;
        cv.folds = a.folds;
        cv.repeats = a.repeats;
        cv.inner_frac = a.inner_frac;
        cv.lr_grid = a.lr_grid;
        cv.fpr_limit = a.fpr_limit;
        const MetricsReport rep = cross_validate(d.view, d.noisy.at(cell.tag), d.clean, cfg, cv,
                                                 jobs == 1 ? &std::cerr : nullptr);
        const json cj{{"config",
                       {{"command", "sweep-cell"},
                        {"dataset", d.dir.string()},
                        {"snr", d.snr},
                        {"noise", cell.tag},
                        {"method", cell.method},
                        {"seed", a.seed},
                        {"z_prior", to_string(prior)},
                        {"z_fixed", a.z_fixed},
                        {"folds", a.folds},
                        {"repeats", a.repeats},
                        {"inner_frac", a.inner_frac},
                        {"lr_grid", a.lr_grid},
                        {"fpr_limit", a.fpr_limit},
                        {"epochs", a.epochs},
                        {"pretrain_epochs", a.pretrain_epochs},
                        {"batch_size", a.batch_size},
                        {"n_mc", a.n_mc},
                        {"dropout_rate", a.dropout},
                        {"hidden", a.hidden}}},
                      {"report", to_json(rep)}};
        write_text(cell.dir / "report.json", cj.dump(2) + "\n");
        write_text(cell.dir / "report.csv", fold_csv(rep));
        write_text(cell.dir / ".done", "ok\n");
        std::lock_guard lock(log_mutex);
        std::cerr << "cell " << name << "  auroc " << rep.summary.at("auroc").mean
                  << "  sensitivity " << rep.summary.at("sensitivity").mean << "  fpr "
                  << rep.summary.at("fpr_min_per_hour").mean << "\n";
      } catch (const std::exception& e) {
        failures.fetch_add(1);
        std::lock_guard lock(log_mutex);
        std::cerr << "cell " << name << " failed: " << e.what() << "\n";
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Aggregate every completed cell, including ones from interrupted runs.
  std::ostringstream agg, lng;
  agg << "snr,noise,method,n_folds,auroc_mean,auroc_std,auprc_mean,auprc_std,"
         "sensitivity_mean,sensitivity_std,fpr_mean,fpr_std,latency_mean,latency_std,"
         "threshold_mean,threshold_std\n";
  lng << "snr,noise,method,repeat,fold,test_subjects,lr,threshold,auroc,auprc,"
         "sensitivity,fpr_min_per_hour,mean_latency_s\n";
  std::size_t done = 0;
  for (const auto& cell : cells) {
    if (!fs::exists(cell.dir / ".done")) continue;
    const json cj = read_json_file(cell.dir / "report.json");
    const json& rep = cj.at("report");
    agg << cell.corpus->snr << ',' << cell.tag << ',' << cell.method << ','
        << rep.at("folds").size();
    for (const char* key :
         {"auroc", "auprc", "sensitivity", "fpr_min_per_hour", "mean_latency_s", "threshold"}) {
      const json& s = rep.at("summary").at(key);
      agg << ',' << json_num(s.at("mean")) << ',' << json_num(s.at("stddev"));
    }
    agg << '\n';
    for (const json& f : rep.at("folds")) {
      lng << cell.corpus->snr << ',' << cell.tag << ',' << cell.method << ','
          << f.at("repeat").get<int>() << ',' << f.at("fold").get<int>() << ',';
      const auto subs = f.at("test_subjects").get<std::vector<int>>();
      for (std::size_t i = 0; i < subs.size(); ++i) lng << (i ? ";" : "") << subs[i];
      lng << ',' << json_num(f.at("lr")) << ',' << json_num(f.at("threshold")) << ','
          << json_num(f.at("auroc")) << ',' << json_num(f.at("auprc")) << ','
          << json_num(f.at("sensitivity")) << ',' << json_num(f.at("fpr_min_per_hour")) << ','
          << json_num(f.at("mean_latency_s")) << '\n';
    }
    ++done;
  }
  write_text(fs::path(a.out) / "aggregate.csv", agg.str());
  write_text(fs::path(a.out) / "long.csv", lng.str());
  std::cerr << "aggregated " << done << "/" << cells.size() << " cells into "
            << (fs::path(a.out) / "aggregate.csv").string() << "\n";
  return failures.load() == 0 ? 0 : 1;
}

// ---- report ----

void print_csv_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> row;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      row.push_back(line.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width;
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c >= width.size()) width.push_back(0);
      width[c] = std::max(width[c], row[c].size());
    }
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      std::cout << std::left << std::setw(static_cast<int>(width[c]) + 2) << row[c];
    std::cout << "\n";
  }
}

void print_cv_report(const json& rep, const json& config) {
  if (config.is_object() && config.contains("method"))
    std::cout << "cell: snr " << config.value("snr", std::string("?")) << "  noise "
              << config.value("noise", std::string("?")) << "  method "
              << config.value("method", std::string("?")) << "\n";
  std::cout << "folds: " << rep.at("folds").size() << "\n";
  std::cout << std::left << std::setw(20) << "metric" << std::setw(12) << "mean"
            << "stddev\n";
  for (const auto& [name, agg] : rep.at("summary").items())
    std::cout << std::left << std::setw(20) << name << std::setw(12) << json_num(agg.at("mean"))
              << json_num(agg.at("stddev")) << "\n";
}

void print_eval_report(const json& j) {
  const json cfg = j.value("config", json::object());
  std::cout << "model: " << cfg.value("model", std::string("?")) << "\n";
  std::cout << "dataset: " << cfg.value("dataset", std::string("?")) << "  labels "
            << cfg.value("labels", std::string("?")) << "  threshold "
            << cfg.value("threshold", 0.0) << "\n";
  const json& w = j.at("window");
  std::cout << "windows: " << w.at("n_windows") << "  auroc " << json_num(w.at("auroc"))
            << "  auprc " << json_num(w.at("auprc")) << "\n";
  const json& e = j.at("events");
  std::cout << "events: " << e.at("n_detected") << "/" << e.at("n_intervals")
            << " detected  sensitivity " << json_num(e.at("sensitivity")) << "  fpr "
            << json_num(e.at("fpr_min_per_hour")) << " min/hr  latency "
            << (e.at("mean_latency_s").is_null() ? std::string("n/a")
                                                 : json_num(e.at("mean_latency_s")) + " s")
            << "\n";
  const json& t = j.at("transition");
  std::cout << "transition: p(y=1|yhat=0) " << json_num(t.at("rows")[0][1])
            << "  p(y=1|yhat=1) " << json_num(t.at("rows")[1][1]) << "  (n "
            << t.at("n_windows")[0] << "/" << t.at("n_windows")[1] << ")\n";
}

int cmd_report(const std::string& in) {
  fs::path path = in;
  if (fs::is_directory(path)) {
    if (fs::exists(path / "aggregate.csv")) {
      print_csv_table(path / "aggregate.csv");
      return 0;
    }
    if (fs::exists(path / "report.json")) {
      path /= "report.json";
    } else {
      throw UsageError(path.string() + " holds neither aggregate.csv nor report.json");
    }
  }
  if (!fs::exists(path)) throw UsageError("no such report: " + path.string());
  if (path.extension() == ".csv") {
    print_csv_table(path);
    return 0;
  }
  const json j = read_json_file(path);
  if (j.contains("report"))
    print_cv_report(j.at("report"), j.value("config", json::object()));
  else if (j.contains("folds"))
    print_cv_report(j, json::object());
  else if (j.contains("events"))
    print_eval_report(j);
  else
    throw UsageError(path.string() + " is not a recognized report");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bundl-lab: noise-robust seizure-detector training laboratory"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI-style key=value file");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "generate a synthetic EEG corpus");
  sim->add_option("--out", sim_args.out, "corpus output directory")->required();
  sim->add_option("--subjects", sim_args.subjects, "number of subjects")->capture_default_str();
  sim->add_option("--seed", sim_args.seed, "master seed")->capture_default_str();
  sim->add_option("--snr", sim_args.snr, "SNR band: low, mid, high")->capture_default_str();
  sim->add_option("--duration", sim_args.duration, "recording length in seconds")
      ->capture_default_str();
  sim->add_option("--window", sim_args.window, "window length in seconds")->capture_default_str();
  sim->add_option("--rec-min", sim_args.rec_min, "minimum recordings per subject")
      ->capture_default_str();
  sim->add_option("--rec-max", sim_args.rec_max, "maximum recordings per subject")
      ->capture_default_str();
  sim->add_flag("--all-variants", sim_args.all_variants,
                "emit all three SNR corpora with the seven corruption variants each");
  sim->add_flag("--force", sim_args.force, "write into a non-empty directory");

  IngestArgs ing_args;
  auto* ing = app.add_subcommand("ingest", "convert external recordings into a corpus");
  ing->add_option("--spec", ing_args.spec, "ingest spec JSON file")->required();
  ing->add_option("--out", ing_args.out, "corpus output directory")->required();
  ing->add_flag("--force", ing_args.force, "write into a non-empty directory");

  CorruptArgs cor_args;
  auto* cor = app.add_subcommand("corrupt", "derive a corrupted label set");
  cor->add_option("--dataset", cor_args.dataset, "corpus directory")->required();
  cor->add_option("--kind", cor_args.kind, "clean, random, over, under")->required();
  cor->add_option("--severity", cor_args.severity, "corruption severity in (0, 1)");
  cor->add_option("--seed", cor_args.seed, "corruption seed")->capture_default_str();
  cor->add_option("--from", cor_args.from, "source label set tag")->capture_default_str();
  cor->add_option("--tag", cor_args.tag, "output tag (default <kind>_<severity>)");
  cor->add_flag("--force", cor_args.force, "overwrite an existing label set");

  TrainArgs tr_args;
  auto* tr = app.add_subcommand("train", "train one model on one label set");
  tr->add_option("--dataset", tr_args.dataset, "corpus directory")->required();
  tr->add_option("--labels", tr_args.labels, "training label set tag")->capture_default_str();
  tr->add_option("--out", tr_args.out, "model output file")->required();
  tr->add_option("--method", tr_args.method, "bundl, cel, selfadapt, nal")
      ->capture_default_str();
  tr->add_option("--z-prior", tr_args.z_prior, "auto, over, under, symmetric, none")
      ->capture_default_str();
  tr->add_option("--z-fixed", tr_args.z_fixed, "value of the fixed z side")
      ->capture_default_str();
  tr->add_option("--seed", tr_args.seed, "training seed")->capture_default_str();
  tr->add_option("--hidden", tr_args.hidden, "hidden layer widths")
      ->delimiter(',')
      ->capture_default_str();
  tr->add_option("--dropout", tr_args.dropout, "dropout rate")->capture_default_str();
  tr->add_option("--epochs", tr_args.epochs, "training epochs")->capture_default_str();
  tr->add_option("--pretrain-epochs", tr_args.pretrain_epochs, "warm-up epochs")
      ->capture_default_str();
  tr->add_option("--batch-size", tr_args.batch_size, "minibatch size")->capture_default_str();
  tr->add_option("--n-mc", tr_args.n_mc, "Monte Carlo dropout passes")->capture_default_str();
  tr->add_option("--lr", tr_args.lr, "Adam learning rate")->capture_default_str();
  tr->add_option("--label-clamp", tr_args.label_clamp, "label clamp epsilon")
      ->capture_default_str();
  tr->add_option("--pretrain-margin", tr_args.pretrain_margin,
                 "boundary exclusion for pretraining, seconds")
      ->capture_default_str();
  tr->add_option("--sa-warmup", tr_args.sa_warmup, "selfadapt warm-up epochs")
      ->capture_default_str();
  tr->add_option("--sa-alpha", tr_args.sa_alpha, "selfadapt label mix")->capture_default_str();
  tr->add_option("--sa-ema-decay", tr_args.sa_ema_decay, "selfadapt EMA decay")
      ->capture_default_str();
  tr->add_option("--nal-diag", tr_args.nal_diag, "NAL diagonal initial logit")
      ->capture_default_str();
  tr->add_option("--subjects", tr_args.subjects, "restrict to these subject ids")
      ->delimiter(',');

  EvaluateArgs ev_args;
  auto* ev = app.add_subcommand("evaluate", "evaluate a trained model");
  ev->add_option("--model", ev_args.model, "model file")->required();
  ev->add_option("--dataset", ev_args.dataset, "corpus directory")->required();
  ev->add_option("--labels", ev_args.labels, "evaluation label set tag")->capture_default_str();
  ev->add_option("--out", ev_args.out, "report output directory")->required();
  ev->add_option("--threshold", ev_args.threshold, "event detection threshold")
      ->capture_default_str();
  ev->add_option("--smooth-width", ev_args.smooth_width,
                 "odd moving-average width before eventing (0 = off)")
      ->capture_default_str();
  ev->add_option("--seed", ev_args.seed, "seed for the transition diagnostic")
      ->capture_default_str();
  ev->add_option("--subjects", ev_args.subjects, "restrict to these subject ids")
      ->delimiter(',');

  SweepArgs sw_args;
  auto* sw = app.add_subcommand("sweep", "cross-validate method x noise x SNR cells");
  sw->add_option("--dataset-root", sw_args.root,
                 "corpus directory, or parent of snr_<band> corpora")
      ->required();
  sw->add_option("--out", sw_args.out, "sweep output directory")->required();
  sw->add_option("--methods", sw_args.methods, "methods to run")
      ->delimiter(',')
      ->capture_default_str();
  sw->add_option("--noise", sw_args.noise, "label set tags (default: all non-clean)")
      ->delimiter(',');
  sw->add_option("--snr", sw_args.snr, "SNR bands to include")
      ->delimiter(',')
      ->capture_default_str();
  sw->add_option("--jobs", sw_args.jobs, "parallel cells")
      ->envname("BUNDL_LAB_JOBS")
      ->capture_default_str();
  sw->add_option("--seed", sw_args.seed, "base seed for every cell")->capture_default_str();
  sw->add_option("--folds", sw_args.folds, "outer folds")->capture_default_str();
  sw->add_option("--repeats", sw_args.repeats, "fold-shuffle repeats")->capture_default_str();
  sw->add_option("--inner-frac", sw_args.inner_frac, "tuning split fraction")
      ->capture_default_str();
  sw->add_option("--fpr-limit", sw_args.fpr_limit, "FPR cap for threshold selection, min/hr")
      ->capture_default_str();
  sw->add_option("--lr-grid", sw_args.lr_grid, "learning rates to tune over")
      ->delimiter(',')
      ->capture_default_str();
  sw->add_option("--z-prior", sw_args.z_prior, "auto, over, under, symmetric, none")
      ->capture_default_str();
  sw->add_option("--z-fixed", sw_args.z_fixed, "value of the fixed z side")
      ->capture_default_str();
  sw->add_option("--hidden", sw_args.hidden, "hidden layer widths")
      ->delimiter(',')
      ->capture_default_str();
  sw->add_option("--dropout", sw_args.dropout, "dropout rate")->capture_default_str();
  sw->add_option("--epochs", sw_args.epochs, "training epochs")->capture_default_str();
  sw->add_option("--pretrain-epochs", sw_args.pretrain_epochs, "warm-up epochs")
      ->capture_default_str();
  sw->add_option("--batch-size", sw_args.batch_size, "minibatch size")->capture_default_str();
  sw->add_option("--n-mc", sw_args.n_mc, "Monte Carlo dropout passes")->capture_default_str();

  std::string rep_in;
  auto* rep = app.add_subcommand("report", "print a report or sweep table");
  rep->add_option("--in", rep_in, "report.json, aggregate.csv, or a directory holding one")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (ing->parsed()) return cmd_ingest(ing_args);
    if (cor->parsed()) return cmd_corrupt(cor_args);
    if (tr->parsed()) return cmd_train(tr_args);
    if (ev->parsed()) return cmd_evaluate(ev_args);
    if (sw->parsed()) return cmd_sweep(sw_args);
    if (rep->parsed()) return cmd_report(rep_in);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
