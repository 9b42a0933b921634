// Acceptance gate: ten go/no-go checks covering posterior algebra,
// uncertainty scoring, gradient fidelity, the plain-cross-entropy reduction,
// metric oracles, corruption geometry, the two directional detection
// reproductions, the transition-matrix trend, and end-to-end report
// determinism. Each criterion prints exactly one [PASS]/[FAIL] line on
// standard output; diagnostic detail goes to standard error.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#ifdef __unix__
#include <sys/wait.h>
#endif

#include "bundl/bundl.hpp"
#include "bundl/container.hpp"
#include "bundl/eegsim.hpp"
#include "bundl/eval.hpp"
#include "bundl/experiment.hpp"
#include "bundl/labelnoise.hpp"
#include "bundl/mlp.hpp"
#include "bundl/montage.hpp"
#include "bundl/rng.hpp"
#include "bundl/train.hpp"

namespace fs = std::filesystem;
using namespace bundl;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool verdict(int n, bool ok, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", n, what.c_str());
  std::fflush(stdout);
  return ok;
}

// ---- shared 12-subject corpus for the directional reproductions ----

struct AccCorpus {
  CorpusView corpus;
  LabelSet clean;
  std::vector<double> rec_len_s;
};

AccCorpus build_acc_corpus() {
  const auto t0 = Clock::now();
  SimConfig cfg;
  cfg.seed = 424242;
  cfg.n_subjects = 12;
  cfg.rec_min = 2;
  cfg.rec_max = 2;
  cfg.snr = SnrBand::mid;
  const Montage m = standard_1020();
  CorpusBuilder builder(1.0);
  AccCorpus out;
  out.clean.tag = "clean";
  out.clean.window_len_s = 1.0;
  generate_corpus(cfg, m, [&](Recording&& rec) {
    builder.add(rec);
    out.clean.tracks.push_back(window_labels(rec.clean_intervals, cfg.recording_len_s, 1.0));
    out.rec_len_s.push_back(cfg.recording_len_s);
  });
  out.corpus = builder.finish();
  std::fprintf(stderr, "acceptance corpus: %zu recordings, dim %zu, built in %.1f s\n",
               out.corpus.n_recordings(), out.corpus.dim, seconds_since(t0));
  return out;
}

const AccCorpus& acc_corpus() {
  static const AccCorpus corpus = build_acc_corpus();
  return corpus;
}

LabelSet corrupt_labels(const AccCorpus& acc, NoiseKind kind, double severity) {
  LabelSet noisy;
  noisy.tag = noise_tag(kind, severity);
  noisy.window_len_s = 1.0;
  for (std::size_t r = 0; r < acc.clean.tracks.size(); ++r)
    noisy.tracks.push_back(corrupt(acc.clean.tracks[r], kind, severity,
                                   derive_seed(777, Stream::corrupt, {r}), acc.rec_len_s[r]));
  return noisy;
}

TrainConfig desk_config(Method method, ZPrior prior, uint64_t seed) {
  TrainConfig cfg;
  cfg.method = method;
  cfg.seed = seed;
  cfg.hidden = {32};
  cfg.dropout_rate = 0.2;
  cfg.epochs = 12;
  cfg.pretrain_epochs = 3;
  cfg.batch_size = 256;
  cfg.lr = 1e-3;
  cfg.n_mc = 10;
  cfg.pretrain_margin_s = 30.0;
  cfg.z_policy = ZPolicy::from_prior(prior, 0.001);
  return cfg;
}

struct TrialResult {
  double median_fpr = 0.0;  // median per-recording FPR over the test recordings
  double sensitivity = 0.0; // pooled over the test recordings
};

// 8/2/2 subject split per seed: train on noisy labels, pick the threshold on
// the validation subjects' noisy intervals, score events on the held-out
// subjects against the clean labels.
TrialResult run_trial(const AccCorpus& acc, const LabelSet& noisy, Method method, ZPrior prior,
                      uint64_t seed) {
  std::vector<int> order = acc.corpus.subjects();
  Rng shuffle_rng(derive_seed(seed, Stream::fold));
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[shuffle_rng.bounded(i)]);
  const std::vector<int> train_subj(order.begin(), order.begin() + 8);
  const std::vector<int> val_subj(order.begin() + 8, order.begin() + 10);
  const std::vector<int> test_subj(order.begin() + 10, order.end());

  const DatasetBundle train_ds = make_dataset(acc.corpus, noisy, train_subj);
  const DatasetBundle val_ds = make_dataset(acc.corpus, noisy, val_subj);
  const DatasetBundle test_ds = make_dataset(acc.corpus, acc.clean, test_subj);

  const TrainResult result = train_method(train_ds.windows, desk_config(method, prior, seed));

  const std::vector<double> val_probs = predict_all(result.params, val_ds.windows);
  std::vector<std::vector<Interval>> val_truth;
  for (const std::size_t cr : val_ds.corpus_rec) val_truth.push_back(noisy.tracks[cr].intervals);
  const ThresholdChoice choice = select_threshold(val_ds.per_recording(val_probs), val_truth,
                                                  acc.corpus.window_len_s);

  const std::vector<double> test_probs = predict_all(result.params, test_ds.windows);
  const auto per_rec = test_ds.per_recording(test_probs);
  std::vector<std::vector<Interval>> events, truth;
  std::vector<double> fprs;
  for (std::size_t r = 0; r < per_rec.size(); ++r) {
    events.push_back(events_from_probs(per_rec[r], choice.threshold, acc.corpus.window_len_s));
    truth.push_back(acc.clean.tracks[test_ds.corpus_rec[r]].intervals);
    const double len = acc.rec_len_s[test_ds.corpus_rec[r]];
    const EventMetrics one = seizure_metrics({events.back()}, {truth.back()}, {{len}});
    fprs.push_back(one.fpr_min_per_hour);
  }
  std::vector<double> lens;
  for (const std::size_t cr : test_ds.corpus_rec) lens.push_back(acc.rec_len_s[cr]);
  const EventMetrics pooled = seizure_metrics(events, truth, lens);

  std::sort(fprs.begin(), fprs.end());
  TrialResult out;
  const std::size_t n = fprs.size();
  out.median_fpr = n % 2 ? fprs[n / 2] : 0.5 * (fprs[n / 2 - 1] + fprs[n / 2]);
  out.sensitivity = pooled.sensitivity;
  std::fprintf(stderr,
               "  seed %llu %s: threshold %.2f  median fpr %.3f  sensitivity %.3f\n",
               static_cast<unsigned long long>(seed), to_string(method), choice.threshold,
               out.median_fpr, out.sensitivity);
  return out;
}

// ---- independent metric oracles (criterion 5) ----

double auroc_by_pairs(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  std::size_t n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    ++n_pos;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  for (const int l : labels) n_neg += static_cast<std::size_t>(!l);
  return wins / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double ap_by_threshold_enumeration(const std::vector<double>& scores,
                                   const std::vector<int>& labels) {
  // counts per distinct score, walked from the highest threshold down
  std::map<double, std::pair<std::size_t, std::size_t>, std::greater<double>> groups;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    auto& g = groups[scores[i]];
    g.first += static_cast<std::size_t>(labels[i]);
    g.second += 1;
    n_pos += static_cast<std::size_t>(labels[i]);
  }
  double ap = 0.0, recall_prev = 0.0;
  std::size_t tp = 0, seen = 0;
  for (const auto& [score, g] : groups) {
    tp += g.first;
    seen += g.second;
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    ap += (recall - recall_prev) * precision;
    recall_prev = recall;
  }
  return ap;
}

// ---- toy dataset for the reduction check (criterion 4) ----

WindowDataset toy_dataset() {
  WindowDataset data;
  data.dim = 4;
  Rng rng(derive_seed(41, Stream::corrupt, {4242}));
  for (std::size_t r = 0; r < 2; ++r) {
    data.rec_intervals.push_back({{12.0, 26.0}});
    data.rec_len_s.push_back(40.0);
    for (std::size_t w = 0; w < 40; ++w) {
      const double center = static_cast<double>(w) + 0.5;
      const int label = center >= 12.0 && center < 26.0 ? 1 : 0;
      std::vector<double> feat(4);
      for (auto& v : feat) v = rng.normal() + 1.5 * label;
      data.push(feat, label, r, center);
    }
  }
  return data;
}

// ---- CLI plumbing for criterion 10 ----

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BUNDL_LAB_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
#ifdef __unix__
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
#else
  return status;
#endif
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("criterion 1: posterior identities") {
  const auto t0 = Clock::now();
  Rng rng(20260818);
  double worst0 = 0.0, worst1 = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double p_g = rng.uniform();
    const double f_bar = rng.uniform();
    worst0 = std::max(worst0, std::abs(clean_param(p_g, f_bar, 0.0, 0.0) - p_g));
    worst1 = std::max(worst1, std::abs(clean_param(p_g, f_bar, 1.0, 1.0) - f_bar));
  }
  const double elapsed = seconds_since(t0);
  std::fprintf(stderr, "criterion 1: worst |p_yc - p_g| %.3g, worst |p_yc - f_bar| %.3g, %.3f s\n",
               worst0, worst1, elapsed);
  const bool ok = worst0 <= 1e-12 && worst1 <= 1e-12 && elapsed < 1.0;
  REQUIRE(verdict(1, ok, "clean_param reduces to p_g at z=0 and f_bar at z=1 (<=1e-12, 1e4 grid)"));
}

TEST_CASE("criterion 2: uncertainty correctness") {
  bool ok = true;

  // fixed sample vectors against the hand-evaluated entropy formula
  const std::vector<double> v09(20, 0.9);
  ok &= std::abs(mean_and_entropy(v09).z - 0.46899559358928117) <= 1e-4;
  const std::vector<double> mixed{0.2, 0.5, 0.9};
  ok &= std::abs(mean_and_entropy(mixed).z - 0.7303078961588811) <= 1e-4;
  ok &= std::abs(mean_and_entropy(mixed).mean - 0.5333333333333333) <= 1e-12;

  // z stays inside [0, 1] for arbitrary sample vectors and real MC passes
  Rng rng(91);
  for (int t = 0; t < 2000 && ok; ++t) {
    std::vector<double> s(1 + rng.bounded(40));
    for (auto& v : s) v = rng.uniform(1e-6, 1.0 - 1e-6);
    const double z = mean_and_entropy(s).z;
    ok &= z >= 0.0 && z <= 1.0;
  }
  for (int t = 0; t < 200 && ok; ++t) {
    const MlpParams params = init_params({6, 8, 1}, 0.3, derive_seed(92, Stream::param_init, {static_cast<uint64_t>(t)}));
    std::vector<double> x(6);
    for (auto& v : x) v = rng.normal();
    const auto u = mc_uncertainty(params, x, 15, derive_seed(93, Stream::mc, {static_cast<uint64_t>(t)}));
    ok &= u.z >= 0.0 && u.z <= 1.0 && u.mean > 0.0 && u.mean < 1.0;
  }

  // all-0.5 samples: exactly 1, both directly and through MC dropout on a
  // zero-weight network (every pass emits exactly 0.5)
  ok &= mean_and_entropy(std::vector<double>(9, 0.5)).z == 1.0;
  MlpParams zero = init_params({4, 8, 1}, 0.4, 1);
  std::fill(zero.flat.begin(), zero.flat.end(), 0.0);
  const auto uz = mc_uncertainty(zero, std::vector<double>{0.3, -0.2, 0.9, 0.0}, 25, 5);
  ok &= uz.z == 1.0 && uz.mean == 0.5;

  REQUIRE(verdict(2, ok, "z matches the entropy oracle (+-1e-4), stays in [0,1], z(all 0.5)=1 exactly"));
}

TEST_CASE("criterion 3: gradient fidelity") {
  const auto t0 = Clock::now();
  Rng rng(300);
  const std::vector<std::size_t> dims{5, 8, 1};
  int instances = 0;
  std::size_t coords_checked = 0;
  double max_rel = 0.0;
  int guard = 0;
  while (instances < 100 && guard < 1000) {
    ++guard;
    MlpParams params = init_params(dims, 0.0, derive_seed(301, Stream::param_init,
                                                          {static_cast<uint64_t>(guard)}));
    std::vector<double> x(dims.front());
    for (auto& v : x) v = rng.normal();

    // keep away from ReLU kinks and the output clamp, where the loss is not
    // differentiable and finite differences are meaningless
    ForwardTrace trace;
    const double prob = forward(params, x, nullptr, &trace);
    bool near_kink = prob < 1e-4 || prob > 1.0 - 1e-4;
    for (const auto& layer_pre : trace.pre)
      for (const double v : layer_pre) near_kink |= std::abs(v) < 1e-4;
    if (near_kink) continue;

    const double p_g = clamp_label(rng.bernoulli(0.5) ? 1.0 : 0.0);
    const double f_bar = rng.uniform(0.05, 0.95);
    const double target = clean_param(p_g, f_bar, rng.uniform(), rng.uniform());

    std::vector<double> grad(params.count(), 0.0);
    backward(params, nullptr, trace, cross_entropy_dprob(target, prob), grad);

    const double h = 1e-5;
    for (std::size_t k = 0; k < params.count(); ++k) {
      const double saved = params.flat[k];
      params.flat[k] = saved + h;
      const double lp = cross_entropy(target, forward(params, x, nullptr));
      params.flat[k] = saved - h;
      const double lm = cross_entropy(target, forward(params, x, nullptr));
      params.flat[k] = saved;
      const double fd = (lp - lm) / (2.0 * h);
      const double denom = std::max(std::abs(grad[k]), std::abs(fd));
      if (denom < 1e-6) continue;  // both zero at finite-difference noise level
      max_rel = std::max(max_rel, std::abs(grad[k] - fd) / denom);
      ++coords_checked;
    }
    ++instances;
  }
  const double elapsed = seconds_since(t0);
  std::fprintf(stderr, "criterion 3: %d instances, %zu coordinates, max rel err %.3g, %.3f s\n",
               instances, coords_checked, max_rel, elapsed);
  const bool ok = instances == 100 && coords_checked > 1000 && max_rel < 1e-4 && elapsed < 10.0;
  REQUIRE(verdict(3, ok, "loss-through-model gradient matches central differences (<1e-4 rel)"));
}

TEST_CASE("criterion 4: reduction to plain cross-entropy") {
  const auto t0 = Clock::now();
  const WindowDataset data = toy_dataset();

  TrainConfig cel_cfg;
  cel_cfg.method = Method::cel;
  cel_cfg.seed = 7;
  cel_cfg.hidden = {8};
  cel_cfg.dropout_rate = 0.2;
  cel_cfg.epochs = 10;
  cel_cfg.pretrain_epochs = 2;
  cel_cfg.batch_size = 16;
  cel_cfg.n_mc = 5;
  cel_cfg.pretrain_margin_s = 3.0;

  TrainConfig bundl_cfg = cel_cfg;
  bundl_cfg.method = Method::bundl;
  bundl_cfg.z_policy = ZPolicy::from_prior(ZPrior::none, 0.0);

  const TrainResult cel = train_method(data, cel_cfg);
  const TrainResult bun = train_method(data, bundl_cfg);

  bool ok = cel.params.flat == bun.params.flat && cel.params.dims == bun.params.dims;
  ok &= cel.train_log.size() == bun.train_log.size();
  for (std::size_t e = 0; ok && e < cel.train_log.size(); ++e)
    ok &= cel.train_log[e].mean_loss == bun.train_log[e].mean_loss;
  const double elapsed = seconds_since(t0);
  std::fprintf(stderr, "criterion 4: %zu params compared, %.3f s\n", cel.params.flat.size(),
               elapsed);
  ok &= elapsed < 60.0;
  REQUIRE(verdict(4, ok, "fixed z0=z1=0 training is bitwise identical to plain cross-entropy"));
}

TEST_CASE("criterion 5: metric oracles") {
  const auto t0 = Clock::now();
  Rng rng(500);
  bool ok = true;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const std::size_t n = 2 + rng.bounded(99);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    const bool coarse = rng.bernoulli(0.5);  // coarse grids force ties
    const double pi = rng.uniform(0.1, 0.9);
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = coarse ? static_cast<double>(rng.bounded(8)) / 8.0
                         : static_cast<double>(rng.bounded(1000)) / 1000.0;
      labels[i] = rng.bernoulli(pi) ? 1 : 0;
      (labels[i] ? pos : neg) = true;
    }
    if (!pos || !neg) {
      labels[0] = 1;
      labels[1] = 0;
    }
    ok &= auroc(scores, labels) == auroc_by_pairs(scores, labels);
    ok &= auprc(scores, labels) == ap_by_threshold_enumeration(scores, labels);
  }
  const double elapsed = seconds_since(t0);
  std::fprintf(stderr, "criterion 5: 1000 randomized trials, %.3f s\n", elapsed);
  ok &= elapsed < 10.0;
  REQUIRE(verdict(5, ok, "auroc equals pair counting and auprc equals threshold enumeration exactly"));
}

TEST_CASE("criterion 6: label-noise geometry") {
  Rng rng(600);
  bool ok = true;
  int flip_trials = 0, flip_violations = 0;
  for (int trial = 0; trial < 10000 && ok; ++trial) {
    const double len = static_cast<double>(120 + rng.bounded(781));  // 120..900 s, whole windows
    const double dur = rng.uniform(30.0, std::min(500.0, len - 10.0));
    const double onset = rng.uniform(0.0, len - dur);
    const Interval iv{onset, onset + dur};
    const LabelTrack clean = window_labels({iv}, len, 1.0);
    const double severity = rng.uniform(0.05, 0.95);
    const uint64_t seed = derive_seed(601, Stream::corrupt, {static_cast<uint64_t>(trial)});

    const LabelTrack over = corrupt(clean, NoiseKind::over, severity, seed, len);
    ok &= over.intervals.size() == 1;
    const Interval& ov = over.intervals[0];
    ok &= ov.onset_s <= iv.onset_s + 1e-9 && ov.offset_s >= iv.offset_s - 1e-9;  // superset
    // boundaries live on the 5 ms label grid, so the 60 s side cap is
    // enforced up to grid resolution
    ok &= iv.onset_s - ov.onset_s <= 60.0 + 0.005 + 1e-9;
    ok &= ov.offset_s - iv.offset_s <= 60.0 + 0.005 + 1e-9;

    const LabelTrack under = corrupt(clean, NoiseKind::under, severity, seed, len);
    ok &= under.intervals.size() == 1;
    const Interval& un = under.intervals[0];
    ok &= un.onset_s >= iv.onset_s - 1e-9 && un.offset_s <= iv.offset_s + 1e-9;  // subset
    ok &= un.offset_s - un.onset_s >= 29.0 - 0.005 - 1e-9;                       // duration floor

    const LabelTrack flipped = corrupt(clean, NoiseKind::random, severity, seed, len);
    std::size_t flips = 0;
    for (std::size_t w = 0; w < clean.labels.size(); ++w)
      flips += static_cast<std::size_t>(flipped.labels[w] != clean.labels[w]);
    const double n = static_cast<double>(clean.labels.size());
    const double sigma = std::sqrt(n * severity * (1.0 - severity));
    ++flip_trials;
    if (std::abs(static_cast<double>(flips) - n * severity) > 3.0 * sigma) ++flip_violations;
  }
  // per-trial 3-sigma misses occur at the binomial rate (~0.27%); a correct
  // implementation stays well under 1%
  const double viol_rate = static_cast<double>(flip_violations) / std::max(1, flip_trials);
  std::fprintf(stderr, "criterion 6: flip-rate 3-sigma violations %d / %d (%.4f)\n",
               flip_violations, flip_trials, viol_rate);
  ok &= viol_rate <= 0.01;
  REQUIRE(verdict(6, ok, "over superset w/ 60 s side cap, under subset w/ 29 s floor, flips binomial"));
}

TEST_CASE("criterion 7: over-segmentation reproduction") {
  const auto t0 = Clock::now();
  const AccCorpus& acc = acc_corpus();
  const LabelSet noisy = corrupt_labels(acc, NoiseKind::over, 0.3);
  int passes = 0;
  for (uint64_t seed = 101; seed <= 105; ++seed) {
    const TrialResult bun = run_trial(acc, noisy, Method::bundl, ZPrior::over, seed);
    const TrialResult cel = run_trial(acc, noisy, Method::cel, ZPrior::none, seed);
    const bool seed_pass =
        bun.median_fpr < cel.median_fpr && bun.sensitivity >= cel.sensitivity - 0.05;
    std::fprintf(stderr, "criterion 7 seed %llu: %s\n", static_cast<unsigned long long>(seed),
                 seed_pass ? "pass" : "fail");
    passes += seed_pass;
  }
  const double elapsed = seconds_since(t0);
  std::fprintf(stderr, "criterion 7: %d/5 seeds, %.1f s\n", passes, elapsed);
  const bool ok = passes >= 4 && elapsed < 900.0;
  REQUIRE(verdict(7, ok, "over-0.3: lower median FPR than CEL at comparable sensitivity, >=4/5 seeds"));
}

TEST_CASE("criterion 8: under-segmentation reproduction") {
  const auto t0 = Clock::now();
  const AccCorpus& acc = acc_corpus();
  const LabelSet noisy = corrupt_labels(acc, NoiseKind::under, 0.3);
  int passes = 0;
  for (uint64_t seed = 101; seed <= 105; ++seed) {
    const TrialResult bun = run_trial(acc, noisy, Method::bundl, ZPrior::under, seed);
    const TrialResult cel = run_trial(acc, noisy, Method::cel, ZPrior::none, seed);
    const bool seed_pass = bun.sensitivity >= cel.sensitivity;
    std::fprintf(stderr, "criterion 8 seed %llu: %s\n", static_cast<unsigned long long>(seed),
                 seed_pass ? "pass" : "fail");
    passes += seed_pass;
  }
  const double elapsed = seconds_since(t0);
  std::fprintf(stderr, "criterion 8: %d/5 seeds, %.1f s\n", passes, elapsed);
  const bool ok = passes >= 4;
  REQUIRE(verdict(8, ok, "under-0.3: sensitivity at least CEL's in >=4/5 seeds"));
}

TEST_CASE("criterion 9: transition-matrix trend") {
  const auto t0 = Clock::now();
  const AccCorpus& acc = acc_corpus();
  const std::vector<int> all_subjects = acc.corpus.subjects();
  std::vector<double> r01;
  for (const double severity : {0.1, 0.3, 0.5}) {
    const LabelSet noisy = corrupt_labels(acc, NoiseKind::under, severity);
    const DatasetBundle ds = make_dataset(acc.corpus, noisy, all_subjects);
    const TrainResult result =
        train_method(ds.windows, desk_config(Method::bundl, ZPrior::under, 101));
    const TransitionMatrix tm = transition_matrix(result.params, ds.windows,
                                                  ZPolicy::from_prior(ZPrior::under, 0.001),
                                                  10, 7);
    r01.push_back(tm.rows[0][1]);
    std::fprintf(stderr, "criterion 9: under-%.1f -> p(y=1|yhat=0) = %.4f (n0 %zu, n1 %zu)\n",
                 severity, tm.rows[0][1], tm.n0, tm.n1);
  }
  const bool ok = r01[0] < r01[1] && r01[1] < r01[2];
  std::fprintf(stderr, "criterion 9: %.1f s\n", seconds_since(t0));
  REQUIRE(verdict(9, ok, "p(y=1|yhat=0) strictly increases across under-0.1/0.3/0.5"));
}

TEST_CASE("criterion 10: report determinism") {
  const fs::path root = fs::temp_directory_path() / "bundl_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string corpus = (root / "corpus").string();
  const std::string model = (root / "model.bin").string();
  const std::string out1 = (root / "eval1").string();
  const std::string out2 = (root / "eval2").string();

  bool ok = true;
  ok &= run_cli("simulate --out " + corpus +
                " --subjects 2 --rec-min 1 --rec-max 1 --seed 17 --snr mid") == 0;
  ok &= run_cli("corrupt --dataset " + corpus + " --kind over --severity 0.3 --seed 3") == 0;
  ok &= run_cli("train --dataset " + corpus + " --labels over_0.30 --out " + model +
                " --method bundl --epochs 2 --pretrain-epochs 1 --n-mc 5 --seed 11") == 0;
  ok &= run_cli("evaluate --model " + model + " --dataset " + corpus + " --labels clean --out " +
                out1) == 0;
  ok &= run_cli("evaluate --model " + model + " --dataset " + corpus + " --labels clean --out " +
                out2) == 0;

  const std::string rep1 = slurp(fs::path(out1) / "report.json");
  const std::string rep2 = slurp(fs::path(out2) / "report.json");
  ok &= !rep1.empty() && rep1 == rep2;
  ok &= slurp(fs::path(out1) / "transition.csv") == slurp(fs::path(out2) / "transition.csv");
  fs::remove_all(root);
  REQUIRE(verdict(10, ok, "regenerated evaluation reports are byte-identical"));
}
