#include "bundl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bundl {

namespace {

void fisher_yates(std::vector<int>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.bounded(i)]);
}

std::vector<int> int_labels(const WindowDataset& data) {
  std::vector<int> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = data.p_g[i] >= 0.5 ? 1 : 0;
  return out;
}

}  // namespace

Aggregate aggregate(std::span<const double> values) {
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    sq += v * v;
    ++n;
  }
  if (n == 0) return {std::numeric_limits<double>::quiet_NaN(),
                      std::numeric_limits<double>::quiet_NaN()};
  const double mean = sum / static_cast<double>(n);
  const double var = sq / static_cast<double>(n) - mean * mean;
  return {mean, std::sqrt(var > 0.0 ? var : 0.0)};
}

MetricsReport cross_validate(const CorpusView& corpus, const LabelSet& train_labels,
                             const LabelSet& eval_labels, const TrainConfig& base,
                             const CvConfig& cv, std::ostream* progress) {
  const auto subjects = corpus.subjects();
  if (cv.folds < 2) throw std::invalid_argument("cross_validate: need at least 2 folds");
  if (static_cast<std::size_t>(cv.folds) > subjects.size())
    throw std::invalid_argument("cross_validate: more folds than subjects");
  if (cv.lr_grid.empty()) throw std::invalid_argument("cross_validate: empty lr grid");

  MetricsReport report;
  for (int repeat = 0; repeat < cv.repeats; ++repeat) {
    auto order = subjects;
    Rng fold_rng(derive_seed(base.seed, Stream::fold, {static_cast<uint64_t>(repeat)}));
    fisher_yates(order, fold_rng);

    for (int fold = 0; fold < cv.folds; ++fold) {
      std::vector<int> test, rest;
      for (std::size_t i = 0; i < order.size(); ++i)
        (static_cast<int>(i) % cv.folds == fold ? test : rest).push_back(order[i]);
      const auto n_inner = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::lround(cv.inner_frac * static_cast<double>(rest.size()))));
      if (rest.size() <= n_inner)
        throw std::invalid_argument("cross_validate: fold leaves no training subjects");
      const std::vector<int> inner(rest.begin(), rest.begin() + static_cast<long>(n_inner));
      const std::vector<int> train(rest.begin() + static_cast<long>(n_inner), rest.end());

      const auto train_ds = make_dataset(corpus, train_labels, train);
      const auto inner_ds = make_dataset(corpus, train_labels, inner);

      // Learning-rate selection by window AUROC on the inner split, scored
      // against the (training-visible) noisy labels.
      double best_score = -1.0, best_lr = cv.lr_grid.front();
      TrainResult best;
      std::vector<double> best_inner_probs;
      for (std::size_t li = 0; li < cv.lr_grid.size(); ++li) {
        TrainConfig cfg = base;
        cfg.lr = cv.lr_grid[li];
        cfg.seed = derive_seed(base.seed, Stream::fold,
                               {static_cast<uint64_t>(repeat), static_cast<uint64_t>(fold),
                                static_cast<uint64_t>(li) + 1});
        TrainResult result = train_method(train_ds.windows, cfg);
        const auto probs = predict_all(result.params, inner_ds.windows);
        const auto score = auroc(probs, int_labels(inner_ds.windows));
        if (score > best_score) {
          best_score = score;
          best_lr = cfg.lr;
          best = std::move(result);
          best_inner_probs = probs;
        }
      }

      // Operating point from the inner split's noisy intervals.
      std::vector<std::vector<Interval>> inner_truth;
      for (const auto cr : inner_ds.corpus_rec)
        inner_truth.push_back(train_labels.tracks[cr].intervals);
      const auto choice =
          select_threshold(inner_ds.per_recording(best_inner_probs), inner_truth,
                           corpus.window_len_s, cv.fpr_limit);

      // Held-out scoring against the evaluation labels.
      const auto test_ds = make_dataset(corpus, eval_labels, test);
      const auto probs = predict_all(best.params, test_ds.windows);
      std::vector<std::vector<Interval>> test_truth;
      for (const auto cr : test_ds.corpus_rec)
        test_truth.push_back(eval_labels.tracks[cr].intervals);
      std::vector<std::vector<Interval>> events;
      for (const auto& rec_probs : test_ds.per_recording(probs))
        events.push_back(events_from_probs(rec_probs, choice.threshold, corpus.window_len_s));
      const auto em =
          seizure_metrics(events, test_truth, test_ds.windows.rec_len_s);

      FoldResult row;
      row.repeat = repeat;
      row.fold = fold;
      row.test_subjects = test;
      std::sort(row.test_subjects.begin(), row.test_subjects.end());
      row.lr = best_lr;
      row.threshold = choice.threshold;
      row.auroc = auroc(probs, int_labels(test_ds.windows));
      row.auprc = auprc(probs, int_labels(test_ds.windows));
      row.sensitivity = em.sensitivity;
      row.fpr_min_per_hour = em.fpr_min_per_hour;
      row.mean_latency_s = em.mean_latency_s;
      if (progress)
        *progress << "repeat " << repeat << " fold " << fold << "  lr " << row.lr
                  << "  threshold " << row.threshold << "  auroc " << row.auroc
                  << "  sensitivity " << row.sensitivity << "  fpr " << row.fpr_min_per_hour
                  << "\n";
      report.folds.push_back(std::move(row));
    }
  }

  auto collect = [&](auto getter) {
    std::vector<double> v;
    for (const auto& f : report.folds) v.push_back(getter(f));
    return aggregate(v);
  };
  report.summary["auroc"] = collect([](const FoldResult& f) { return f.auroc; });
  report.summary["auprc"] = collect([](const FoldResult& f) { return f.auprc; });
  report.summary["sensitivity"] = collect([](const FoldResult& f) { return f.sensitivity; });
  report.summary["fpr_min_per_hour"] =
      collect([](const FoldResult& f) { return f.fpr_min_per_hour; });
  report.summary["mean_latency_s"] =
      collect([](const FoldResult& f) { return f.mean_latency_s; });
  report.summary["threshold"] = collect([](const FoldResult& f) { return f.threshold; });
  return report;
}

}  // namespace bundl
