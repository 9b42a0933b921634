// Window-level ranking metrics, event-level seizure detection metrics,
// operating-point selection, the label-transition diagnostic, and
// subject-disjoint cross-validation.

#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bundl/train.hpp"
#include "bundl/types.hpp"

#include <json.hpp>

namespace bundl {

// Area under the ROC curve by the Mann-Whitney statistic; tied scores count
// one half. Throws std::invalid_argument on single-class input.
double auroc(std::span<const double> scores, std::span<const int> labels);

// Average precision (step-interpolated area under the PR curve), with tied
// scores grouped at one threshold.
double auprc(std::span<const double> scores, std::span<const int> labels);

// Maximal runs of windows with prob >= threshold, as time intervals.
// threshold must lie strictly in (0, 1).
std::vector<Interval> events_from_probs(std::span<const double> probs, double threshold,
                                        double window_len_s);

// Centered moving average with an odd window width (edges use the windows
// that exist). width <= 1 returns the input unchanged. Off by default in
// every pipeline; exposed for optional pre-eventing smoothing.
std::vector<double> smooth_probs(std::span<const double> probs, int width = 5);

struct EventMetrics {
  std::size_t n_intervals = 0;
  std::size_t n_detected = 0;  // true intervals overlapped by >= 1 event
  double sensitivity = 0.0;    // n_detected / n_intervals (0 when no intervals)
  double fp_seconds = 0.0;     // event time outside every true interval
  double total_seconds = 0.0;
  double fpr_min_per_hour = 0.0;  // 60 * fp_seconds / total_seconds
  double mean_latency_s = std::numeric_limits<double>::quiet_NaN();  // over detected
};

// Event-level detection metrics over a set of recordings (index-aligned
// vectors of predicted events, true intervals, and recording lengths).
EventMetrics seizure_metrics(const std::vector<std::vector<Interval>>& events_per_rec,
                             const std::vector<std::vector<Interval>>& truth_per_rec,
                             std::span<const double> rec_len_s);

struct ThresholdChoice {
  double threshold = 0.5;
  double sensitivity = 0.0;
  double fpr_min_per_hour = 0.0;
  bool met_fpr_limit = false;
};

// Scans thresholds 0.10, 0.15, ..., 0.80 and picks the one maximizing
// sensitivity subject to FPR < fpr_limit (ties -> lower threshold). If no
// threshold meets the limit, falls back to the minimum-FPR threshold.
ThresholdChoice select_threshold(const std::vector<std::vector<double>>& probs_per_rec,
                                 const std::vector<std::vector<Interval>>& truth_per_rec,
                                 double window_len_s, double fpr_limit = 3.0);

// 2x2 matrix rows[y_hat][y]: the mean posterior over windows near noisy
// onsets, grouped by their noisy label.
struct TransitionMatrix {
  double rows[2][2]{};
  std::size_t n0 = 0, n1 = 0;  // windows per noisy class
};

struct TransitionSample {
  int y_hat = 0;   // noisy window label
  double p1 = 0.0;  // posterior probability that the clean label is 1
};

// Averages posterior rows per noisy class; throws std::invalid_argument
// when either class has no samples.
TransitionMatrix transition_from_samples(std::span<const TransitionSample> samples);

// Model-level transition diagnostic: for every window whose center lies
// within band_s of a noisy interval onset, p(y=1 | y_hat, x) =
// p_g (1 - z) + f_bar z with (z0, z1) resolved per the policy, where p_g is
// the clamped noisy label.
TransitionMatrix transition_matrix(const MlpParams& params, const WindowDataset& data,
                                   const ZPolicy& policy, int n_mc, uint64_t seed,
                                   double band_s = 60.0, double label_clamp = 0.001);

// ---- Cross-validation ----

struct CvConfig {
  int folds = 5;
  int repeats = 1;
  double inner_frac = 0.2;  // fraction of non-test subjects held for tuning
  std::vector<double> lr_grid = {1e-3};
  double fpr_limit = 3.0;
};

struct FoldResult {
  int repeat = 0;
  int fold = 0;
  std::vector<int> test_subjects;
  double lr = 0.0;
  double threshold = 0.0;
  double auroc = 0.0;
  double auprc = 0.0;
  double sensitivity = 0.0;
  double fpr_min_per_hour = 0.0;
  double mean_latency_s = std::numeric_limits<double>::quiet_NaN();
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
};

struct MetricsReport {
  std::vector<FoldResult> folds;
  std::map<std::string, Aggregate> summary;
};

nlohmann::json to_json(const EventMetrics& m);
nlohmann::json to_json(const TransitionMatrix& t);
nlohmann::json to_json(const MetricsReport& r);

// One line per fold, stable column order, for spreadsheets.
std::string fold_csv(const MetricsReport& r);

}  // namespace bundl
