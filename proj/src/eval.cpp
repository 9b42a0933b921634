#include "bundl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bundl {

namespace {

void check_binary(std::span<const int> labels) {
  bool pos = false, neg = false;
  for (const int l : labels) {
    if (l != 0 && l != 1) throw std::invalid_argument("labels must be 0/1");
    (l ? pos : neg) = true;
  }
  if (!pos || !neg) throw std::invalid_argument("metric undefined on single-class labels");
}

std::vector<std::size_t> order_by_score(std::span<const double> scores, bool descending) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return descending ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  return idx;
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw std::invalid_argument("auroc: size mismatch or empty input");
  check_binary(labels);
  const auto idx = order_by_score(scores, /*descending=*/false);
  double u = 0.0, neg_seen = 0.0;
  std::size_t n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < idx.size();) {
    // Group of tied scores: each positive in the group counts every
    // earlier negative fully and each tied negative one half.
    std::size_t j = i;
    std::size_t g_pos = 0, g_neg = 0;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      (labels[idx[j]] ? g_pos : g_neg) += 1;
      ++j;
    }
    u += static_cast<double>(g_pos) * (neg_seen + 0.5 * static_cast<double>(g_neg));
    neg_seen += static_cast<double>(g_neg);
    n_pos += g_pos;
    n_neg += g_neg;
    i = j;
  }
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double auprc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw std::invalid_argument("auprc: size mismatch or empty input");
  check_binary(labels);
  const auto idx = order_by_score(scores, /*descending=*/true);
  std::size_t n_pos = 0;
  for (const int l : labels) n_pos += static_cast<std::size_t>(l);
  double ap = 0.0, recall_prev = 0.0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      tp += static_cast<std::size_t>(labels[idx[j]]);
      ++seen;
      ++j;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    ap += (recall - recall_prev) * precision;
    recall_prev = recall;
    i = j;
  }
  return ap;
}

std::vector<Interval> events_from_probs(std::span<const double> probs, double threshold,
                                        double window_len_s) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("events_from_probs: threshold must lie in (0, 1)");
  std::vector<Interval> events;
  for (std::size_t i = 0; i < probs.size();) {
    if (probs[i] < threshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < probs.size() && probs[j] >= threshold) ++j;
    events.push_back({static_cast<double>(i) * window_len_s,
                      static_cast<double>(j) * window_len_s});
    i = j;
  }
  return events;
}

std::vector<double> smooth_probs(std::span<const double> probs, int width) {
  if (width <= 1) return {probs.begin(), probs.end()};
  if (width % 2 == 0) throw std::invalid_argument("smooth_probs: width must be odd");
  const long long half = width / 2;
  const long long n = static_cast<long long>(probs.size());
  std::vector<double> out(probs.size());
  for (long long i = 0; i < n; ++i) {
    const long long lo = std::max(0LL, i - half);
    const long long hi = std::min(n, i + half + 1);
    double sum = 0.0;
    for (long long j = lo; j < hi; ++j) sum += probs[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = sum / static_cast<double>(hi - lo);
  }
  return out;
}

EventMetrics seizure_metrics(const std::vector<std::vector<Interval>>& events_per_rec,
                             const std::vector<std::vector<Interval>>& truth_per_rec,
                             std::span<const double> rec_len_s) {
  if (events_per_rec.size() != truth_per_rec.size() ||
      events_per_rec.size() != rec_len_s.size())
    throw std::invalid_argument("seizure_metrics: per-recording vectors misaligned");
  EventMetrics m;
  double latency_sum = 0.0;
  for (std::size_t r = 0; r < events_per_rec.size(); ++r) {
    const auto& events = events_per_rec[r];
    const auto& truth = truth_per_rec[r];
    m.total_seconds += rec_len_s[r];
    for (const auto& iv : truth) {
      ++m.n_intervals;
      // First overlapping event (by start time) decides detection latency.
      const Interval* first = nullptr;
      for (const auto& ev : events)
        if (overlap_s(ev, iv) > 0.0 && (!first || ev.onset_s < first->onset_s)) first = &ev;
      if (first) {
        ++m.n_detected;
        latency_sum += std::max(0.0, first->onset_s - iv.onset_s);
      }
    }
    for (const auto& ev : events) {
      double covered = 0.0;
      for (const auto& iv : truth) covered += overlap_s(ev, iv);
      m.fp_seconds += ev.duration() - covered;
    }
  }
  m.sensitivity = m.n_intervals
                      ? static_cast<double>(m.n_detected) / static_cast<double>(m.n_intervals)
                      : 0.0;
  if (m.total_seconds <= 0.0) throw std::invalid_argument("seizure_metrics: zero total time");
  m.fpr_min_per_hour = 60.0 * m.fp_seconds / m.total_seconds;
  if (m.n_detected) m.mean_latency_s = latency_sum / static_cast<double>(m.n_detected);
  return m;
}

ThresholdChoice select_threshold(const std::vector<std::vector<double>>& probs_per_rec,
                                 const std::vector<std::vector<Interval>>& truth_per_rec,
                                 double window_len_s, double fpr_limit) {
  if (probs_per_rec.empty() || probs_per_rec.size() != truth_per_rec.size())
    throw std::invalid_argument("select_threshold: empty or misaligned validation set");
  std::vector<double> lens(probs_per_rec.size());
  for (std::size_t r = 0; r < probs_per_rec.size(); ++r)
    lens[r] = static_cast<double>(probs_per_rec[r].size()) * window_len_s;

  ThresholdChoice best;
  bool have_best = false;
  ThresholdChoice fallback;
  bool have_fallback = false;
  for (int k = 0; k <= 14; ++k) {
    const double t = static_cast<double>(k + 2) / 20.0;  // 0.10, 0.15, ..., 0.80
    std::vector<std::vector<Interval>> events(probs_per_rec.size());
    for (std::size_t r = 0; r < probs_per_rec.size(); ++r)
      events[r] = events_from_probs(probs_per_rec[r], t, window_len_s);
    const auto m = seizure_metrics(events, truth_per_rec, lens);
    const ThresholdChoice c{t, m.sensitivity, m.fpr_min_per_hour, m.fpr_min_per_hour < fpr_limit};
    if (c.met_fpr_limit && (!have_best || c.sensitivity > best.sensitivity)) {
      best = c;  // ties keep the earlier (lower) threshold
      have_best = true;
    }
    if (!have_fallback || c.fpr_min_per_hour < fallback.fpr_min_per_hour) {
      fallback = c;
      have_fallback = true;
    }
  }
  return have_best ? best : fallback;
}

TransitionMatrix transition_from_samples(std::span<const TransitionSample> samples) {
  TransitionMatrix t;
  double sum[2] = {0.0, 0.0};
  for (const auto& s : samples) {
    if (s.y_hat != 0 && s.y_hat != 1)
      throw std::invalid_argument("transition_from_samples: y_hat must be 0/1");
    sum[s.y_hat] += s.p1;
    (s.y_hat ? t.n1 : t.n0) += 1;
  }
  if (t.n0 == 0 || t.n1 == 0)
    throw std::invalid_argument("transition_from_samples: a noisy class has no windows");
  t.rows[0][1] = sum[0] / static_cast<double>(t.n0);
  t.rows[0][0] = 1.0 - t.rows[0][1];
  t.rows[1][1] = sum[1] / static_cast<double>(t.n1);
  t.rows[1][0] = 1.0 - t.rows[1][1];
  return t;
}

TransitionMatrix transition_matrix(const MlpParams& params, const WindowDataset& data,
                                   const ZPolicy& policy, int n_mc, uint64_t seed,
                                   double band_s, double label_clamp) {
  std::vector<TransitionSample> samples;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& ivs = data.rec_intervals.at(data.rec[i]);
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& iv : ivs) dist = std::min(dist, std::abs(data.center_s[i] - iv.onset_s));
    if (dist > band_s) continue;
    const int y_hat = data.p_g[i] >= 0.5 ? 1 : 0;
    const auto u =
        mc_uncertainty(params, data.features(i), n_mc, derive_seed(seed, Stream::eval_mc, {i}));
    const auto [z0, z1] = resolve_z(policy, u.z);
    const double z = y_hat ? z1 : z0;
    const double pg = clamp_label(static_cast<double>(y_hat), label_clamp);
    samples.push_back({y_hat, pg * (1.0 - z) + u.mean * z});
  }
  if (samples.empty())
    throw std::invalid_argument("transition_matrix: no windows near noisy onsets");
  return transition_from_samples(samples);
}

nlohmann::json to_json(const EventMetrics& m) {
  nlohmann::json j{{"n_intervals", m.n_intervals},
                   {"n_detected", m.n_detected},
                   {"sensitivity", m.sensitivity},
                   {"fp_seconds", m.fp_seconds},
                   {"total_seconds", m.total_seconds},
                   {"fpr_min_per_hour", m.fpr_min_per_hour}};
  if (std::isnan(m.mean_latency_s))
    j["mean_latency_s"] = nullptr;
  else
    j["mean_latency_s"] = m.mean_latency_s;
  return j;
}

nlohmann::json to_json(const TransitionMatrix& t) {
  return {{"rows",
           {{t.rows[0][0], t.rows[0][1]}, {t.rows[1][0], t.rows[1][1]}}},
          {"n_windows", {t.n0, t.n1}}};
}

nlohmann::json to_json(const MetricsReport& r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : r.folds) {
    nlohmann::json j{{"repeat", f.repeat},
                     {"fold", f.fold},
                     {"test_subjects", f.test_subjects},
                     {"lr", f.lr},
                     {"threshold", f.threshold},
                     {"auroc", f.auroc},
                     {"auprc", f.auprc},
                     {"sensitivity", f.sensitivity},
                     {"fpr_min_per_hour", f.fpr_min_per_hour}};
    if (std::isnan(f.mean_latency_s))
      j["mean_latency_s"] = nullptr;
    else
      j["mean_latency_s"] = f.mean_latency_s;
    folds.push_back(std::move(j));
  }
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& [name, agg] : r.summary)
    summary[name] = {{"mean", agg.mean}, {"stddev", agg.stddev}};
  return {{"folds", folds}, {"summary", summary}};
}

std::string fold_csv(const MetricsReport& r) {
  std::ostringstream out;
  out << "repeat,fold,test_subjects,lr,threshold,auroc,auprc,sensitivity,"
         "fpr_min_per_hour,mean_latency_s\n";
  for (const auto& f : r.folds) {
    out << f.repeat << ',' << f.fold << ',';
    for (std::size_t i = 0; i < f.test_subjects.size(); ++i)
      out << (i ? ";" : "") << f.test_subjects[i];
    out << ',' << f.lr << ',' << f.threshold << ',' << f.auroc << ',' << f.auprc << ','
        << f.sensitivity << ',' << f.fpr_min_per_hour << ',';
    if (!std::isnan(f.mean_latency_s)) out << f.mean_latency_s;
    out << '\n';
  }
  return out.str();
}

}  // namespace bundl
