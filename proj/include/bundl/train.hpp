// Shared training loop for every method. All methods pretrain the same way
// (plain cross-entropy on windows far from any noisy interval boundary) and
// then differ only in how the per-window target (and, for the transition
// layer, the training-time output) is formed. Every random choice derives
// from the config seed, so runs are bitwise reproducible.

#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bundl/baselines.hpp"
#include "bundl/bundl.hpp"
#include "bundl/mlp.hpp"
#include "bundl/types.hpp"

namespace bundl {

enum class Method { bundl, cel, selfadapt, nal };

const char* to_string(Method method);
Method method_from(const std::string& name);

// Flattened training view of a corpus: one row per window.
struct WindowDataset {
  std::size_t dim = 0;
  std::vector<double> x;  // size() * dim, row-major standardized features
  std::vector<double> p_g;  // given (noisy) label per window, in [0, 1]
  std::vector<std::size_t> rec;  // recording index per window
  std::vector<double> center_s;  // window center within its recording
  std::vector<std::vector<Interval>> rec_intervals;  // noisy intervals per recording
  std::vector<double> rec_len_s;  // recording length per recording

  std::size_t size() const { return p_g.size(); }
  std::span<const double> features(std::size_t i) const { return {x.data() + i * dim, dim}; }
  void push(std::span<const double> feat, double label, std::size_t rec_index, double center);
};

struct TrainConfig {
  Method method = Method::bundl;
  uint64_t seed = 1;
  std::vector<std::size_t> hidden = {64, 32};
  double dropout_rate = 0.2;
  int epochs = 30;
  int pretrain_epochs = 5;
  int batch_size = 256;
  double lr = 1e-3;
  int n_mc = 20;             // Monte-Carlo dropout passes per window
  double label_clamp = 0.001;
  double pretrain_margin_s = 30.0;  // boundary exclusion zone for pretraining
  ZPolicy z_policy;          // used by Method::bundl only
  // SelfAdapt
  int sa_warmup_epochs = 5;
  double sa_alpha = 0.7;
  double sa_ema_decay = 0.9;
  // Noise-adaptation layer
  double nal_diag_logit = 2.0;
};

struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
  double mean_z = 0.0;  // mean uncertainty over the epoch (bundl only, else 0)
  double wall_ms = 0.0;
};

struct TrainResult {
  MlpParams params;
  std::vector<EpochLog> pretrain_log;
  std::vector<EpochLog> train_log;
  std::array<double, 4> nal_matrix{};  // learned T (nal only, else zeros)
};

// Indices of windows whose center sits at least margin_s from every noisy
// interval boundary of their recording (all windows of interval-free
// recordings qualify).
std::vector<std::size_t> pretrain_windows(const WindowDataset& data, double margin_s);

// Cross-entropy warm-up on the confident windows; throws std::runtime_error
// if the confident set misses a class. One line per epoch goes to *progress
// when given.
MlpParams pretrain(const WindowDataset& data, const TrainConfig& cfg,
                   std::vector<EpochLog>* log = nullptr, std::ostream* progress = nullptr);

// Method training continued from explicit initial parameters.
TrainResult train_from(const MlpParams& init, const WindowDataset& data, const TrainConfig& cfg,
                       std::ostream* progress = nullptr);

// pretrain + train_from under one config.
TrainResult train_method(const WindowDataset& data, const TrainConfig& cfg,
                         std::ostream* progress = nullptr);

// Deterministic (mask-free) prediction for every window.
std::vector<double> predict_all(const MlpParams& params, const WindowDataset& data);

}  // namespace bundl
