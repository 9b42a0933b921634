#include "bundl/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bundl/adam.hpp"

namespace bundl {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void fisher_yates(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.bounded(i)]);
}

void check_dataset(const WindowDataset& data) {
  if (data.size() == 0) throw std::invalid_argument("training dataset is empty");
  if (data.dim == 0) throw std::invalid_argument("training dataset has zero feature dim");
  for (const double l : data.p_g)
    if (!(l >= 0.0 && l <= 1.0))
      throw std::invalid_argument("training dataset: label outside [0, 1]");
}

std::vector<std::size_t> model_dims(const WindowDataset& data, const TrainConfig& cfg) {
  std::vector<std::size_t> dims{data.dim};
  dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dims.push_back(1);
  return dims;
}

}  // namespace

const char* to_string(Method method) {
  switch (method) {
    case Method::bundl: return "bundl";
    case Method::cel: return "cel";
    case Method::selfadapt: return "selfadapt";
    case Method::nal: return "nal";
  }
  throw std::invalid_argument("bad Method");
}

Method method_from(const std::string& name) {
  if (name == "bundl") return Method::bundl;
  if (name == "cel") return Method::cel;
  if (name == "selfadapt") return Method::selfadapt;
  if (name == "nal") return Method::nal;
  throw std::invalid_argument("unknown method: " + name);
}

void WindowDataset::push(std::span<const double> feat, double label, std::size_t rec_index,
                         double center) {
  if (dim == 0) dim = feat.size();
  if (feat.size() != dim) throw std::invalid_argument("WindowDataset::push: dim mismatch");
  x.insert(x.end(), feat.begin(), feat.end());
  p_g.push_back(label);
  rec.push_back(rec_index);
  center_s.push_back(center);
}

std::vector<std::size_t> pretrain_windows(const WindowDataset& data, double margin_s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& ivs = data.rec_intervals.at(data.rec[i]);
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& iv : ivs) {
      dist = std::min(dist, std::abs(data.center_s[i] - iv.onset_s));
      dist = std::min(dist, std::abs(data.center_s[i] - iv.offset_s));
    }
    if (dist >= margin_s) out.push_back(i);
  }
  return out;
}

MlpParams pretrain(const WindowDataset& data, const TrainConfig& cfg,
                   std::vector<EpochLog>* log, std::ostream* progress) {
  check_dataset(data);
  MlpParams params = init_params(model_dims(data, cfg), cfg.dropout_rate, cfg.seed);
  if (cfg.pretrain_epochs <= 0) return params;

  const auto keep = pretrain_windows(data, cfg.pretrain_margin_s);
  bool has_pos = false, has_neg = false;
  for (const auto i : keep) (data.p_g[i] >= 0.5 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw std::runtime_error("pretrain: confident window set is missing a class");

  std::vector<double> grad(params.flat.size());
  Adam adam(params.flat.size(), {.lr = cfg.lr});
  for (int epoch = 1; epoch <= cfg.pretrain_epochs; ++epoch) {
    const auto t0 = Clock::now();
    auto order = keep;
    Rng shuffle_rng(derive_seed(cfg.seed, Stream::pretrain_shuffle,
                                {static_cast<uint64_t>(epoch)}));
    fisher_yates(order, shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t idx = order[k];
        Rng mask_rng(derive_seed(cfg.seed, Stream::pretrain_mask,
                                 {static_cast<uint64_t>(epoch), idx}));
        const DropoutMask mask = draw_mask(params, mask_rng);
        ForwardTrace trace;
        const double f = forward(params, data.features(idx), &mask, &trace);
        const double target = clamp_label(data.p_g[idx], cfg.label_clamp);
        const double loss = cross_entropy(target, f);
        if (!std::isfinite(loss))
          throw std::runtime_error("pretrain: non-finite loss at epoch " +
                                   std::to_string(epoch));
        loss_sum += loss;
        backward(params, &mask, trace, cross_entropy_dprob(target, f), grad);
      }
      const double inv = 1.0 / static_cast<double>(end - begin);
      for (auto& g : grad) g *= inv;
      adam.step(params.flat, grad);
    }
    const EpochLog entry{epoch, loss_sum / static_cast<double>(order.size()), 0.0, ms_since(t0)};
    if (log) log->push_back(entry);
    if (progress)
      *progress << "pretrain epoch " << epoch << "/" << cfg.pretrain_epochs << "  loss "
                << entry.mean_loss << "\n";
  }
  return params;
}

TrainResult train_from(const MlpParams& init, const WindowDataset& data, const TrainConfig& cfg,
                       std::ostream* progress) {
  check_dataset(data);
  if (init.dims.front() != data.dim)
    throw std::invalid_argument("train_from: model input dim mismatch");

  TrainResult result;
  result.params = init;
  MlpParams& params = result.params;
  NalLayer nal = NalLayer::init(cfg.nal_diag_logit);

  std::vector<double> grad(params.flat.size());
  std::array<double, 4> nal_grad{};
  Adam adam(params.flat.size(), {.lr = cfg.lr});
  Adam nal_adam(4, {.lr = cfg.lr});

  // SelfAdapt state: EMA of past (detached) predictions, seeded with the
  // clamped given labels.
  std::vector<double> ema;
  std::vector<double> f_epoch;
  if (cfg.method == Method::selfadapt) {
    ema.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
      ema[i] = clamp_label(data.p_g[i], cfg.label_clamp);
    f_epoch.resize(data.size());
  }

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = Clock::now();
    Rng shuffle_rng(derive_seed(cfg.seed, Stream::shuffle, {static_cast<uint64_t>(epoch)}));
    fisher_yates(order, shuffle_rng);
    double loss_sum = 0.0, z_sum = 0.0;
    std::size_t z_count = 0;

    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      nal_grad = {};
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t idx = order[k];
        const double pg = clamp_label(data.p_g[idx], cfg.label_clamp);

        // Per-method target; treated as a constant in the gradient.
        double target = pg;
        if (cfg.method == Method::bundl) {
          const auto u = mc_uncertainty(
              params, data.features(idx), cfg.n_mc,
              derive_seed(cfg.seed, Stream::mc, {static_cast<uint64_t>(epoch), idx}));
          const auto [z0, z1] = resolve_z(cfg.z_policy, u.z);
          target = clean_param(pg, u.mean, z0, z1);
          z_sum += u.z;
          ++z_count;
        } else if (cfg.method == Method::selfadapt && epoch > cfg.sa_warmup_epochs) {
          target = selfadapt_target(pg, ema[idx], cfg.sa_alpha);
        }

        Rng mask_rng(derive_seed(cfg.seed, Stream::train_mask,
                                 {static_cast<uint64_t>(epoch), idx}));
        const DropoutMask mask = draw_mask(params, mask_rng);
        ForwardTrace trace;
        const double f = forward(params, data.features(idx), &mask, &trace);

        double loss, upstream_f;
        if (cfg.method == Method::nal) {
          double noisy = nal.noisy_prob(f);
          if (noisy < kProbEps) noisy = kProbEps;
          if (noisy > 1.0 - kProbEps) noisy = 1.0 - kProbEps;
          loss = cross_entropy(target, noisy);
          const double d_noisy = cross_entropy_dprob(target, noisy);
          upstream_f = d_noisy * nal.dnoisy_df();
          const auto dl = nal.dnoisy_dlogits(f);
          for (int j = 0; j < 4; ++j) nal_grad[j] += d_noisy * dl[j];
        } else {
          loss = cross_entropy(target, f);
          upstream_f = cross_entropy_dprob(target, f);
        }
        if (!std::isfinite(loss))
          throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                   std::to_string(epoch));
        loss_sum += loss;
        backward(params, &mask, trace, upstream_f, grad);
        if (cfg.method == Method::selfadapt) f_epoch[idx] = f;
      }
      const double inv = 1.0 / static_cast<double>(end - begin);
      for (auto& g : grad) g *= inv;
      adam.step(params.flat, grad);
      if (cfg.method == Method::nal) {
        for (auto& g : nal_grad) g *= inv;
        nal_adam.step(nal.logits, nal_grad);
      }
    }

    if (cfg.method == Method::selfadapt)
      for (std::size_t i = 0; i < data.size(); ++i)
        ema[i] = cfg.sa_ema_decay * ema[i] + (1.0 - cfg.sa_ema_decay) * f_epoch[i];

    const EpochLog entry{epoch, loss_sum / static_cast<double>(data.size()),
                         z_count ? z_sum / static_cast<double>(z_count) : 0.0, ms_since(t0)};
    result.train_log.push_back(entry);
    if (progress) {
      *progress << "epoch " << epoch << "/" << cfg.epochs << "  loss " << entry.mean_loss;
      if (cfg.method == Method::bundl) *progress << "  z " << entry.mean_z;
      *progress << "\n";
    }
  }
  if (cfg.method == Method::nal) result.nal_matrix = nal.matrix();
  return result;
}

TrainResult train_method(const WindowDataset& data, const TrainConfig& cfg,
                         std::ostream* progress) {
  std::vector<EpochLog> pre_log;
  MlpParams start = pretrain(data, cfg, &pre_log, progress);
  TrainResult result = train_from(start, data, cfg, progress);
  result.pretrain_log = std::move(pre_log);
  return result;
}

std::vector<double> predict_all(const MlpParams& params, const WindowDataset& data) {
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    out[i] = forward(params, data.features(i), nullptr);
  return out;
}

}  // namespace bundl
