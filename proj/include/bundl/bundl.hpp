// Core of the uncertainty-aware loss: Monte-Carlo dropout statistics, the
// clean-label posterior parameter, and the cross-entropy objective against
// that (constant) posterior target. The posterior interpolates between the
// given noisy label and the model's mean dropout prediction, weighted by a
// normalized predictive-entropy score z in [0, 1].

#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "bundl/mlp.hpp"

namespace bundl {

// Binary cross-entropy of prediction `prob` against a fixed (possibly soft)
// target: -[t log f + (1-t) log(1-f)], and its derivative in f. The target
// is treated as a constant (no gradient flows through it).
double cross_entropy(double target, double prob);
double cross_entropy_dprob(double target, double prob);

// Clamp a raw 0/1 (or soft) label into [eps, 1-eps] for numerical stability.
double clamp_label(double y, double eps = 0.001);

struct UncertaintyEstimate {
  double mean = 0.0;  // mean predicted probability over dropout samples
  double z = 0.0;     // mean per-sample Bernoulli entropy, normalized by ln 2
};

// Statistics of explicit per-sample probabilities (each must lie strictly
// inside (0, 1); forward() already clamps). z is clamped into [0, 1].
UncertaintyEstimate mean_and_entropy(std::span<const double> samples);

// n_samples dropout forward passes with masks drawn from `seed`. No
// gradients are taken through any of this.
UncertaintyEstimate mc_uncertainty(const MlpParams& params, std::span<const double> x,
                                   int n_samples, uint64_t seed);

// Bernoulli parameter of the clean-label posterior given the noisy label
// probability p_g, the mean dropout prediction f_bar, and per-noisy-class
// uncertainty weights z0 (for y_hat=0) and z1 (for y_hat=1):
//   p_yc = p_g (z1 f_bar + p_g (1 - z1)) + (1 - p_g)(z0 f_bar + p_g (1 - z0))
// With z0 = z1 = 0 this reduces to p_g, recovering plain cross-entropy.
double clean_param(double p_g, double f_bar, double z0, double z1);

// Which z weights are fixed priors and which come from the per-window
// estimate. Over-segmented labels make spurious positives, so the positive
// class weight is estimated while z0 stays a small prior; under-segmented
// labels are the mirror image; symmetric estimates both.
enum class ZPrior { over, under, symmetric, none };

const char* to_string(ZPrior prior);
ZPrior z_prior_from(const std::string& name);

struct ZPolicy {
  bool fix_z0 = true;
  bool fix_z1 = false;
  double z0 = 0.001;  // used when fixed
  double z1 = 0.001;

  static ZPolicy from_prior(ZPrior prior, double fixed_value = 0.001);
};

// The (z0, z1) pair actually used for a window with estimate z_est.
std::pair<double, double> resolve_z(const ZPolicy& policy, double z_est);

}  // namespace bundl
