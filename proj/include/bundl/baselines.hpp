// Reference noisy-label strategies trained under the same loop as the
// uncertainty-aware loss: plain cross-entropy (which needs nothing beyond
// cross_entropy itself), self-adaptive target mixing, and a learned 2x2
// noise-transition output layer.

#pragma once

#include <array>
#include <cstdint>

namespace bundl {

// SelfAdapt target after warmup: a convex mix of the clamped given label
// and an exponential moving average of the model's own past predictions.
double selfadapt_target(double clamped_label, double ema, double alpha);

// Noise-adaptation layer: T[i][j] = p(y_hat = j | y = i), parameterized by
// row-softmaxed logits so rows always form distributions. The model's clean
// probability f is pushed through T during training; inference drops the
// layer and uses f directly.
struct NalLayer {
  std::array<double, 4> logits{};  // row-major [l00, l01, l10, l11]

  // Diagonal logits at +diag_logit, off-diagonal at 0: starts near identity.
  static NalLayer init(double diag_logit);

  std::array<double, 4> matrix() const;  // row-softmax of the logits

  // p(y_hat = 1 | x) = f T[1][1] + (1 - f) T[0][1].
  double noisy_prob(double f) const;
  double dnoisy_df() const;
  std::array<double, 4> dnoisy_dlogits(double f) const;
};

}  // namespace bundl
