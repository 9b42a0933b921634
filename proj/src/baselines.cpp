#include "bundl/baselines.hpp"

#include <cmath>
#include <stdexcept>

namespace bundl {

double selfadapt_target(double clamped_label, double ema, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("selfadapt_target: alpha outside [0, 1]");
  return alpha * clamped_label + (1.0 - alpha) * ema;
}

NalLayer NalLayer::init(double diag_logit) {
  NalLayer l;
  l.logits = {diag_logit, 0.0, 0.0, diag_logit};
  return l;
}

std::array<double, 4> NalLayer::matrix() const {
  std::array<double, 4> t;
  for (int row = 0; row < 2; ++row) {
    const double a = logits[row * 2], b = logits[row * 2 + 1];
    const double m = a > b ? a : b;
    const double ea = std::exp(a - m), eb = std::exp(b - m);
    t[row * 2] = ea / (ea + eb);
    t[row * 2 + 1] = eb / (ea + eb);
  }
  return t;
}

double NalLayer::noisy_prob(double f) const {
  const auto t = matrix();
  return f * t[3] + (1.0 - f) * t[1];
}

double NalLayer::dnoisy_df() const {
  const auto t = matrix();
  return t[3] - t[1];
}

std::array<double, 4> NalLayer::dnoisy_dlogits(double f) const {
  const auto t = matrix();
  // Row softmax: dT[r][1]/dl[r][1] = T[r][1] (1 - T[r][1]),
  //              dT[r][1]/dl[r][0] = -T[r][1] T[r][0].
  return {
      -(1.0 - f) * t[1] * t[0],  // l00
      (1.0 - f) * t[1] * (1.0 - t[1]),  // l01
      -f * t[3] * t[2],  // l10
      f * t[3] * (1.0 - t[3]),  // l11
  };
}

}  // namespace bundl
