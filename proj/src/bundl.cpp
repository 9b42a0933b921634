#include "bundl/bundl.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bundl {

double cross_entropy(double target, double prob) {
  if (!(prob > 0.0 && prob < 1.0))
    throw std::invalid_argument("cross_entropy: prob must lie strictly in (0, 1)");
  if (!(target >= 0.0 && target <= 1.0))
    throw std::invalid_argument("cross_entropy: target must lie in [0, 1]");
  return -(target * std::log(prob) + (1.0 - target) * std::log(1.0 - prob));
}

double cross_entropy_dprob(double target, double prob) {
  return -target / prob + (1.0 - target) / (1.0 - prob);
}

double clamp_label(double y, double eps) {
  if (!(y >= 0.0 && y <= 1.0)) throw std::invalid_argument("clamp_label: label outside [0, 1]");
  if (y < eps) return eps;
  if (y > 1.0 - eps) return 1.0 - eps;
  return y;
}

UncertaintyEstimate mean_and_entropy(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("mean_and_entropy: no samples");
  double mean = 0.0, z = 0.0;
  for (const double s : samples) {
    if (!(s > 0.0 && s < 1.0))
      throw std::invalid_argument("mean_and_entropy: sample outside (0, 1)");
    mean += s;
    z += -(s * std::log(s) + (1.0 - s) * std::log(1.0 - s)) / std::numbers::ln2;
  }
  const auto n = static_cast<double>(samples.size());
  UncertaintyEstimate u{mean / n, z / n};
  if (u.z < 0.0) u.z = 0.0;
  if (u.z > 1.0) u.z = 1.0;
  return u;
}

UncertaintyEstimate mc_uncertainty(const MlpParams& params, std::span<const double> x,
                                   int n_samples, uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("mc_uncertainty: n_samples must be >= 1");
  // The first-layer pre-activations do not depend on the dropout mask, so
  // they are computed once and shared across all samples.
  const auto pre0 = first_layer_pre(params, x);
  Rng rng(seed);
  std::vector<double> samples(static_cast<std::size_t>(n_samples));
  for (auto& s : samples) {
    const DropoutMask mask = draw_mask(params, rng);
    s = forward_from_pre(params, pre0, &mask);
  }
  return mean_and_entropy(samples);
}

double clean_param(double p_g, double f_bar, double z0, double z1) {
  if (!(p_g >= 0.0 && p_g <= 1.0) || !(f_bar >= 0.0 && f_bar <= 1.0) ||
      !(z0 >= 0.0 && z0 <= 1.0) || !(z1 >= 0.0 && z1 <= 1.0))
    throw std::invalid_argument("clean_param: arguments must lie in [0, 1]");
  return p_g * (z1 * f_bar + p_g * (1.0 - z1)) + (1.0 - p_g) * (z0 * f_bar + p_g * (1.0 - z0));
}

const char* to_string(ZPrior prior) {
  switch (prior) {
    case ZPrior::over: return "over";
    case ZPrior::under: return "under";
    case ZPrior::symmetric: return "symmetric";
    case ZPrior::none: return "none";
  }
  throw std::invalid_argument("bad ZPrior");
}

ZPrior z_prior_from(const std::string& name) {
  if (name == "over") return ZPrior::over;
  if (name == "under") return ZPrior::under;
  if (name == "symmetric") return ZPrior::symmetric;
  if (name == "none") return ZPrior::none;
  throw std::invalid_argument("unknown z prior: " + name);
}

ZPolicy ZPolicy::from_prior(ZPrior prior, double fixed_value) {
  ZPolicy p;
  p.z0 = p.z1 = fixed_value;
  switch (prior) {
    case ZPrior::over:  // spurious positives: doubt y_hat = 1
      p.fix_z0 = true;
      p.fix_z1 = false;
      break;
    case ZPrior::under:  // missed positives: doubt y_hat = 0
      p.fix_z0 = false;
      p.fix_z1 = true;
      break;
    case ZPrior::symmetric:
      p.fix_z0 = p.fix_z1 = false;
      break;
    case ZPrior::none:
      p.fix_z0 = p.fix_z1 = true;
      break;
  }
  return p;
}

std::pair<double, double> resolve_z(const ZPolicy& policy, double z_est) {
  return {policy.fix_z0 ? policy.z0 : z_est, policy.fix_z1 ? policy.z1 : z_est};
}

}  // namespace bundl
