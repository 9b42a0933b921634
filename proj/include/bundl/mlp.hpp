// Small fully connected network with ReLU hidden layers, a single sigmoid
// output, and inverted dropout after each hidden activation. Parameters
// live in one flat buffer so the optimizer and serialization stay trivial;
// gradients are exact analytic backprop over a kept forward trace.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bundl/rng.hpp"

#include <json.hpp>

namespace bundl {

// Probabilities are clamped to [kProbEps, 1 - kProbEps] so logs stay finite.
inline constexpr double kProbEps = 1e-7;

struct MlpParams {
  std::vector<std::size_t> dims;  // layer widths, e.g. {114, 64, 32, 1}
  double dropout_rate = 0.2;
  std::vector<double> flat;  // per layer: weights (out x in, row-major), then biases

  std::size_t n_layers() const { return dims.size() - 1; }
  std::size_t count() const;
  std::size_t weight_offset(std::size_t layer) const;
  std::size_t bias_offset(std::size_t layer) const;
};

// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights, zero
// biases. dims must end in 1 and have at least two entries; dropout_rate
// must lie in [0, 1).
MlpParams init_params(const std::vector<std::size_t>& dims, double dropout_rate, uint64_t seed);

// Inverted dropout mask: per hidden unit either 0 (dropped, probability
// `dropout_rate`) or 1/(1 - dropout_rate).
struct DropoutMask {
  std::vector<std::vector<double>> layer;  // one vector per hidden layer
};

DropoutMask draw_mask(const MlpParams& params, Rng& rng);

// Intermediate state kept by forward for the backward pass.
struct ForwardTrace {
  std::vector<std::vector<double>> act;  // act[0] = input, act[l+1] = hidden l output
  std::vector<std::vector<double>> pre;  // pre-activations per layer
  double raw = 0.0;                      // sigmoid output before clamping
};

// Predicted probability in [kProbEps, 1 - kProbEps]. mask == nullptr means
// deterministic inference (dropout off, no scaling).
double forward(const MlpParams& params, std::span<const double> x, const DropoutMask* mask,
               ForwardTrace* trace = nullptr);

// Accumulates dLoss/dparams into grad (same length as params.flat), given
// the trace of the matching forward call and upstream = dLoss/dprobability.
void backward(const MlpParams& params, const DropoutMask* mask, const ForwardTrace& trace,
              double upstream, std::span<double> grad);

// First-layer pre-activations W0 x + b0. They do not depend on dropout, so
// Monte-Carlo dropout sampling computes them once per window.
std::vector<double> first_layer_pre(const MlpParams& params, std::span<const double> x);

// forward() continued from cached first-layer pre-activations.
double forward_from_pre(const MlpParams& params, std::span<const double> pre0,
                        const DropoutMask* mask);

// On-disk format: one JSON header line (dims, dropout, caller metadata)
// followed by the flat parameter buffer as little-endian float64.
void save_params(const MlpParams& params, const std::string& path,
                 const nlohmann::json& meta = nlohmann::json::object());
MlpParams load_params(const std::string& path, nlohmann::json* meta = nullptr);

}  // namespace bundl
