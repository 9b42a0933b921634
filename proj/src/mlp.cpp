#include "bundl/mlp.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "parameter files are little-endian; big-endian hosts unsupported");

namespace bundl {

namespace {

double clamp_prob(double p) {
  if (p < kProbEps) return kProbEps;
  if (p > 1.0 - kProbEps) return 1.0 - kProbEps;
  return p;
}

void check_shape(const MlpParams& p) {
  if (p.dims.size() < 2 || p.dims.back() != 1)
    throw std::invalid_argument("mlp: dims must have >= 2 entries and end in 1");
  for (const auto d : p.dims)
    if (d == 0) throw std::invalid_argument("mlp: zero-width layer");
  if (!(p.dropout_rate >= 0.0 && p.dropout_rate < 1.0))
    throw std::invalid_argument("mlp: dropout_rate must lie in [0, 1)");
}

}  // namespace

std::size_t MlpParams::count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) n += dims[l + 1] * dims[l] + dims[l + 1];
  return n;
}

std::size_t MlpParams::weight_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) off += dims[l + 1] * dims[l] + dims[l + 1];
  return off;
}

std::size_t MlpParams::bias_offset(std::size_t layer) const {
  return weight_offset(layer) + dims[layer + 1] * dims[layer];
}

MlpParams init_params(const std::vector<std::size_t>& dims, double dropout_rate, uint64_t seed) {
  MlpParams p;
  p.dims = dims;
  p.dropout_rate = dropout_rate;
  check_shape(p);
  p.flat.assign(p.count(), 0.0);
  Rng rng(derive_seed(seed, Stream::param_init));
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    double* w = p.flat.data() + p.weight_offset(l);
    const std::size_t nw = dims[l + 1] * dims[l];
    for (std::size_t i = 0; i < nw; ++i) w[i] = rng.uniform(-bound, bound);
    // biases stay zero
  }
  return p;
}

DropoutMask draw_mask(const MlpParams& params, Rng& rng) {
  DropoutMask m;
  const double keep_scale = 1.0 / (1.0 - params.dropout_rate);
  const std::size_t n_hidden = params.n_layers() - 1;
  m.layer.resize(n_hidden);
  for (std::size_t l = 0; l < n_hidden; ++l) {
    m.layer[l].resize(params.dims[l + 1]);
    for (auto& v : m.layer[l]) v = rng.uniform() < params.dropout_rate ? 0.0 : keep_scale;
  }
  return m;
}

double forward(const MlpParams& params, std::span<const double> x, const DropoutMask* mask,
               ForwardTrace* trace) {
  check_shape(params);
  if (x.size() != params.dims[0]) throw std::invalid_argument("mlp forward: input size mismatch");
  if (mask && mask->layer.size() != params.n_layers() - 1)
    throw std::invalid_argument("mlp forward: mask shape mismatch");

  const std::size_t n_layers = params.n_layers();
  std::vector<double> cur(x.begin(), x.end());
  if (trace) {
    trace->act.assign(n_layers + 1, {});
    trace->pre.assign(n_layers, {});
    trace->act[0] = cur;
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t in = params.dims[l], out = params.dims[l + 1];
    const double* w = params.flat.data() + params.weight_offset(l);
    const double* b = params.flat.data() + params.bias_offset(l);
    std::vector<double> pre(out);
    for (std::size_t o = 0; o < out; ++o) {
      double s = b[o];
      const double* wr = w + o * in;
      for (std::size_t i = 0; i < in; ++i) s += wr[i] * cur[i];
      pre[o] = s;
    }
    if (trace) trace->pre[l] = pre;
    if (l + 1 < n_layers) {
      for (std::size_t o = 0; o < out; ++o) {
        double a = pre[o] > 0.0 ? pre[o] : 0.0;
        if (mask) a *= mask->layer[l][o];
        pre[o] = a;
      }
      cur = std::move(pre);
      if (trace) trace->act[l + 1] = cur;
    } else {
      const double raw = 1.0 / (1.0 + std::exp(-pre[0]));
      if (trace) trace->raw = raw;
      return clamp_prob(raw);
    }
  }
  throw std::logic_error("mlp forward: unreachable");
}

void backward(const MlpParams& params, const DropoutMask* mask, const ForwardTrace& trace,
              double upstream, std::span<double> grad) {
  if (grad.size() != params.flat.size())
    throw std::invalid_argument("mlp backward: grad size mismatch");
  const std::size_t n_layers = params.n_layers();
  // d(prob)/d(pre_last) via the raw sigmoid; the clamp is a numerical guard
  // whose active region has derivative ~kProbEps anyway.
  std::vector<double> d_pre{upstream * trace.raw * (1.0 - trace.raw)};
  for (std::size_t l = n_layers; l-- > 0;) {
    const std::size_t in = params.dims[l], out = params.dims[l + 1];
    const double* w = params.flat.data() + params.weight_offset(l);
    double* gw = grad.data() + params.weight_offset(l);
    double* gb = grad.data() + params.bias_offset(l);
    const auto& a = trace.act[l];
    for (std::size_t o = 0; o < out; ++o) {
      const double d = d_pre[o];
      gb[o] += d;
      double* gwr = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) gwr[i] += d * a[i];
    }
    if (l == 0) break;
    std::vector<double> d_act(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = d_pre[o];
      const double* wr = w + o * in;
      for (std::size_t i = 0; i < in; ++i) d_act[i] += d * wr[i];
    }
    // Through dropout and ReLU of layer l-1.
    const auto& pre_prev = trace.pre[l - 1];
    for (std::size_t i = 0; i < in; ++i) {
      double d = pre_prev[i] > 0.0 ? d_act[i] : 0.0;
      if (mask) d *= mask->layer[l - 1][i];
      d_act[i] = d;
    }
    d_pre = std::move(d_act);
  }
}

std::vector<double> first_layer_pre(const MlpParams& params, std::span<const double> x) {
  check_shape(params);
  if (x.size() != params.dims[0])
    throw std::invalid_argument("first_layer_pre: input size mismatch");
  const std::size_t in = params.dims[0], out = params.dims[1];
  const double* w = params.flat.data() + params.weight_offset(0);
  const double* b = params.flat.data() + params.bias_offset(0);
  std::vector<double> pre(out);
  for (std::size_t o = 0; o < out; ++o) {
    double s = b[o];
    const double* wr = w + o * in;
    for (std::size_t i = 0; i < in; ++i) s += wr[i] * x[i];
    pre[o] = s;
  }
  return pre;
}

double forward_from_pre(const MlpParams& params, std::span<const double> pre0,
                        const DropoutMask* mask) {
  const std::size_t n_layers = params.n_layers();
  if (pre0.size() != params.dims[1])
    throw std::invalid_argument("forward_from_pre: pre0 size mismatch");
  if (n_layers == 1) {  // no hidden layer: pre0 is already the output logit
    return clamp_prob(1.0 / (1.0 + std::exp(-pre0[0])));
  }
  std::vector<double> cur(pre0.size());
  for (std::size_t o = 0; o < pre0.size(); ++o) {
    double a = pre0[o] > 0.0 ? pre0[o] : 0.0;
    if (mask) a *= mask->layer[0][o];
    cur[o] = a;
  }
  for (std::size_t l = 1; l < n_layers; ++l) {
    const std::size_t in = params.dims[l], out = params.dims[l + 1];
    const double* w = params.flat.data() + params.weight_offset(l);
    const double* b = params.flat.data() + params.bias_offset(l);
    std::vector<double> pre(out);
    for (std::size_t o = 0; o < out; ++o) {
      double s = b[o];
      const double* wr = w + o * in;
      for (std::size_t i = 0; i < in; ++i) s += wr[i] * cur[i];
      pre[o] = s;
    }
    if (l + 1 < n_layers) {
      for (std::size_t o = 0; o < out; ++o) {
        double a = pre[o] > 0.0 ? pre[o] : 0.0;
        if (mask) a *= mask->layer[l][o];
        pre[o] = a;
      }
      cur = std::move(pre);
    } else {
      return clamp_prob(1.0 / (1.0 + std::exp(-pre[0])));
    }
  }
  throw std::logic_error("forward_from_pre: unreachable");
}

void save_params(const MlpParams& params, const std::string& path, const nlohmann::json& meta) {
  nlohmann::json header{{"format", "bundl-mlp"},
                        {"version", 1},
                        {"dims", params.dims},
                        {"dropout_rate", params.dropout_rate},
                        {"meta", meta}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_params: cannot open " + path);
  out << header.dump() << '\n';
  out.write(reinterpret_cast<const char*>(params.flat.data()),
            static_cast<std::streamsize>(params.flat.size() * sizeof(double)));
  if (!out) throw std::runtime_error("save_params: write failed for " + path);
}

MlpParams load_params(const std::string& path, nlohmann::json* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_params: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_params: missing header in " + path);
  nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("format", "") != "bundl-mlp")
    throw std::runtime_error("load_params: not a model file: " + path);
  MlpParams p;
  p.dims = header.at("dims").get<std::vector<std::size_t>>();
  p.dropout_rate = header.at("dropout_rate").get<double>();
  check_shape(p);
  p.flat.resize(p.count());
  in.read(reinterpret_cast<char*>(p.flat.data()),
          static_cast<std::streamsize>(p.flat.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(p.flat.size() * sizeof(double)))
    throw std::runtime_error("load_params: truncated parameter block in " + path);
  if (meta) *meta = header.value("meta", nlohmann::json::object());
  return p;
}

}  // namespace bundl
