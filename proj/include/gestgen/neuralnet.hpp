#pragma once

// Fully connected network with hand-written forward/backward passes and an
// Adam optimizer. Parameters live in one flat buffer (per layer: weights
// out×in row-major, then biases) so optimizers, gradient checks, and
// serialization all see the same layout.
//
// All reductions run in a fixed order, so results are bit-reproducible for a
// given build.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gestgen/binary_io.hpp"
#include "gestgen/error.hpp"
#include "gestgen/random.hpp"

namespace gestgen::nn {

/// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

enum class Activation { kIdentity, kRelu, kLeakyRelu, kTanh, kSigmoid };

inline constexpr double kLeakySlope = 0.2;

inline std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kLeakyRelu: return "leaky_relu";
    case Activation::kTanh: return "tanh";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "identity";
}

inline Activation activation_from_name(std::string_view name) {
  for (auto a : {Activation::kIdentity, Activation::kRelu, Activation::kLeakyRelu,
                 Activation::kTanh, Activation::kSigmoid}) {
    if (activation_name(a) == name) return a;
  }
  throw ValidationError("unknown activation '" + std::string(name) + "'");
}

template <typename T>
T activate(Activation a, T z) {
  switch (a) {
    case Activation::kIdentity: return z;
    case Activation::kRelu: return z > T(0) ? z : T(0);
    case Activation::kLeakyRelu: return z > T(0) ? z : T(kLeakySlope) * z;
    case Activation::kTanh: return std::tanh(z);
    case Activation::kSigmoid:
      if (z >= T(0)) return T(1) / (T(1) + std::exp(-z));
      return std::exp(z) / (T(1) + std::exp(z));
  }
  return z;
}

/// d activation / dz, from the pre-activation z and the output y.
template <typename T>
T activation_slope(Activation a, T z, T y) {
  switch (a) {
    case Activation::kIdentity: return T(1);
    case Activation::kRelu: return z > T(0) ? T(1) : T(0);
    case Activation::kLeakyRelu: return z > T(0) ? T(1) : T(kLeakySlope);
    case Activation::kTanh: return T(1) - y * y;
    case Activation::kSigmoid: return y * (T(1) - y);
  }
  return T(1);
}

struct LayerSpec {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation activation = Activation::kIdentity;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

template <typename T = double>
class MlpNetwork {
 public:
  MlpNetwork() = default;

  explicit MlpNetwork(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw ValidationError("network needs at least one layer");
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const auto& s = layers_[l];
      if (s.in == 0 || s.out == 0) throw ValidationError("layer dimensions must be positive");
      if (l > 0 && layers_[l - 1].out != s.in) {
        throw ValidationError("layer " + std::to_string(l) + " input size " +
                              std::to_string(s.in) + " does not match previous output " +
                              std::to_string(layers_[l - 1].out));
      }
      offsets_.push_back(offset);
      offset += s.out * s.in + s.out;
    }
    params_.assign(offset, T{});
  }

  const std::vector<LayerSpec>& layers() const { return layers_; }
  std::size_t input_dim() const { return layers_.front().in; }
  std::size_t output_dim() const { return layers_.back().out; }
  std::size_t num_params() const { return params_.size(); }

  std::span<T> params() { return params_; }
  std::span<const T> params() const { return params_; }

  std::size_t weight_offset(std::size_t l) const { return offsets_[l]; }
  std::size_t bias_offset(std::size_t l) const {
    return offsets_[l] + layers_[l].out * layers_[l].in;
  }

  std::span<const T> weights(std::size_t l) const {
    return {params_.data() + weight_offset(l), layers_[l].out * layers_[l].in};
  }
  std::span<T> weights(std::size_t l) {
    return {params_.data() + weight_offset(l), layers_[l].out * layers_[l].in};
  }
  std::span<const T> bias(std::size_t l) const {
    return {params_.data() + bias_offset(l), layers_[l].out};
  }
  std::span<T> bias(std::size_t l) { return {params_.data() + bias_offset(l), layers_[l].out}; }

  bool all_finite() const {
    return std::all_of(params_.begin(), params_.end(), [](T v) { return std::isfinite(v); });
  }

  friend bool operator==(const MlpNetwork&, const MlpNetwork&) = default;

 private:
  std::vector<LayerSpec> layers_;
  std::vector<std::size_t> offsets_;
  std::vector<T> params_;
};

/// Glorot-uniform weights, zero biases.
template <typename T>
void glorot_init(MlpNetwork<T>& net, Rng& rng) {
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const auto& s = net.layers()[l];
    const double limit = std::sqrt(6.0 / static_cast<double>(s.in + s.out));
    for (auto& w : net.weights(l)) w = static_cast<T>(rng.uniform(-limit, limit));
    for (auto& b : net.bias(l)) b = T{};
  }
}

/// Activations cached by forward() for backward().
template <typename T>
struct Tape {
  std::vector<Matrix<T>> inputs;  // input to each layer
  std::vector<Matrix<T>> pre;     // affine output of each layer
  std::vector<Matrix<T>> post;    // activated output of each layer
};

template <typename T>
struct ForwardResult {
  Matrix<T> output;
  Tape<T> tape;
};

namespace detail {

template <typename T>
T dot(const T* a, const T* b, std::size_t n) {
  T s0{}, s1{}, s2{}, s3{};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace detail

template <typename T>
ForwardResult<T> forward(const MlpNetwork<T>& net, const Matrix<T>& batch) {
  if (batch.cols() != net.input_dim()) {
    throw ValidationError("batch width " + std::to_string(batch.cols()) +
                          " does not match network input " + std::to_string(net.input_dim()));
  }
  ForwardResult<T> res;
  auto& tape = res.tape;
  const std::size_t rows = batch.rows();
  Matrix<T> x = batch;
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const auto& s = net.layers()[l];
    const auto w = net.weights(l);
    const auto b = net.bias(l);
    Matrix<T> z(rows, s.out);
    Matrix<T> y(rows, s.out);
    for (std::size_t r = 0; r < rows; ++r) {
      const T* xr = x.row(r).data();
      for (std::size_t o = 0; o < s.out; ++o) {
        const T v = detail::dot(xr, w.data() + o * s.in, s.in) + b[o];
        z(r, o) = v;
        y(r, o) = activate(s.activation, v);
      }
    }
    tape.inputs.push_back(std::move(x));
    tape.pre.push_back(std::move(z));
    x = y;
    tape.post.push_back(std::move(y));
  }
  res.output = std::move(x);
  return res;
}

/// Forward pass without keeping the tape.
template <typename T>
Matrix<T> predict(const MlpNetwork<T>& net, const Matrix<T>& batch) {
  return forward(net, batch).output;
}

/// Which quantity `backward` receives the gradient of.
enum class GradientOf {
  kOutput,              // activated network output
  kFinalPreActivation,  // last layer before its activation (e.g. logits)
};

template <typename T>
struct Gradients {
  std::vector<T> params;  // same layout as MlpNetwork::params()
  Matrix<T> input;
};

template <typename T>
Gradients<T> backward(const MlpNetwork<T>& net, const Tape<T>& tape, const Matrix<T>& grad,
                      GradientOf wrt = GradientOf::kOutput) {
  const std::size_t n_layers = net.layers().size();
  if (tape.pre.size() != n_layers) throw ValidationError("tape does not match network");
  const std::size_t rows = tape.pre.back().rows();
  if (grad.rows() != rows || grad.cols() != net.output_dim()) {
    throw ValidationError("output gradient shape does not match forward batch");
  }

  Gradients<T> g;
  g.params.assign(net.num_params(), T{});
  Matrix<T> upstream = grad;
  for (std::size_t li = n_layers; li-- > 0;) {
    const auto& s = net.layers()[li];
    const auto& z = tape.pre[li];
    const auto& y = tape.post[li];
    const auto& x = tape.inputs[li];

    Matrix<T> dz = std::move(upstream);
    const bool skip_slope = li + 1 == n_layers && wrt == GradientOf::kFinalPreActivation;
    if (!skip_slope) {
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t o = 0; o < s.out; ++o) {
          dz(r, o) *= activation_slope(s.activation, z(r, o), y(r, o));
        }
      }
    }

    T* dw = g.params.data() + net.weight_offset(li);
    T* db = g.params.data() + net.bias_offset(li);
    for (std::size_t o = 0; o < s.out; ++o) {
      T* dwo = dw + o * s.in;
      for (std::size_t r = 0; r < rows; ++r) {
        const T d = dz(r, o);
        const T* xr = x.row(r).data();
        for (std::size_t i = 0; i < s.in; ++i) dwo[i] += d * xr[i];
        db[o] += d;
      }
    }

    const auto w = net.weights(li);
    Matrix<T> dx(rows, s.in);
    for (std::size_t r = 0; r < rows; ++r) {
      T* dxr = dx.row(r).data();
      for (std::size_t o = 0; o < s.out; ++o) {
        const T d = dz(r, o);
        const T* wo = w.data() + o * s.in;
        for (std::size_t i = 0; i < s.in; ++i) dxr[i] += d * wo[i];
      }
    }
    upstream = std::move(dx);
  }
  g.input = std::move(upstream);
  return g;
}

struct AdamHyper {
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T = double>
struct AdamState {
  AdamHyper hyper;
  std::vector<T> m;
  std::vector<T> v;
  std::size_t t = 0;

  AdamState() = default;
  AdamState(std::size_t n, AdamHyper h) : hyper(h), m(n, T{}), v(n, T{}) {}
};

/// One bias-corrected Adam update, in place.
template <typename T>
void adam_step(std::span<T> params, std::span<const T> grads, AdamState<T>& state) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw ValidationError("Adam parameter, gradient and moment sizes differ");
  }
  ++state.t;
  const auto& h = state.hyper;
  const T b1 = static_cast<T>(h.beta1);
  const T b2 = static_cast<T>(h.beta2);
  const T c1 = T(1) - static_cast<T>(std::pow(h.beta1, static_cast<double>(state.t)));
  const T c2 = T(1) - static_cast<T>(std::pow(h.beta2, static_cast<double>(state.t)));
  const T lr = static_cast<T>(h.lr);
  const T eps = static_cast<T>(h.epsilon);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const T g = grads[i];
    state.m[i] = b1 * state.m[i] + (T(1) - b1) * g;
    state.v[i] = b2 * state.v[i] + (T(1) - b2) * g * g;
    const T m_hat = state.m[i] / c1;
    const T v_hat = state.v[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

// Model file: {"format":"gestgen-mlp","version":1,"layers":[...],
// "num_params":n, "meta":{...}} then n little-endian doubles.

inline constexpr int kModelVersion = 1;

inline void save_network(const std::string& path, const MlpNetwork<double>& net,
                         const nlohmann::ordered_json& meta = nlohmann::ordered_json::object()) {
  nlohmann::ordered_json h;
  h["format"] = "gestgen-mlp";
  h["version"] = kModelVersion;
  auto layers = nlohmann::ordered_json::array();
  for (const auto& s : net.layers()) {
    layers.push_back({{"in", s.in}, {"out", s.out}, {"activation", activation_name(s.activation)}});
  }
  h["layers"] = layers;
  h["num_params"] = net.num_params();
  h["meta"] = meta;
  write_headered_payload(path, h, net.params());
}

struct LoadedNetwork {
  MlpNetwork<double> net;
  nlohmann::ordered_json meta;
};

inline LoadedNetwork load_network(const std::string& path) {
  auto data = read_headered_payload(path, "gestgen-mlp", "num_params");
  const auto& h = data.header;
  if (h.value("version", 0) != kModelVersion) {
    throw ValidationError("'" + path + "': unsupported model version");
  }
  if (!h.contains("layers") || !h["layers"].is_array()) {
    throw ValidationError("'" + path + "': header lacks layer list");
  }
  std::vector<LayerSpec> specs;
  for (const auto& l : h["layers"]) {
    specs.push_back({l.at("in").get<std::size_t>(), l.at("out").get<std::size_t>(),
                     activation_from_name(l.at("activation").get<std::string>())});
  }
  LoadedNetwork out{MlpNetwork<double>(specs), h.value("meta", nlohmann::ordered_json::object())};
  if (out.net.num_params() != data.values.size()) {
    throw ValidationError("'" + path + "': parameter count does not match architecture");
  }
  std::copy(data.values.begin(), data.values.end(), out.net.params().begin());
  if (!out.net.all_finite()) throw ValidationError("'" + path + "': non-finite parameters");
  return out;
}

}  // namespace gestgen::nn
