#include "igc/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace igc {

void require_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite()) throw NumericalError(what + " contains NaN or Inf");
}

const char* to_string(Activation a) {
  switch (a) {
    case Activation::relu:
      return "relu";
    case Activation::identity:
      return "identity";
  }
  return "?";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "identity") return Activation::identity;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

GeneratorParams::GeneratorParams(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  validate();
  for (const auto& layer : layers_) {
    adam_.m_weights.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
    adam_.v_weights.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
    adam_.m_bias.push_back(Vector::Zero(layer.bias.size()));
    adam_.v_bias.push_back(Vector::Zero(layer.bias.size()));
  }
}

void GeneratorParams::validate() const {
  if (layers_.empty()) throw std::invalid_argument("generator needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.weights.rows() < 1 || layer.weights.cols() < 1) {
      throw std::invalid_argument("layer " + std::to_string(l) + " has an empty weight matrix");
    }
    if (layer.bias.size() != layer.weights.cols()) {
      throw std::invalid_argument("layer " + std::to_string(l) + " bias width mismatch");
    }
    if (l > 0 && layer.weights.rows() != layers_[l - 1].weights.cols()) {
      throw std::invalid_argument("layer " + std::to_string(l) + " fan-in does not match previous layer");
    }
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
      throw NumericalError("layer " + std::to_string(l) + " has non-finite parameters");
    }
  }
}

GeneratorParams GeneratorParams::glorot(int input_dim, std::span<const int> hidden_units,
                                        int output_dim, Rng& rng) {
  if (input_dim < 1 || output_dim < 1) {
    throw std::invalid_argument("generator input and output widths must be positive");
  }
  std::vector<DenseLayer> layers;
  int fan_in = input_dim;
  auto make = [&](int fan_out, Activation act) {
    if (fan_out < 1) throw std::invalid_argument("hidden layer width must be positive");
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    DenseLayer layer;
    layer.weights.resize(fan_in, fan_out);
    // Row-major fill so the draw order is independent of Eigen's storage order.
    for (int r = 0; r < fan_in; ++r) {
      for (int c = 0; c < fan_out; ++c) layer.weights(r, c) = rng.uniform(-limit, limit);
    }
    layer.bias = Vector::Zero(fan_out);
    layer.activation = act;
    layers.push_back(std::move(layer));
    fan_in = fan_out;
  };
  for (int units : hidden_units) make(units, Activation::relu);
  make(output_dim, Activation::identity);
  return GeneratorParams(std::move(layers));
}

int GeneratorParams::input_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.front().weights.rows());
}

int GeneratorParams::output_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().weights.cols());
}

std::size_t GeneratorParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weights.size() + layer.bias.size();
  return n;
}

DenseLayer& GeneratorParams::mutable_layer(std::size_t i) {
  ++version_;
  return layers_.at(i);
}

Gradients Gradients::zeros_like(const GeneratorParams& params) {
  Gradients g;
  for (const auto& layer : params.layers()) {
    g.weights.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
    g.bias.push_back(Vector::Zero(layer.bias.size()));
  }
  return g;
}

bool Gradients::all_finite() const {
  for (const auto& w : weights) {
    if (!w.allFinite()) return false;
  }
  for (const auto& b : bias) {
    if (!b.allFinite()) return false;
  }
  return true;
}

Matrix normal_matrix(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = rng.normal();
  }
  return m;
}

NoiseBatch sample_noise(std::uint64_t seed, Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("sample_noise: M and K must be >= 1");
  Rng rng(seed);
  return NoiseBatch{normal_matrix(rng, rows, cols), seed};
}

Matrix mlp_forward(const GeneratorParams& params, const Matrix& z, ForwardCache* cache) {
  if (z.cols() != params.input_dim()) {
    throw std::invalid_argument("mlp_forward: input width " + std::to_string(z.cols()) +
                                " does not match generator input " +
                                std::to_string(params.input_dim()));
  }
  if (cache) {
    cache->version = params.version();
    cache->owner = &params;
    cache->inputs.clear();
    cache->pre_activations.clear();
  }
  Matrix h = z;
  for (const auto& layer : params.layers()) {
    Matrix pre = h * layer.weights;
    pre.rowwise() += layer.bias.transpose();
    if (cache) cache->inputs.push_back(std::move(h));
    if (layer.activation == Activation::relu) {
      h = pre.cwiseMax(0.0);
    } else {
      h = pre;
    }
    if (cache) cache->pre_activations.push_back(std::move(pre));
  }
  return h;
}

Gradients mlp_backward(const GeneratorParams& params, const ForwardCache& cache,
                       const Matrix& d_output) {
  if (cache.owner != &params || cache.version != params.version()) {
    throw StaleCacheError("mlp_backward: parameters changed since the forward pass");
  }
  const std::size_t n_layers = params.layer_count();
  if (cache.inputs.size() != n_layers || cache.pre_activations.size() != n_layers) {
    throw StaleCacheError("mlp_backward: cache does not match the layer count");
  }
  if (d_output.rows() != cache.pre_activations.back().rows() ||
      d_output.cols() != params.output_dim()) {
    throw std::invalid_argument("mlp_backward: output gradient has the wrong shape");
  }
  Gradients grads;
  grads.weights.resize(n_layers);
  grads.bias.resize(n_layers);
  Matrix g = d_output;
  for (std::size_t i = n_layers; i-- > 0;) {
    const auto& layer = params.layer(i);
    if (layer.activation == Activation::relu) {
      g = (cache.pre_activations[i].array() > 0.0).select(g, 0.0);
    }
    grads.weights[i] = cache.inputs[i].transpose() * g;
    grads.bias[i] = g.colwise().sum().transpose();
    if (i > 0) g = g * layer.weights.transpose();
  }
  return grads;
}

void adam_step(GeneratorParams& params, const Gradients& grads, const AdamHyper& hyper) {
  const std::size_t n_layers = params.layer_count();
  if (grads.weights.size() != n_layers || grads.bias.size() != n_layers) {
    throw std::invalid_argument("adam_step: gradient layer count mismatch");
  }
  for (std::size_t i = 0; i < n_layers; ++i) {
    const auto& layer = params.layers_[i];
    if (grads.weights[i].rows() != layer.weights.rows() ||
        grads.weights[i].cols() != layer.weights.cols() ||
        grads.bias[i].size() != layer.bias.size()) {
      throw std::invalid_argument("adam_step: gradient shape mismatch in layer " + std::to_string(i));
    }
  }
  if (!grads.all_finite()) throw NumericalError("adam_step: non-finite gradient");

  auto& st = params.adam_;
  st.step += 1;
  const double t = static_cast<double>(st.step);
  const double bc1 = 1.0 - std::pow(hyper.beta1, t);
  const double bc2 = 1.0 - std::pow(hyper.beta2, t);
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = hyper.beta1 * m + (1.0 - hyper.beta1) * g;
    v = hyper.beta2 * v + (1.0 - hyper.beta2) * g.cwiseAbs2();
    param.array() -= hyper.learning_rate * (m.array() / bc1) /
                     ((v.array() / bc2).sqrt() + hyper.epsilon);
  };
  for (std::size_t i = 0; i < n_layers; ++i) {
    auto& layer = params.layers_[i];
    update(layer.weights, st.m_weights[i], st.v_weights[i], grads.weights[i]);
    update(layer.bias, st.m_bias[i], st.v_bias[i], grads.bias[i]);
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
      throw NumericalError("adam_step: parameters became non-finite");
    }
  }
  ++params.version_;
}

}  // namespace igc
