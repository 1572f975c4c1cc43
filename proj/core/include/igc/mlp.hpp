#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "igc/random.hpp"
#include "igc/types.hpp"

namespace igc {

struct Gradients;

enum class Activation { relu, identity };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// One fully connected layer: out = act(in * weights + bias).
/// `weights` is fan_in x fan_out.
struct DenseLayer {
  Matrix weights;
  Vector bias;
  Activation activation = Activation::identity;
};

/// First and second Adam moments, shaped like the layer parameters.
struct AdamState {
  std::vector<Matrix> m_weights, v_weights;
  std::vector<Vector> m_bias, v_bias;
  std::uint64_t step = 0;
};

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Weights of the generator network plus its optimizer state.
///
/// Every mutation bumps `version()`, which forward caches record so that a
/// backward pass against modified parameters is rejected.
class GeneratorParams {
 public:
  GeneratorParams() = default;
  explicit GeneratorParams(std::vector<DenseLayer> layers);

  /// Glorot-uniform weights (+-sqrt(6 / (fan_in + fan_out))), zero biases,
  /// ReLU on hidden layers, identity on the output layer.
  static GeneratorParams glorot(int input_dim, std::span<const int> hidden_units, int output_dim,
                                Rng& rng);

  int input_dim() const;
  int output_dim() const;
  std::size_t layer_count() const { return layers_.size(); }
  std::size_t parameter_count() const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  const DenseLayer& layer(std::size_t i) const { return layers_.at(i); }
  /// Mutable access; invalidates outstanding forward caches.
  DenseLayer& mutable_layer(std::size_t i);

  const AdamState& adam() const { return adam_; }
  std::uint64_t version() const { return version_; }

 private:
  friend void adam_step(GeneratorParams&, const Gradients&, const AdamHyper&);
  void validate() const;

  std::vector<DenseLayer> layers_;
  AdamState adam_;
  std::uint64_t version_ = 0;
};

/// Per-layer activations kept by the forward pass for the backward pass.
struct ForwardCache {
  std::uint64_t version = 0;
  const GeneratorParams* owner = nullptr;
  std::vector<Matrix> inputs;          // input to layer l (M x fan_in)
  std::vector<Matrix> pre_activations;  // M x fan_out
};

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> bias;

  static Gradients zeros_like(const GeneratorParams& params);
  bool all_finite() const;
};

/// M x K standard normal draws and the seed they came from.
struct NoiseBatch {
  Matrix values;
  std::uint64_t seed = 0;
};

/// Fills a rows x cols matrix with standard normals in row-major order.
/// Consecutive calls on one Rng continue the same stream, so chunked
/// generation reproduces single-pass generation exactly.
Matrix normal_matrix(Rng& rng, Index rows, Index cols);

NoiseBatch sample_noise(std::uint64_t seed, Index rows, Index cols);

/// Y = g(Z) applied row-wise. Fills `cache` when given.
Matrix mlp_forward(const GeneratorParams& params, const Matrix& z, ForwardCache* cache = nullptr);

/// Reverse-mode gradients of a scalar loss whose gradient w.r.t. the network
/// output is `d_output`.
Gradients mlp_backward(const GeneratorParams& params, const ForwardCache& cache,
                       const Matrix& d_output);

/// Bias-corrected Adam update; increments the step counter.
void adam_step(GeneratorParams& params, const Gradients& grads, const AdamHyper& hyper);

}  // namespace igc
