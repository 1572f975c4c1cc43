#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace igc;
using igc::testing::max_relative_error;
using igc::testing::numeric_gradient;

namespace {

GeneratorParams random_net(std::uint64_t seed, int k, std::vector<int> hidden, int d) {
  Rng rng(seed);
  auto p = GeneratorParams::glorot(k, hidden, d, rng);
  // Non-zero biases so the test also covers the bias path.
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    auto& layer = p.mutable_layer(l);
    for (Index j = 0; j < layer.bias.size(); ++j) layer.bias(j) = rng.uniform(-0.3, 0.3);
  }
  return p;
}

// Plain loops, no Eigen products.
Matrix reference_forward(const GeneratorParams& p, const Matrix& z) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(z.rows()));
  for (Index r = 0; r < z.rows(); ++r)
    for (Index c = 0; c < z.cols(); ++c) rows[static_cast<std::size_t>(r)].push_back(z(r, c));
  for (const auto& layer : p.layers()) {
    for (auto& x : rows) {
      std::vector<double> y(static_cast<std::size_t>(layer.weights.cols()));
      for (Index j = 0; j < layer.weights.cols(); ++j) {
        double s = layer.bias(j);
        for (Index i = 0; i < layer.weights.rows(); ++i) s += x[static_cast<std::size_t>(i)] * layer.weights(i, j);
        y[static_cast<std::size_t>(j)] = layer.activation == Activation::relu ? std::max(0.0, s) : s;
      }
      x = std::move(y);
    }
  }
  Matrix out(z.rows(), p.output_dim());
  for (Index r = 0; r < z.rows(); ++r)
    for (Index c = 0; c < out.cols(); ++c) out(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return out;
}

// Loss = sum(Y .* W) for a fixed weighting W, so dL/dY = W.
double weighted_output(const GeneratorParams& p, const Matrix& z, const Matrix& w) {
  return (mlp_forward(p, z).array() * w.array()).sum();
}

}  // namespace

TEST(SampleNoise, ColumnMeansNearZero) {
  const NoiseBatch b = sample_noise(7, 200, 6);
  ASSERT_EQ(b.values.rows(), 200);
  ASSERT_EQ(b.values.cols(), 6);
  for (Index c = 0; c < 6; ++c) EXPECT_LT(std::abs(b.values.col(c).mean()), 4.0 / std::sqrt(200.0));
}

TEST(SampleNoise, SameSeedSameBatch) {
  EXPECT_EQ(sample_noise(7, 50, 3).values, sample_noise(7, 50, 3).values);
  EXPECT_NE(sample_noise(7, 50, 3).values, sample_noise(8, 50, 3).values);
}

TEST(SampleNoise, UnitVariance) {
  const Matrix z = sample_noise(7, 100000, 1).values;
  const double mean = z.mean();
  const double var = (z.array() - mean).square().sum() / static_cast<double>(z.size() - 1);
  EXPECT_GE(var, 0.98);
  EXPECT_LE(var, 1.02);
}

TEST(MlpForward, ZeroParametersGiveZeroOutput) {
  auto p = random_net(1, 4, {8, 8}, 2);
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    p.mutable_layer(l).weights.setZero();
    p.mutable_layer(l).bias.setZero();
  }
  const Matrix y = mlp_forward(p, sample_noise(3, 10, 4).values);
  EXPECT_TRUE((y.array() == 0.0).all());
}

TEST(MlpForward, IdentityLayer) {
  DenseLayer layer{Matrix::Identity(3, 3), Vector::Zero(3), Activation::identity};
  GeneratorParams p({layer});
  const Matrix z = sample_noise(4, 20, 3).values;
  EXPECT_EQ(mlp_forward(p, z), z);
}

TEST(MlpForward, MatchesLoopReference) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = random_net(seed, 6, {16, 12}, 2);
    const Matrix z = sample_noise(seed + 10, 33, 6).values;
    const Matrix diff = mlp_forward(p, z) - reference_forward(p, z);
    EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(MlpForward, ShapeMismatchThrows) {
  const auto p = random_net(1, 4, {8}, 2);
  EXPECT_THROW(mlp_forward(p, Matrix::Zero(5, 3)), std::invalid_argument);
}

TEST(MlpBackward, ZeroUpstreamGivesZeroGradients) {
  const auto p = random_net(2, 4, {8, 8}, 2);
  ForwardCache cache;
  const Matrix z = sample_noise(1, 10, 4).values;
  mlp_forward(p, z, &cache);
  const Gradients g = mlp_backward(p, cache, Matrix::Zero(10, 2));
  for (const auto& w : g.weights) EXPECT_TRUE((w.array() == 0.0).all());
  for (const auto& b : g.bias) EXPECT_TRUE((b.array() == 0.0).all());
}

TEST(MlpBackward, LinearLayerSumClosedForm) {
  Rng rng(3);
  DenseLayer layer{igc::testing::uniform_matrix(rng, 4, 3, -1, 1), Vector::Zero(3), Activation::identity};
  GeneratorParams p({layer});
  const Matrix z = sample_noise(5, 7, 4).values;
  ForwardCache cache;
  mlp_forward(p, z, &cache);
  const Gradients g = mlp_backward(p, cache, Matrix::Ones(7, 3));
  const Matrix expected_w = z.transpose() * Matrix::Ones(7, 3);
  EXPECT_LT((g.weights[0] - expected_w).cwiseAbs().maxCoeff(), 1e-12);
  for (Index j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(g.bias[0](j), 7.0);
}

TEST(MlpBackward, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng shape_rng(seed * 7919);
    const int k = 1 + static_cast<int>(shape_rng.index(6));
    const int d = 1 + static_cast<int>(shape_rng.index(3));
    std::vector<int> hidden;
    const int layers = 1 + static_cast<int>(shape_rng.index(2));
    for (int l = 0; l < layers; ++l) hidden.push_back(2 + static_cast<int>(shape_rng.index(15)));
    auto p = random_net(seed, k, hidden, d);
    const Matrix z = sample_noise(seed + 100, 9, k).values;
    const Matrix w = igc::testing::uniform_matrix(shape_rng, 9, d, -1, 1);

    ForwardCache cache;
    mlp_forward(p, z, &cache);
    const Gradients g = mlp_backward(p, cache, w);
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
      auto f_w = [&](const Matrix& x) {
        auto q = p;
        q.mutable_layer(l).weights = x;
        return weighted_output(q, z, w);
      };
      auto f_b = [&](const Matrix& x) {
        auto q = p;
        q.mutable_layer(l).bias = x;
        return weighted_output(q, z, w);
      };
      EXPECT_LT(max_relative_error(g.weights[l], numeric_gradient(f_w, p.layer(l).weights)), 1e-4)
          << "seed " << seed << " layer " << l;
      EXPECT_LT(max_relative_error(g.bias[l], numeric_gradient(f_b, p.layer(l).bias)), 1e-4)
          << "seed " << seed << " layer " << l;
    }
  }
}

TEST(MlpBackward, InactiveReluPassesNoGradient) {
  auto p = random_net(4, 3, {5}, 2);
  p.mutable_layer(0).bias.setConstant(-1e6);
  ForwardCache cache;
  mlp_forward(p, sample_noise(2, 6, 3).values, &cache);
  const Gradients g = mlp_backward(p, cache, Matrix::Ones(6, 2));
  EXPECT_TRUE((g.weights[0].array() == 0.0).all());
  EXPECT_TRUE((g.bias[0].array() == 0.0).all());
  EXPECT_TRUE((g.weights[1].array() == 0.0).all());
}

TEST(MlpBackward, StaleCacheDetected) {
  auto p = random_net(5, 3, {4}, 2);
  ForwardCache cache;
  mlp_forward(p, sample_noise(2, 6, 3).values, &cache);
  p.mutable_layer(0).weights(0, 0) += 1.0;
  EXPECT_THROW(mlp_backward(p, cache, Matrix::Ones(6, 2)), StaleCacheError);

  auto other = random_net(5, 3, {4}, 2);
  mlp_forward(other, sample_noise(2, 6, 3).values, &cache);
  EXPECT_THROW(mlp_backward(p, cache, Matrix::Ones(6, 2)), StaleCacheError);
}

TEST(AdamStep, ZeroGradientLeavesParametersAndDecaysMoments) {
  auto p = random_net(6, 3, {4}, 2);
  const auto before = p.layers();
  Gradients g = Gradients::zeros_like(p);
  g.weights[0].setConstant(0.5);
  adam_step(p, g, AdamHyper{});
  const auto after_one = p.layers();
  const Matrix m1 = p.adam().m_weights[0];

  adam_step(p, Gradients::zeros_like(p), AdamHyper{});
  EXPECT_EQ(p.adam().step, 2u);
  EXPECT_LT((p.adam().m_weights[0] - 0.9 * m1).cwiseAbs().maxCoeff(), 1e-15);
  // Parameters only move through the decayed first moment; layers without any
  // gradient history do not move at all.
  EXPECT_EQ(p.layer(1).weights, after_one[1].weights);
  EXPECT_EQ(before[1].weights, after_one[1].weights);
}

TEST(AdamStep, FirstStepMatchesHandComputation) {
  auto p = random_net(7, 2, {3}, 2);
  const Matrix w0 = p.layer(0).weights;
  Gradients g = Gradients::zeros_like(p);
  Rng rng(1);
  g.weights[0] = igc::testing::uniform_matrix(rng, w0.rows(), w0.cols(), -2, 2);
  const AdamHyper h{0.01, 0.9, 0.999, 1e-8};
  adam_step(p, g, h);
  for (Index i = 0; i < w0.size(); ++i) {
    // m_hat = g, v_hat = g^2 after bias correction.
    const double gi = g.weights[0](i);
    const double expected = w0(i) - h.learning_rate * gi / (std::abs(gi) + h.epsilon);
    EXPECT_NEAR(p.layer(0).weights(i), expected, 1e-15);
  }
  EXPECT_EQ(p.adam().step, 1u);
}

TEST(AdamStep, ConvergesOnQuadraticBowl) {
  DenseLayer layer{Matrix::Zero(1, 2), Vector::Zero(2), Activation::identity};
  GeneratorParams p({layer});
  const double target[2] = {0.3, -0.2};
  for (int step = 0; step < 1000; ++step) {
    Gradients g = Gradients::zeros_like(p);
    for (int j = 0; j < 2; ++j) g.weights[0](0, j) = 2.0 * (p.layer(0).weights(0, j) - target[j]);
    adam_step(p, g, AdamHyper{0.01, 0.9, 0.999, 1e-8});
  }
  EXPECT_NEAR(p.layer(0).weights(0, 0), target[0], 1e-3);
  EXPECT_NEAR(p.layer(0).weights(0, 1), target[1], 1e-3);
}

TEST(AdamStep, RejectsNonFiniteGradient) {
  auto p = random_net(8, 2, {3}, 2);
  Gradients g = Gradients::zeros_like(p);
  g.bias[1](0) = std::nan("");
  EXPECT_THROW(adam_step(p, g, AdamHyper{}), NumericalError);
}

TEST(Glorot, BoundsAndActivations) {
  Rng rng(9);
  const std::vector<int> hidden{100, 100};
  const auto p = GeneratorParams::glorot(6, hidden, 2, rng);
  ASSERT_EQ(p.layer_count(), 3u);
  for (std::size_t l = 0; l < 3; ++l) {
    const auto& layer = p.layer(l);
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weights.rows() + layer.weights.cols()));
    EXPECT_LE(layer.weights.cwiseAbs().maxCoeff(), limit);
    EXPECT_GT(layer.weights.cwiseAbs().maxCoeff(), 0.9 * limit);
    EXPECT_TRUE((layer.bias.array() == 0.0).all());
    EXPECT_EQ(layer.activation, l + 1 < 3 ? Activation::relu : Activation::identity);
  }
  EXPECT_EQ(p.input_dim(), 6);
  EXPECT_EQ(p.output_dim(), 2);
}

TEST(Rng, StreamsAreDeterministic) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.normal(), b.normal());
  EXPECT_NE(derive_seed(1, 1), derive_seed(1, 2));
  EXPECT_EQ(derive_seed(1, 1), derive_seed(1, 1));
}

TEST(Rng, GammaMoments) {
  Rng rng(11);
  for (double shape : {0.3, 1.0, 4.5}) {
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double x = rng.gamma(shape);
      s += x;
      s2 += x * x;
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    EXPECT_NEAR(mean, shape, 0.02 * std::max(1.0, shape));
    EXPECT_NEAR(var, shape, 0.05 * std::max(1.0, shape));
  }
}

TEST(Rng, PositiveStableLaplaceTransform) {
  // E[exp(-t S)] = exp(-t^a).
  Rng rng(12);
  for (double a : {0.3, 0.5, 0.9}) {
    const int n = 200000;
    for (double t : {0.5, 1.0, 2.0}) {
      double s = 0.0;
      Rng local(derive_seed(12, static_cast<std::uint64_t>(a * 100 + t * 10)));
      for (int i = 0; i < n; ++i) s += std::exp(-t * local.positive_stable(a));
      EXPECT_NEAR(s / n, std::exp(-std::pow(t, a)), 0.005) << "a=" << a << " t=" << t;
    }
  }
}

TEST(AdamStep, ZeroGradientFromFreshStateIsNoOp) {
  auto p = random_net(13, 3, {4}, 2);
  const auto before = p.layers();
  adam_step(p, Gradients::zeros_like(p), AdamHyper{});
  for (std::size_t l = 0; l < before.size(); ++l) {
    EXPECT_EQ(p.layer(l).weights, before[l].weights);
    EXPECT_EQ(p.layer(l).bias, before[l].bias);
  }
}
