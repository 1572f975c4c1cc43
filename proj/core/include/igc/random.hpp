#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace igc {

/// Seeded random stream used everywhere in the library.
///
/// The bit generator is std::mt19937_64, whose output sequence is fixed by the
/// standard. All variate transforms are implemented here rather than taken from
/// <random> distributions, whose algorithms differ between standard libraries.
/// Method identities (part of the reproducibility record):
///   uniform      53-bit mantissa from the top bits of one draw
///   normal       Marsaglia polar method, second variate cached
///   exponential  -log of an open-interval uniform
///   gamma        Marsaglia-Tsang squeeze, shape < 1 boosted by U^(1/shape)
///   stable       Chambers-Mallows-Stuck (Kanter) positive stable, beta = 1
class Rng {
 public:
  static constexpr const char* kMethodTag =
      "mt19937_64;uniform53;normal=marsaglia_polar;gamma=marsaglia_tsang;stable=cms";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n). Unbiased (rejection on the top range).
  std::size_t index(std::size_t n);

  double normal();
  double exponential();
  /// Gamma(shape, scale = 1).
  double gamma(double shape);
  /// Positive stable variate S with Laplace transform E[exp(-t S)] = exp(-t^index),
  /// 0 < index <= 1.
  double positive_stable(double index);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent child seed from (master, stream) with a SplitMix64
/// finalizer. Used for counter-based splitting of repetitions and sub-streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace igc
