#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace symkern {

/// SplitMix64 finalizer; used to derive well-separated seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a over a string tag, for naming RNG streams.
std::uint64_t fnv1a(std::string_view s);

/// Deterministic random generator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. All distributions are implemented here rather than through
/// std::*_distribution, whose algorithms are implementation-defined; this
/// keeps seeded output identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Named substream of a global seed. Streams are derived as
  /// splitmix64(global ^ fnv1a(component) + counter * 0x9e3779b97f4a7c15).
  static Rng stream(std::uint64_t global_seed, std::string_view component,
                    std::uint64_t counter = 0);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);

  /// Standard normal via the Marsaglia polar method.
  double normal();

  /// Complex value whose real and imaginary parts are independent N(0,1).
  std::complex<double> normal_complex();

  /// Gamma(shape, scale) via Marsaglia-Tsang squeeze (boosted for shape < 1).
  double gamma(double shape, double scale = 1.0);

  /// Chi distribution with (possibly non-integer) dof degrees of freedom.
  double chi(double dof);

  /// Beta-prime(a, b) as a ratio of two gamma draws.
  double beta_prime(double a, double b);

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace symkern
