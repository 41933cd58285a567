#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace sketchreg {

/// splitmix64 finalizer: a stateless bijective 64-bit mix.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed expansion contract: folds each coordinate into the master seed through mix64.
/// Changing any coordinate (or their order) changes the derived stream.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> coords) noexcept;

/// Counter-based draws: a pure function of (seed, index), used where a row's randomness
/// must be recomputable in isolation (streaming countsketch, Bernoulli retention).
std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t index) noexcept;
double counter_uniform(std::uint64_t seed, std::uint64_t index) noexcept;

/// Lemire's nearly divisionless map of 64 random bits onto [0, bound). Rejection uses
/// `redraw` so the result stays exactly uniform.
template <class Redraw>
std::uint64_t bounded(std::uint64_t bits, std::uint64_t bound, Redraw&& redraw) {
  __uint128_t prod = static_cast<__uint128_t>(bits) * bound;
  auto low = static_cast<std::uint64_t>(prod);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      prod = static_cast<__uint128_t>(redraw()) * bound;
      low = static_cast<std::uint64_t>(prod);
    }
  }
  return static_cast<std::uint64_t>(prod >> 64);
}

std::uint64_t counter_below(std::uint64_t seed, std::uint64_t index, std::uint64_t bound) noexcept;

/// xoshiro256** seeded through splitmix64. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Standard normal (ziggurat).
  double normal();
  /// Exponential with unit mean (ziggurat).
  double exponential();
  /// Fills `out` with standard normals; same values as repeated normal() calls.
  void fill_normal(std::span<double> out);

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

/// k distinct indices from [0, n) in draw order (partial Fisher-Yates). Uses a sparse swap
/// table when k is small relative to n; both paths consume the generator identically.
std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k);
std::vector<std::size_t> random_permutation(Rng& rng, std::size_t n);

/// Walker alias table over a discrete distribution; zero-probability outcomes are never drawn.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> probabilities);

  std::size_t sample(Rng& rng) const noexcept;
  std::size_t size() const noexcept { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

}  // namespace sketchreg
