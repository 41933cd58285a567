#include "sketchreg/random.hpp"

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <numeric>
#include <unordered_map>

#include "sketchreg/error.hpp"

namespace sketchreg {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

double to_unit(std::uint64_t bits) noexcept { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> coords) noexcept {
  std::uint64_t h = mix64(master);
  for (std::uint64_t c : coords) h = mix64(h ^ mix64(c + kGolden));
  return h;
}

std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) ^ (index * kGolden + 0x632BE59BD9B4E019ULL));
}

double counter_uniform(std::uint64_t seed, std::uint64_t index) noexcept {
  return to_unit(counter_bits(seed, index));
}

std::uint64_t counter_below(std::uint64_t seed, std::uint64_t index, std::uint64_t bound) noexcept {
  std::uint64_t round = 0;
  auto redraw = [&] { return counter_bits(seed ^ mix64(++round), index); };
  return bounded(counter_bits(seed, index), bound, redraw);
}

Rng::Rng(std::uint64_t seed) noexcept {
  std::uint64_t z = seed;
  for (auto& s : s_) {
    z += kGolden;
    s = mix64(z - kGolden);
  }
}

double Rng::uniform() noexcept { return to_unit((*this)()); }

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
  return bounded((*this)(), bound, [this] { return (*this)(); });
}

double Rng::normal() {
  boost::random::normal_distribution<double> dist;
  return dist(*this);
}

void Rng::fill_normal(std::span<double> out) {
  boost::random::normal_distribution<double> dist;
  for (double& v : out) v = dist(*this);
}

double Rng::exponential() {
  boost::random::exponential_distribution<double> dist;
  return dist(*this);
}

std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k) {
  if (k > n) throw Error(ErrorKind::InvalidDims, "cannot draw more indices than the population");
  std::vector<std::size_t> out(k);
  if (k * 8 >= n) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng.below(n - i);
      std::swap(pool[i], pool[j]);
      out[i] = pool[i];
    }
    return out;
  }
  std::unordered_map<std::size_t, std::size_t> swapped;
  swapped.reserve(2 * k);
  auto at = [&](std::size_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(n - i);
    const std::size_t vi = at(i);
    const std::size_t vj = at(j);
    swapped[j] = vi;
    out[i] = vj;
  }
  return out;
}

std::vector<std::size_t> random_permutation(Rng& rng, std::size_t n) {
  return sample_without_replacement(rng, n, n);
}

AliasTable::AliasTable(std::span<const double> probabilities)
    : prob_(probabilities.size(), 0.0), alias_(probabilities.size(), 0) {
  const std::size_t n = probabilities.size();
  if (n == 0) throw Error(ErrorKind::DegenerateInput, "alias table over an empty distribution");
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw Error(ErrorKind::DomainError, "negative or NaN probability");
    total += p;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::DegenerateInput, "probabilities sum to zero");

  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = probabilities[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding. A zero-probability slot left in `small` would be drawn
  // with its own index, so route it to a positive outcome instead.
  std::size_t fallback = 0;
  while (probabilities[fallback] <= 0.0) ++fallback;
  for (std::size_t l : large) {
    prob_[l] = 1.0;
    alias_[l] = l;
  }
  for (std::size_t s : small) {
    prob_[s] = probabilities[s] > 0.0 ? 1.0 : 0.0;
    alias_[s] = probabilities[s] > 0.0 ? s : fallback;
  }
}

std::size_t AliasTable::sample(Rng& rng) const noexcept {
  const std::size_t column = rng.below(prob_.size());
  return rng.uniform() < prob_[column] ? column : alias_[column];
}

}  // namespace sketchreg
