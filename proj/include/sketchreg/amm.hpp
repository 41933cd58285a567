#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sketchreg/matrix.hpp"

namespace sketchreg {

struct SamplingDistribution {
  std::vector<double> probabilities;
};

/// Validates non-negativity and unit mass (within 1e-12).
SamplingDistribution make_distribution(std::vector<double> probabilities);
SamplingDistribution uniform_distribution(std::size_t n);

/// p_k ∝ ‖A_(k)‖·‖B_(k)‖. Throws DegenerateInput when every product is zero.
SamplingDistribution optimal_probabilities(const DenseMatrix& a, const DenseMatrix& b);

/// Monte Carlo estimate of A'B from m rows drawn with replacement from p (alias method):
/// (1/m) Σ_s A_(k_s)' B_(k_s) / p_{k_s}.
DenseMatrix amm(const DenseMatrix& a, const DenseMatrix& b, std::size_t m, const SamplingDistribution& p,
                std::uint64_t seed);

/// Same estimator at caller-chosen draws; a permutation with m = n and uniform p recovers A'B.
DenseMatrix amm_at(const DenseMatrix& a, const DenseMatrix& b, const SamplingDistribution& p,
                   std::span<const std::size_t> draws);

/// (1/m)‖A‖_F²‖B‖_F².
double amm_variance_bound(const DenseMatrix& a, const DenseMatrix& b, std::size_t m);
/// Exact E‖C̃ − A'B‖_F² = (1/m)[Σ_k ‖A_(k)‖²‖B_(k)‖²/p_k − ‖A'B‖_F²].
double amm_exact_variance(const DenseMatrix& a, const DenseMatrix& b, std::size_t m, const SamplingDistribution& p);
/// ⌈1/(δε²)⌉.
std::size_t amm_required_m(double epsilon, double delta);
/// Markov bound 1/(mε²) on P(‖C̃ − C‖_F² > ε²‖A‖_F²‖B‖_F²).
double amm_markov_probability(std::size_t m, double epsilon);

}  // namespace sketchreg
