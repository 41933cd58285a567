#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sketchreg/matrix.hpp"
#include "sketchreg/regression.hpp"
#include "sketchreg/sketch.hpp"

namespace sketchreg {

struct PooledFit {
  std::vector<RegressionFit> per_sketch;  ///< surviving sketches only
  std::vector<double> beta_bar;
  std::vector<double> se_beta_bar;
  double c_beta_bar = 0.0;     ///< c'β̄
  double se_c_beta_bar = 0.0;  ///< same J(J−1) form applied to se(c'β̃_j)
  std::vector<double> t_per_sketch;
  double t_bar2 = 0.0;
  double se_t_bar2 = 0.0;
  double beta0 = 0.0;  ///< hypothesised value of c'β
  std::size_t J = 0;   ///< surviving sketches
  std::size_t m = 0;
  std::size_t failures = 0;
};

/// Row blocks for J disjoint sketches. RS1 takes consecutive runs of m from a partial
/// permutation (J blocks of m rows); other schemes split a full permutation into J blocks of
/// ⌊n/J⌋ rows, each later compressed to m rows. J = 1 with a non-RS1 scheme keeps row order.
std::vector<std::vector<std::size_t>> draw_partition(SchemeId scheme, std::size_t n, std::size_t m, std::size_t J,
                                                     std::uint64_t seed);

/// Sketches each block of `data` (typically [X y ...]) with its own operator; block j uses
/// seed derive_seed(seed, {j}). RS1 blocks are pure row selections weighted √(n/m).
std::vector<DenseMatrix> sketch_blocks(const DenseMatrix& data, SchemeId scheme, std::size_t m,
                                       const std::vector<std::vector<std::size_t>>& blocks, std::uint64_t seed);
/// n_source that each block's fit should carry.
std::size_t block_source_rows(SchemeId scheme, std::size_t n, const std::vector<std::size_t>& block);

/// Aggregates per-sketch fits; needs at least one survivor, and at least two when more than
/// one sketch was requested. J = 1 reports se(β̄) = se(β̃).
PooledFit pool_fits(std::vector<RegressionFit> fits, std::size_t failures, std::size_t m, const ContrastVector& c,
                    double beta0);

/// J disjoint sketches of (y, X), per-sketch OLS, pooled aggregates.
PooledFit pooled_fit(std::span<const double> y, const DenseMatrix& x, std::size_t m, std::size_t J, std::uint64_t seed,
                     const ContrastVector& c, double beta0, VarianceMode mode = VarianceMode::Homoskedastic,
                     SchemeId scheme = SchemeId::RS1);

/// (c'β̄ − β0)/se(c'β̄), for normal critical values.
double t1_statistic(const PooledFit& pf);
/// √J·t̄2/se(t̄2), for t_{J−1} critical values. DegenerateSpread when se(t̄2) = 0.
double t2_statistic(const PooledFit& pf);

/// n/(mJ)·1/(1−ε).
double pooled_variance_bound(double n, double m, double J, double epsilon);

}  // namespace sketchreg
