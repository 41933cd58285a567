#include "sketchreg/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sketchreg/error.hpp"
#include "sketchreg/random.hpp"

namespace sketchreg {

namespace {

constexpr std::uint64_t kTagPartition = 11;

}  // namespace

std::vector<std::vector<std::size_t>> draw_partition(SchemeId scheme, std::size_t n, std::size_t m, std::size_t J,
                                                     std::uint64_t seed) {
  if (J == 0 || m == 0) throw Error(ErrorKind::InvalidDims, "m and J must be positive");
  if (m * J > n) {
    throw Error(ErrorKind::PartitionImpossible, "m*J = " + std::to_string(m * J) + " exceeds n = " + std::to_string(n));
  }
  std::vector<std::vector<std::size_t>> blocks(J);
  if (scheme == SchemeId::RS1) {
    Rng rng(derive_seed(seed, {kTagPartition}));
    const auto picks = sample_without_replacement(rng, n, m * J);
    for (std::size_t j = 0; j < J; ++j) blocks[j].assign(picks.begin() + static_cast<std::ptrdiff_t>(j * m),
                                                         picks.begin() + static_cast<std::ptrdiff_t>((j + 1) * m));
    return blocks;
  }
  const std::size_t size = n / J;
  if (J == 1) {
    blocks[0].resize(n);
    std::iota(blocks[0].begin(), blocks[0].end(), std::size_t{0});
    return blocks;
  }
  Rng rng(derive_seed(seed, {kTagPartition}));
  const auto perm = random_permutation(rng, n);
  for (std::size_t j = 0; j < J; ++j) blocks[j].assign(perm.begin() + static_cast<std::ptrdiff_t>(j * size),
                                                       perm.begin() + static_cast<std::ptrdiff_t>((j + 1) * size));
  return blocks;
}

std::size_t block_source_rows(SchemeId scheme, std::size_t n, const std::vector<std::size_t>& block) {
  return scheme == SchemeId::RS1 ? n : block.size();
}

std::vector<DenseMatrix> sketch_blocks(const DenseMatrix& data, SchemeId scheme, std::size_t m,
                                       const std::vector<std::vector<std::size_t>>& blocks, std::uint64_t seed) {
  std::vector<DenseMatrix> out;
  out.reserve(blocks.size());
  const std::size_t n = data.rows();
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    if (scheme == SchemeId::RS1) {
      const double w = std::sqrt(static_cast<double>(n) / static_cast<double>(blocks[j].size()));
      out.push_back(scale(select_rows(data, blocks[j]), w));
      continue;
    }
    if (m > blocks[j].size()) throw Error(ErrorKind::PartitionImpossible, "block smaller than the sketch size");
    if (scheme == SchemeId::RS4) {
      const DenseMatrix sub = select_rows(data, blocks[j]);
      const SketchOperator op = build_sketch(scheme, sub.rows(), m, derive_seed(seed, {j}), &sub);
      out.push_back(apply_sketch(op, sub));
      continue;
    }
    const SketchOperator op = build_sketch(scheme, blocks[j].size(), m, derive_seed(seed, {j}));
    out.push_back(apply_sketch(op, data, blocks[j]));
  }
  return out;
}

PooledFit pool_fits(std::vector<RegressionFit> fits, std::size_t failures, std::size_t m, const ContrastVector& c,
                    double beta0) {
  const std::size_t requested = fits.size() + failures;
  if (fits.empty() || (requested > 1 && fits.size() < 2)) {
    throw Error(ErrorKind::AllSketchesSingular, std::to_string(failures) + " of " + std::to_string(requested) +
                                                    " sketches were singular");
  }
  const std::size_t J = fits.size();
  const std::size_t K = fits.front().beta.size();
  const double dJ = static_cast<double>(J);
  PooledFit pf;
  pf.J = J;
  pf.m = m;
  pf.failures = failures;
  pf.beta0 = beta0;
  pf.beta_bar.assign(K, 0.0);
  pf.se_beta_bar.assign(K, 0.0);
  double sum_c_var = 0.0;
  for (const auto& f : fits) {
    for (std::size_t k = 0; k < K; ++k) {
      pf.beta_bar[k] += f.beta[k] / dJ;
      pf.se_beta_bar[k] += f.std_errors[k] * f.std_errors[k];
    }
    const double var_c = c.quadratic(f.covariance);
    sum_c_var += var_c;
    pf.t_per_sketch.push_back((c.apply(f.beta) - beta0) / std::sqrt(var_c));
  }
  const double denom = J > 1 ? dJ * (dJ - 1.0) : 1.0;
  for (double& v : pf.se_beta_bar) v = std::sqrt(v / denom);
  pf.c_beta_bar = c.apply(pf.beta_bar);
  pf.se_c_beta_bar = std::sqrt(sum_c_var / denom);
  pf.t_bar2 = std::accumulate(pf.t_per_sketch.begin(), pf.t_per_sketch.end(), 0.0) / dJ;
  if (J > 1) {
    double ss = 0.0;
    for (double t : pf.t_per_sketch) ss += (t - pf.t_bar2) * (t - pf.t_bar2);
    pf.se_t_bar2 = std::sqrt(ss / (dJ - 1.0));
  }
  pf.per_sketch = std::move(fits);
  return pf;
}

PooledFit pooled_fit(std::span<const double> y, const DenseMatrix& x, std::size_t m, std::size_t J, std::uint64_t seed,
                     const ContrastVector& c, double beta0, VarianceMode mode, SchemeId scheme) {
  if (y.size() != x.rows()) throw Error(ErrorKind::DimMismatch, "y and X differ in row count");
  if (m <= x.cols()) throw Error(ErrorKind::InvalidDims, "sketch size must exceed K");
  const std::size_t n = x.rows();
  const auto blocks = draw_partition(scheme, n, m, J, seed);
  const auto sketched = sketch_blocks(append_column(x, y), scheme, m, blocks, seed);
  std::vector<RegressionFit> fits;
  std::size_t failures = 0;
  for (std::size_t j = 0; j < sketched.size(); ++j) {
    try {
      fits.push_back(fit_sketched(sketched[j].column(x.cols()), column_block(sketched[j], 0, x.cols()),
                                  block_source_rows(scheme, n, blocks[j]), mode));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularSketch) throw;
      ++failures;
    }
  }
  return pool_fits(std::move(fits), failures, m, c, beta0);
}

double t1_statistic(const PooledFit& pf) { return (pf.c_beta_bar - pf.beta0) / pf.se_c_beta_bar; }

double t2_statistic(const PooledFit& pf) {
  if (pf.J < 2) throw Error(ErrorKind::InvalidDims, "the averaged-t statistic needs J >= 2");
  // Identical statistics can leave a rounding-level spread from the mean.
  if (!(pf.se_t_bar2 > 1e-12 * std::max(1.0, std::abs(pf.t_bar2)))) throw Error(ErrorKind::DegenerateSpread, "per-sketch t statistics have zero spread");
  return std::sqrt(static_cast<double>(pf.J)) * pf.t_bar2 / pf.se_t_bar2;
}

double pooled_variance_bound(double n, double m, double J, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw Error(ErrorKind::DomainError, "epsilon must lie in [0,1)");
  if (!(m * J <= n)) throw Error(ErrorKind::PartitionImpossible, "m*J exceeds n");
  return n / (m * J) / (1.0 - epsilon);
}

}  // namespace sketchreg
