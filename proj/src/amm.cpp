#include "sketchreg/amm.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "sketchreg/error.hpp"
#include "sketchreg/linalg.hpp"
#include "sketchreg/random.hpp"

namespace sketchreg {

namespace {

std::vector<double> row_norms(const DenseMatrix& a) {
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = norm2(a.row(i));
  return out;
}

void require_compatible(const DenseMatrix& a, const DenseMatrix& b, const SamplingDistribution& p) {
  if (a.rows() != b.rows() || a.rows() != p.probabilities.size()) {
    throw Error(ErrorKind::DimMismatch, "A, B and p must share the row count");
  }
  for (std::size_t k = 0; k < a.rows(); ++k) {
    if (p.probabilities[k] > 0.0) continue;
    if (norm2(a.row(k)) > 0.0 && norm2(b.row(k)) > 0.0) {
      throw Error(ErrorKind::DomainError, "row " + std::to_string(k) + " has zero probability but a non-zero product");
    }
  }
}

}  // namespace

SamplingDistribution make_distribution(std::vector<double> probabilities) {
  if (probabilities.empty()) throw Error(ErrorKind::EmptyInput, "empty sampling distribution");
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw Error(ErrorKind::DomainError, "probabilities must be finite and non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorKind::DomainError, "probabilities must sum to one");
  return {std::move(probabilities)};
}

SamplingDistribution uniform_distribution(std::size_t n) {
  return {std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

SamplingDistribution optimal_probabilities(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw Error(ErrorKind::DimMismatch, "A and B must share the row count");
  const auto na = row_norms(a);
  const auto nb = row_norms(b);
  std::vector<double> p(a.rows());
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) total += (p[k] = na[k] * nb[k]);
  if (!(total > 0.0)) throw Error(ErrorKind::DegenerateInput, "every row-norm product is zero");
  for (double& x : p) x /= total;
  return {std::move(p)};
}

DenseMatrix amm_at(const DenseMatrix& a, const DenseMatrix& b, const SamplingDistribution& p,
                   std::span<const std::size_t> draws) {
  require_compatible(a, b, p);
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t k : draws) {
    const double w = 1.0 / p.probabilities[k];
    auto ak = a.row(k);
    auto bk = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double ai = ak[i] * w;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += ai * bk[j];
    }
  }
  return scale(c, 1.0 / static_cast<double>(draws.size()));
}

DenseMatrix amm(const DenseMatrix& a, const DenseMatrix& b, std::size_t m, const SamplingDistribution& p,
                std::uint64_t seed) {
  if (m < 1) throw Error(ErrorKind::InvalidDims, "m must be at least 1");
  require_compatible(a, b, p);
  AliasTable table(p.probabilities);
  Rng rng(seed);
  std::vector<std::size_t> draws(m);
  for (auto& k : draws) k = table.sample(rng);
  return amm_at(a, b, p, draws);
}

double amm_variance_bound(const DenseMatrix& a, const DenseMatrix& b, std::size_t m) {
  const double fa = frobenius_norm(a);
  const double fb = frobenius_norm(b);
  return fa * fa * fb * fb / static_cast<double>(m);
}

double amm_exact_variance(const DenseMatrix& a, const DenseMatrix& b, std::size_t m, const SamplingDistribution& p) {
  require_compatible(a, b, p);
  const auto na = row_norms(a);
  const auto nb = row_norms(b);
  double s = 0.0;
  for (std::size_t k = 0; k < na.size(); ++k) {
    const double prod = na[k] * nb[k];
    if (prod > 0.0) s += prod * prod / p.probabilities[k];
  }
  const double fc = frobenius_norm(multiply_tn(a, b));
  return (s - fc * fc) / static_cast<double>(m);
}

std::size_t amm_required_m(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon <= 1.0 && delta > 0.0 && delta <= 1.0)) {
    throw Error(ErrorKind::DomainError, "epsilon and delta must lie in (0, 1]");
  }
  const double raw = 1.0 / (delta * epsilon * epsilon);
  // Guard against 1/(0.1·0.01) landing a hair above an integer.
  const double snapped = std::nearbyint(raw);
  const double v = std::abs(raw - snapped) <= 1e-9 * raw ? snapped : std::ceil(raw);
  return std::max<std::size_t>(1, static_cast<std::size_t>(v));
}

double amm_markov_probability(std::size_t m, double epsilon) {
  return 1.0 / (static_cast<double>(m) * epsilon * epsilon);
}

}  // namespace sketchreg
