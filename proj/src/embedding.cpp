#include "sketchreg/embedding.hpp"

#include <cmath>

#include "sketchreg/error.hpp"
#include "sketchreg/linalg.hpp"

namespace sketchreg {

namespace {

void require_full_rank(const std::vector<double>& s) {
  if (s.empty() || !(s.back() >= kDefaultRankTol * s.front()) || s.front() == 0.0) {
    throw Error(ErrorKind::RankDeficient, "embedding diagnostics need a full-column-rank source");
  }
}

std::vector<double> padded_singular_values(const DenseMatrix& m, std::size_t k) {
  std::vector<double> s = m.rows() == 0 ? std::vector<double>{} : singular_values(m);
  s.resize(k, 0.0);
  return s;
}

}  // namespace

double jl_pairwise_success(const DenseMatrix& a, const DenseMatrix& sketched, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorKind::DomainError, "epsilon must lie in (0,1)");
  const std::size_t d = a.cols();
  if (d < 2) throw Error(ErrorKind::InvalidDims, "pairwise check needs at least two columns");
  if (sketched.cols() != d) throw Error(ErrorKind::DimMismatch, "sketch and source differ in width");
  std::size_t counted = 0, kept = 0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      double full = 0.0, sk = 0.0;
      for (std::size_t r = 0; r < a.rows(); ++r) {
        const double diff = a(r, i) - a(r, j);
        full += diff * diff;
      }
      if (full == 0.0) continue;
      for (std::size_t r = 0; r < sketched.rows(); ++r) {
        const double diff = sketched(r, i) - sketched(r, j);
        sk += diff * diff;
      }
      ++counted;
      if (sk >= (1.0 - epsilon) * full && sk <= (1.0 + epsilon) * full) ++kept;
    }
  }
  return counted == 0 ? 1.0 : static_cast<double>(kept) / static_cast<double>(counted);
}

double jl_pairwise_success(const DenseMatrix& a, const SketchOperator& op, double epsilon) {
  return jl_pairwise_success(a, apply_sketch(op, a), epsilon);
}

double singular_distortion_of(const DenseMatrix& sketched_basis) {
  const auto s = padded_singular_values(sketched_basis, sketched_basis.cols());
  double worst = 0.0;
  for (double v : s) worst = std::max(worst, std::abs(1.0 - v * v));
  return worst;
}

double singular_distortion(const DenseMatrix& a, const SketchOperator& op) {
  const SvdFactors f = svd(a);
  require_full_rank(f.singular_values);
  return singular_distortion_of(apply_sketch(op, f.U));
}

double singular_ratio_norm(const DenseMatrix& a, const DenseMatrix& sketched) {
  const auto base = singular_values(a);
  require_full_rank(base);
  const auto s = padded_singular_values(sketched, a.cols());
  double acc = 0.0;
  for (std::size_t k = 0; k < base.size(); ++k) {
    const double r = s[k] / base[k] - 1.0;
    acc += r * r;
  }
  return std::sqrt(acc);
}

double singular_ratio_norm(const DenseMatrix& a, const SketchOperator& op) {
  return singular_ratio_norm(a, apply_sketch(op, a));
}

EmbeddingReport embedding_report(const DenseMatrix& a, const SketchOperator& op, double epsilon, double delta) {
  const DenseMatrix sk = apply_sketch(op, a);
  EmbeddingReport r;
  r.pairwise_success_rate = jl_pairwise_success(a, sk, epsilon);
  r.singular_ratio_norm = singular_ratio_norm(a, sk);
  r.epsilon_hat = singular_distortion(a, op);
  r.epsilon_target = epsilon;
  r.delta_target = delta;
  return r;
}

std::vector<std::size_t> table1_m_grid(std::size_t d, double epsilon) {
  const double base = std::log(static_cast<double>(d)) / (epsilon * epsilon);
  std::vector<std::size_t> grid;
  for (double c : {1.0, 2.0, 4.0, 6.0, 8.0, 16.0}) grid.push_back(static_cast<std::size_t>(std::lround(c * std::round(base))));
  return grid;
}

}  // namespace sketchreg
