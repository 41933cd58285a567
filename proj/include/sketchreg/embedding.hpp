#pragma once

#include <cstddef>
#include <vector>

#include "sketchreg/matrix.hpp"
#include "sketchreg/sketch.hpp"

namespace sketchreg {

struct EmbeddingReport {
  double pairwise_success_rate = 0.0;
  double epsilon_hat = 0.0;          ///< max_k |1 − σ_k²(ΠU)|
  double singular_ratio_norm = 0.0;  ///< ‖σ(ΠA)/σ(A) − 1‖₂
  double epsilon_target = 0.0;
  double delta_target = 0.0;
};

/// Fraction of distinct column pairs i<j whose squared distance survives within (1±ε).
/// Zero-distance pairs are skipped. `sketched` is ΠA.
double jl_pairwise_success(const DenseMatrix& a, const DenseMatrix& sketched, double epsilon);
double jl_pairwise_success(const DenseMatrix& a, const SketchOperator& op, double epsilon);

/// max_k |1 − σ_k²(ΠU)| with U the left singular vectors of A. Missing singular values
/// (fewer sketched rows than columns) count as zero.
double singular_distortion(const DenseMatrix& a, const SketchOperator& op);
/// Same, from a precomputed ΠU.
double singular_distortion_of(const DenseMatrix& sketched_basis);

/// ‖σ(ΠA)/σ(A) − 1‖₂.
double singular_ratio_norm(const DenseMatrix& a, const DenseMatrix& sketched);
double singular_ratio_norm(const DenseMatrix& a, const SketchOperator& op);

EmbeddingReport embedding_report(const DenseMatrix& a, const SketchOperator& op, double epsilon, double delta);

/// m = C·round(log d/ε²) for C in {1, 2, 4, 6, 8, 16}.
std::vector<std::size_t> table1_m_grid(std::size_t d, double epsilon);

}  // namespace sketchreg
