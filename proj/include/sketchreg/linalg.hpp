#pragma once

#include <cstddef>
#include <vector>

#include "sketchreg/matrix.hpp"

namespace sketchreg {

/// Thin SVD A = U diag(s) V' with U n×k, V k×k, k = cols(A).
struct SvdFactors {
  DenseMatrix U;
  std::vector<double> singular_values;  ///< nonincreasing
  DenseMatrix V;
};

struct LeverageProfile {
  std::vector<double> scores;
  double coherence = 0.0;
  std::vector<double> probabilities;
};

inline constexpr double kDefaultRankTol = 1e-10;

/// Householder QR followed by one-sided Jacobi on the triangular factor.
/// Requires rows >= cols. Throws NonConvergence if the sweep cap is hit.
SvdFactors svd(const DenseMatrix& a);
/// Singular values only; accepts either orientation.
std::vector<double> singular_values(const DenseMatrix& a);

double frobenius_norm(const DenseMatrix& a);
double spectral_norm(const DenseMatrix& a);

/// Diagonal of the hat matrix from the exact thin SVD. Throws RankDeficient when
/// σ_min < 1e-10·σ_max.
LeverageProfile leverage_scores(const DenseMatrix& a);

/// Number of singular values at or above rel_tol·σ_1; zero for the zero matrix.
std::size_t numeric_rank(const DenseMatrix& a, double rel_tol = kDefaultRankTol);

/// Inverse of a symmetric positive definite matrix via its SVD. Throws RankDeficient
/// when the condition number exceeds 1/rel_tol.
DenseMatrix spd_inverse(const DenseMatrix& s, double rel_tol = kDefaultRankTol);

}  // namespace sketchreg
