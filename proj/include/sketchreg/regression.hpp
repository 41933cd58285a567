#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sketchreg/matrix.hpp"
#include "sketchreg/sketch.hpp"

namespace sketchreg {

enum class VarianceMode { Homoskedastic, Sandwich };
std::string_view to_string(VarianceMode m) noexcept;
VarianceMode parse_variance_mode(std::string_view text);

struct RegressionFit {
  std::vector<double> beta;
  DenseMatrix covariance;
  std::vector<double> std_errors;
  double ssr = 0.0;
  std::size_t n_source = 0;
  std::size_t m_used = 0;
  VarianceMode variance_mode = VarianceMode::Homoskedastic;
  /// Error variance on the original scale: SSR/(m−K)·(m/n). For sketched data the
  /// residuals carry the √(n/m) inflation, which this undoes.
  double sigma2_hat = 0.0;
};

/// Non-zero K-vector c selecting a linear combination c'β.
struct ContrastVector {
  std::vector<double> c;
  explicit ContrastVector(std::vector<double> values);
  static ContrastVector unit(std::size_t K, std::size_t k);
  double apply(std::span<const double> beta) const;
  double quadratic(const DenseMatrix& m) const;
};

struct FTestResult {
  double statistic = 0.0;  ///< Wald form divided by q, so it is F(q, dof2) under the null
  std::size_t q = 0;
  std::size_t dof2 = 0;
  double noncentrality = 0.0;
  double expected_f = 0.0;
  double p_value = 1.0;
};

/// Full-sample OLS via the SVD pseudoinverse. Throws RankDeficient naming the collapsed σ_k.
RegressionFit ols(std::span<const double> y, const DenseMatrix& x, VarianceMode mode = VarianceMode::Homoskedastic);

/// OLS on already sketched data (ỹ, X̃) that came from n_source rows. Throws SingularSketch
/// when X̃ has numeric rank below K.
RegressionFit fit_sketched(std::span<const double> y_sketch, const DenseMatrix& x_sketch, std::size_t n_source,
                           VarianceMode mode = VarianceMode::Homoskedastic);

/// Sketch (y, X) with `op` and fit.
RegressionFit sketched_ols(std::span<const double> y, const DenseMatrix& x, const SketchOperator& op,
                           VarianceMode mode = VarianceMode::Homoskedastic);

struct Lemma3Report {
  double ssr_ratio = 0.0;
  double beta_dist = 0.0;
  double bound = 0.0;         ///< ε̂·SSR̂/σ_min(X)
  double epsilon_used = 0.0;  ///< distortion of Π on col([X y])
  bool ssr_holds = false;     ///< SSR̃ ≤ (1+ε̂)·SSR̂
  bool beta_holds = false;    ///< ‖β̃−β̂‖ ≤ bound
};

/// Checks both parts of the SSR/coefficient lemma for one realized sketch. ε̂ is measured on
/// the augmented matrix [X y], whose column space contains every residual vector.
Lemma3Report lemma3_check(const RegressionFit& fit_full, const RegressionFit& fit_sketch, const DenseMatrix& x,
                          std::span<const double> y, const SketchOperator& op);

struct GramDistortion {
  double relative_error = 0.0;
  double bound = 0.0;  ///< ε̂/(1−ε̂); infinite when ε̂ ≥ 1
  double epsilon_used = 0.0;
  bool holds = false;
};

/// |c'[(X'X)⁻¹ − (X̃'X̃)⁻¹]c| / c'(X'X)⁻¹c against ε̂/(1−ε̂) with ε̂ = distortion of Π on col(X).
GramDistortion inverse_gram_distortion(const DenseMatrix& x, const SketchOperator& op, const ContrastVector& c);

struct RatioBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// ((n/m)/(1+ε), (n/m)/(1−ε)).
RatioBounds mse_ratio_bounds(double n, double m, double epsilon);
/// (n/m)·ε/(1−ε) + (n−m)/m, the bound on the absolute relative deviation used in the argument
/// for the prediction-error theorem. Exposed next to the stated bound for comparison.
double prediction_deviation_bound(double n, double m, double epsilon);
/// (max Ω/min Ω)·(n/m)·(1+ε)/(1−ε)².
double hetero_mse_bound(std::span<const double> omega_diag, double n, double m, double epsilon);

/// A(Ω,m,n) = Ω + (tr(Ω)·I − Ω)/m for diagonal Ω, returned as its diagonal plus the
/// scalar tr(Ω)/m that every diagonal entry carries.
struct CenteringMatrix {
  std::vector<double> diagonal;
  double trace_term = 0.0;
};
CenteringMatrix countsketch_centering(std::span<const double> omega_diag, std::size_t m, std::size_t n);
/// ‖(m/n)·A − Ω‖₂.
double centering_deviation_norm(std::span<const double> omega_diag, std::size_t m, std::size_t n);

/// Exact V(β̃|Π) = (X̃'X̃)⁻¹ X̃'ΠΩΠ'X̃ (X̃'X̃)⁻¹ for known diagonal error variances Ω.
DenseMatrix conditional_variance(const DenseMatrix& x, const SketchOperator& op, std::span<const double> omega_diag);
/// Exact V(β̂) = (X'X)⁻¹X'ΩX(X'X)⁻¹.
DenseMatrix full_sample_variance(const DenseMatrix& x, std::span<const double> omega_diag);

/// Wald F for H0: Rβ = r using the fit's covariance; expected_f uses φ from `beta_true`
/// when given, else φ = 0.
FTestResult f_test(const RegressionFit& fit, const DenseMatrix& R, std::span<const double> r,
                   std::span<const double> beta_true = {});
/// φ = (Rβ₀ − r)'[R V R']⁻¹(Rβ₀ − r), the convention without the factor one half.
double noncentrality(const DenseMatrix& R, std::span<const double> r, std::span<const double> beta0,
                     const DenseMatrix& covariance);
/// ν₂(q+φ)/(q(ν₂−2)).
double expected_f(std::size_t q, std::size_t dof2, double phi);

/// Flat CSV: a comment header with metadata, then coef_name,estimate,std_error rows.
std::string serialize_fit(const RegressionFit& fit, const std::vector<std::string>& names, std::string_view scheme,
                          std::uint64_t seed);

}  // namespace sketchreg
