#pragma once

#include <cstddef>
#include <vector>

#include "sketchreg/random.hpp"

namespace sketchreg {

double norm_cdf(double x);
/// Φ⁻¹(p) for p in (0,1).
double inv_norm_cdf(double p);
/// p-quantile of Student t with `dof` degrees of freedom.
double t_critical(double dof, double p);
/// Upper-tail probability of F(q, dof2) at x.
double f_upper_tail(double x, double q, double dof2);
/// Two-sided normal p-value.
double normal_two_sided_p(double z);

/// Pearson-system member fitted to the first four moments. Type IV (incl. VII) and the
/// normal limit are supported; Type IV is drawn by inverting a tabulated CDF of the
/// angle θ with x = λ + a·tan θ, whose density is ∝ cos^{2(m−1)}θ·exp(−νθ).
class PearsonSampler {
 public:
  enum class Family { Normal, TypeIV };

  PearsonSampler(double mean, double sd, double skewness, double kurtosis);

  double operator()(Rng& rng) const;

  Family family() const noexcept { return family_; }
  double shape_m() const noexcept { return m_; }
  double nu() const noexcept { return nu_; }
  double scale_a() const noexcept { return a_; }
  double location() const noexcept { return lambda_; }

 private:
  Family family_ = Family::Normal;
  double mean_ = 0.0, sd_ = 1.0;
  double m_ = 0.0, nu_ = 0.0, a_ = 1.0, lambda_ = 0.0;
  double theta_lo_ = 0.0, theta_step_ = 0.0;
  std::vector<double> cdf_;           ///< CDF at grid nodes
  std::vector<std::size_t> guide_;    ///< guide_[g] = first node with cdf > g/G
};

}  // namespace sketchreg
