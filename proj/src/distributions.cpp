#include "sketchreg/distributions.hpp"

#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>

#include "sketchreg/error.hpp"

namespace sketchreg {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inv_norm_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::DomainError, "normal quantile needs p in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double t_critical(double dof, double p) {
  if (!(p > 0.0 && p < 1.0) || !(dof > 0.0)) throw Error(ErrorKind::DomainError, "t quantile needs p in (0,1), dof > 0");
  return boost::math::quantile(boost::math::students_t_distribution<double>(dof), p);
}

double f_upper_tail(double x, double q, double dof2) {
  if (!(x >= 0.0)) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f_distribution<double>(q, dof2), x));
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::numbers::sqrt2); }

namespace {

constexpr std::size_t kGridIntervals = 1 << 16;
constexpr std::size_t kGuideSize = 1 << 14;

}  // namespace

PearsonSampler::PearsonSampler(double mean, double sd, double skewness, double kurtosis) : mean_(mean), sd_(sd) {
  if (!(sd > 0.0)) throw Error(ErrorKind::DomainError, "Pearson sd must be positive");
  const double b1 = skewness * skewness;
  const double b2 = kurtosis;
  if (b2 <= b1 + 1.0) throw Error(ErrorKind::DomainError, "kurtosis must exceed skewness^2 + 1");
  if (b1 == 0.0 && b2 == 3.0) {
    family_ = Family::Normal;
    return;
  }
  // Standardized Pearson coefficients: p'/p = −(x + c1)/(c0 + c1·x + c2·x²).
  const double den = 10.0 * b2 - 12.0 * b1 - 18.0;
  if (!(den > 0.0)) throw Error(ErrorKind::DomainError, "moment combination outside the supported Pearson types");
  const double c0 = (4.0 * b2 - 3.0 * b1) / den;
  const double c1 = skewness * (b2 + 3.0) / den;
  const double c2 = (2.0 * b2 - 3.0 * b1 - 6.0) / den;
  const double disc = c1 * c1 - 4.0 * c0 * c2;
  if (!(c2 > 0.0) || !(disc < 0.0)) {
    throw Error(ErrorKind::DomainError, "only Pearson types IV and VII (and the normal) are implemented");
  }
  family_ = Family::TypeIV;
  m_ = 1.0 / (2.0 * c2);
  lambda_ = -c1 / (2.0 * c2);
  a_ = std::sqrt(c0 / c2 - lambda_ * lambda_);
  // Integrating the ODE with t = (x − λ)/a gives log p = −m·log(1+t²) − ν·atan(t).
  nu_ = (lambda_ + c1) / (c2 * a_);

  const double half_pi = std::numbers::pi / 2.0;
  theta_lo_ = -half_pi;
  theta_step_ = std::numbers::pi / static_cast<double>(kGridIntervals);
  const double power = 2.0 * (m_ - 1.0);
  std::vector<double> logd(kGridIntervals + 1);
  double peak = -INFINITY;
  for (std::size_t i = 1; i < kGridIntervals; ++i) {
    const double th = theta_lo_ + static_cast<double>(i) * theta_step_;
    logd[i] = power * std::log(std::cos(th)) - nu_ * th;
    peak = std::max(peak, logd[i]);
  }
  std::vector<double> dens(kGridIntervals + 1, 0.0);
  for (std::size_t i = 1; i < kGridIntervals; ++i) dens[i] = std::exp(logd[i] - peak);
  cdf_.assign(kGridIntervals + 1, 0.0);
  for (std::size_t i = 1; i <= kGridIntervals; ++i) cdf_[i] = cdf_[i - 1] + 0.5 * (dens[i - 1] + dens[i]);
  const double total = cdf_.back();
  for (double& c : cdf_) c /= total;
  cdf_.back() = 1.0;
  guide_.resize(kGuideSize + 1);
  std::size_t node = 0;
  for (std::size_t g = 0; g <= kGuideSize; ++g) {
    const double target = static_cast<double>(g) / static_cast<double>(kGuideSize);
    while (node < kGridIntervals && cdf_[node + 1] <= target) ++node;
    guide_[g] = node;
  }
}

double PearsonSampler::operator()(Rng& rng) const {
  if (family_ == Family::Normal) return mean_ + sd_ * rng.normal();
  double u = rng.uniform();
  if (u <= 0.0) u = 0x1.0p-54;
  std::size_t i = guide_[static_cast<std::size_t>(u * static_cast<double>(kGuideSize))];
  while (i + 1 < kGridIntervals && cdf_[i + 1] < u) ++i;
  const double lo = cdf_[i], hi = cdf_[i + 1];
  const double frac = hi > lo ? (u - lo) / (hi - lo) : 0.5;
  const double theta = theta_lo_ + (static_cast<double>(i) + frac) * theta_step_;
  const double x = lambda_ + a_ * std::tan(theta);
  return mean_ + sd_ * x;
}

}  // namespace sketchreg
