#include "sketchreg/sketch_size.hpp"

#include <cmath>
#include <string>

#include "sketchreg/error.hpp"

namespace sketchreg {

namespace {

void require_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw Error(ErrorKind::DomainError, std::string(name) + " must lie in (0,1)");
}

/// Truncation with a relative guard so that values a few ulps under an integer are kept.
std::size_t round_down(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::DomainError, "size rule produced a non-finite value");
  const double f = std::floor(x * (1.0 + 1e-12));
  return f < 1.0 ? 1 : static_cast<std::size_t>(f);
}

std::size_t round_up(double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::DomainError, "size rule produced a non-finite value");
  const double c = std::ceil(x * (1.0 - 1e-12));
  return c < 1.0 ? 1 : static_cast<std::size_t>(c);
}

}  // namespace

std::string_view to_string(SizeRule r) noexcept {
  switch (r) {
    case SizeRule::Coherence: return "coherence";
    case SizeRule::M1_Moment: return "m1_moments";
    case SizeRule::M1_ThinTail: return "m1_thin_tail";
    case SizeRule::M2: return "m2";
    case SizeRule::M3: return "m3";
  }
  return "?";
}

double s_value(double alpha, double gamma) {
  require_open_unit(alpha, "alpha");
  require_open_unit(gamma, "gamma");
  return inv_norm_cdf(gamma) + inv_norm_cdf(1.0 - alpha);
}

std::size_t uniform_embedding_m(double n, double coherence, double epsilon, double delta, double J, double K) {
  require_open_unit(epsilon, "epsilon");
  require_open_unit(delta, "delta");
  if (!(coherence > 0.0 && coherence <= 1.0)) throw Error(ErrorKind::DomainError, "coherence must lie in (0,1]");
  return round_up(6.0 / (epsilon * epsilon) * n * coherence * std::log(2.0 * J * K / delta));
}

SizeRuleResult m1_rule(double n, double K, TailAssumption tail, double constant) {
  if (!(n > 0.0 && K > 1.0)) throw Error(ErrorKind::DomainError, "m1 rule needs n > 0 and K > 1");
  SizeRuleResult res;
  res.inputs.n = n;
  res.inputs.K = K;
  if (tail.thin_tail) {
    res.rule = SizeRule::M1_ThinTail;
    res.m_exact = constant * K * std::log(n * K);
  } else {
    if (!(tail.r > 2.0)) throw Error(ErrorKind::DomainError, "moment rule needs r > 2");
    res.rule = SizeRule::M1_Moment;
    res.inputs.r = tail.r;
    res.m_exact = constant * std::pow(n * K, 1.0 + 2.0 / tail.r) * std::log(K) / n;
  }
  res.m = round_down(res.m_exact);
  res.feasible = static_cast<double>(res.m) <= n;
  return res;
}

double implied_moments(double n, double K, double m_over_K) {
  const double den = std::log(m_over_K) - std::log(std::log(K));
  if (!(den > 0.0) || !std::isfinite(den)) {
    throw Error(ErrorKind::DomainError, "observations per regressor must exceed log K");
  }
  return 2.0 * std::log(n * K) / den;
}

double tau2(double var_contrast, double effect) {
  if (!(var_contrast > 0.0)) throw Error(ErrorKind::DomainError, "contrast variance must be positive");
  return effect / std::sqrt(var_contrast);
}

SizeRuleResult m2_rule(double m1, double var_contrast, double effect, double alpha, double gamma, double n) {
  if (!(var_contrast > 0.0)) throw Error(ErrorKind::DomainError, "contrast variance must be positive");
  if (effect == 0.0) throw Error(ErrorKind::DomainError, "effect size must be non-zero");
  const double s = s_value(alpha, gamma);
  SizeRuleResult res;
  res.rule = SizeRule::M2;
  res.inputs.n = n;
  res.inputs.alpha = alpha;
  res.inputs.gamma = gamma;
  res.inputs.effect = effect;
  res.inputs.var_estimate = var_contrast;
  res.inputs.tau2 = tau2(var_contrast, effect);
  res.m_exact = s * s * m1 * var_contrast / (effect * effect);
  res.m = round_down(res.m_exact);
  res.feasible = n <= 0.0 || static_cast<double>(res.m) <= n;
  return res;
}

SizeRuleResult m3_rule(double n, double tau2_inf, double alpha, double gamma) {
  if (tau2_inf == 0.0) throw Error(ErrorKind::DomainError, "tau2(inf) must be non-zero");
  const double s = s_value(alpha, gamma);
  SizeRuleResult res;
  res.rule = SizeRule::M3;
  res.inputs.n = n;
  res.inputs.alpha = alpha;
  res.inputs.gamma = gamma;
  res.inputs.tau2 = tau2_inf;
  res.m_exact = n * s * s / (tau2_inf * tau2_inf);
  res.m = round_down(res.m_exact);
  res.feasible = static_cast<double>(res.m) <= n;
  return res;
}

std::size_t countsketch_m(double K, double epsilon, double delta) {
  require_open_unit(epsilon, "epsilon");
  require_open_unit(delta, "delta");
  return round_up(K * (K + 1.0) / (delta * epsilon * epsilon));
}

}  // namespace sketchreg
