#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "sketchreg/distributions.hpp"

namespace sketchreg {

enum class SizeRule { Coherence, M1_Moment, M1_ThinTail, M2, M3 };
std::string_view to_string(SizeRule r) noexcept;

struct SizeInputs {
  double n = 0.0;
  double K = 0.0;
  std::optional<double> r;
  std::optional<double> epsilon;
  std::optional<double> delta;
  std::optional<double> J;
  std::optional<double> alpha;
  std::optional<double> gamma;
  std::optional<double> tau2;
  std::optional<double> effect;
  std::optional<double> var_estimate;
};

struct SizeRuleResult {
  SizeRule rule = SizeRule::M1_Moment;
  std::size_t m = 1;
  double m_exact = 0.0;   ///< the real-valued rule before rounding
  bool feasible = true;   ///< m ≤ n when n is known; never clamped
  SizeInputs inputs;
};

/// Tail assumption for the deterministic rule: r finite moments, or thin tails.
struct TailAssumption {
  bool thin_tail = false;
  double r = 0.0;
  static TailAssumption moments(double r) { return {false, r}; }
  static TailAssumption thin() { return {true, 0.0}; }
};

/// S(α,γ) = Φ⁻¹(γ) + Φ⁻¹(1−α).
double s_value(double alpha, double gamma);

/// ⌈6ε⁻²·n·ℓ_max·log(2JK/δ)⌉.
std::size_t uniform_embedding_m(double n, double coherence, double epsilon, double delta, double J, double K);

/// Moments: c·(nK)^{1+2/r}·log K/n; thin tail: c·K·log(nK). Rounded down, as in the worked
/// numbers this rule is calibrated against.
SizeRuleResult m1_rule(double n, double K, TailAssumption tail, double constant = 1.0);

/// r = 2 log(nK)/(log(m/K) − log log K). DomainError when the denominator is not positive.
double implied_moments(double n, double K, double m_over_K);

/// S²·m1·var_contrast/effect², rounded down. `n` (optional, 0 = unknown) sets feasibility.
SizeRuleResult m2_rule(double m1, double var_contrast, double effect, double alpha, double gamma, double n = 0.0);

/// n·S²/τ₂(∞)², rounded down.
SizeRuleResult m3_rule(double n, double tau2_inf, double alpha, double gamma);

/// τ₂(m1) = effect/√var_contrast.
double tau2(double var_contrast, double effect);

/// ⌈ε⁻²K(K+1)/δ⌉, the data-oblivious countsketch size.
std::size_t countsketch_m(double K, double epsilon, double delta);

}  // namespace sketchreg
