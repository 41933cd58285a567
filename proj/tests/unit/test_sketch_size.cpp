#include <doctest.h>

#include <cmath>

#include "sketchreg/error.hpp"
#include "sketchreg/sketch_size.hpp"

using namespace sketchreg;

TEST_SUITE("sketch_size") {
  TEST_CASE("S(alpha, gamma) reproduces the printed table") {
    const double gammas[5] = {0.5, 0.6, 0.7, 0.8, 0.9};
    const double alphas[3] = {0.01, 0.05, 0.10};
    const double table[3][5] = {{2.326, 2.580, 2.851, 3.168, 3.608},
                                {1.645, 1.898, 2.169, 2.486, 2.926},
                                {1.282, 1.535, 1.806, 2.123, 2.563}};
    for (int a = 0; a < 3; ++a)
      for (int g = 0; g < 5; ++g) {
        CAPTURE(alphas[a]);
        CAPTURE(gammas[g]);
        CHECK(std::abs(s_value(alphas[a], gammas[g]) - table[a][g]) <= 0.001);
      }
  }

  TEST_CASE("S is monotone in both arguments") {
    for (double g = 0.5; g < 0.95; g += 0.05) CHECK(s_value(0.05, g + 0.05) > s_value(0.05, g));
    for (double a = 0.01; a < 0.2; a += 0.01) CHECK(s_value(a + 0.01, 0.8) < s_value(a, 0.8));
    CHECK_THROWS_AS(s_value(0.0, 0.5), Error);
  }

  TEST_CASE("coherence rule") {
    CHECK(uniform_embedding_m(1e6, 10.0 / 1e6, 0.5, 0.1, 1, 10) == 1272);
    const auto base = uniform_embedding_m(1e4, 0.01, 0.5, 0.1, 1, 10);
    const auto doubled = uniform_embedding_m(1e4, 0.01, 0.5, 0.1, 2, 10);
    CHECK(std::abs(double(doubled) - double(base) - 24.0 * 1e4 * 0.01 * std::log(2.0)) <= 1.0);
    CHECK(uniform_embedding_m(100, 1.0, 0.5, 0.1, 1, 10) >= 24.0 * 100 * std::log(200.0));
  }

  TEST_CASE("moment and thin-tail anchors") {
    CHECK(m1_rule(1e7, 10, TailAssumption::moments(6)).m == 10687);
    CHECK(m1_rule(562170, 423, TailAssumption::thin()).m == 8158);
    CHECK(m1_rule(562170, 423, TailAssumption::moments(8)).m == 317657);
    CHECK(m1_rule(562170, 423, TailAssumption::moments(15)).m == 33476);
    const auto big = m1_rule(562170, 423, TailAssumption::moments(4));
    CHECK_FALSE(big.feasible);
    CHECK(big.rule == SizeRule::M1_Moment);
    CHECK_THROWS_AS(m1_rule(1e7, 10, TailAssumption::moments(2)), Error);
  }

  TEST_CASE("moment rule decreases in r and thin tails need fewer rows") {
    std::size_t prev = SIZE_MAX;
    const auto thin = m1_rule(1e7, 10, TailAssumption::thin()).m;
    for (double r = 3; r <= 30; r += 1) {
      const auto m = m1_rule(1e7, 10, TailAssumption::moments(r)).m;
      CHECK(m < prev);
      prev = m;
    }
    for (double r = 3; r <= 10; r += 1) CHECK(thin <= m1_rule(1e7, 10, TailAssumption::moments(r)).m);
  }

  TEST_CASE("implied moments") {
    CHECK(std::lround(implied_moments(1e7, 10, 100)) == 10);
    for (double r : {6.0, 8.0, 12.0}) {
      const double m = m1_rule(1e7, 10, TailAssumption::moments(r)).m_exact;
      CHECK(std::abs(implied_moments(1e7, 10, m / 10) - r) < 0.1);
    }
    CHECK_THROWS_AS(implied_moments(1e7, 10, std::log(10.0)), Error);
    CHECK_THROWS_AS(implied_moments(1e7, 10, 1.0), Error);
  }

  TEST_CASE("inference-conscious m2") {
    const double s = s_value(0.05, 0.8);
    const auto ideal = m2_rule(1000, 0.25 / 1000, 0.025, 0.05, 0.8);
    CHECK(ideal.m == static_cast<std::size_t>(std::floor(s * s * 0.25 / 0.000625)));
    CHECK(ideal.m == 2473);
    // Fixed point: τ₂(m1) = S returns m1.
    const double var = std::pow(0.02 / s, 2);
    CHECK(m2_rule(5000, var, 0.02, 0.05, 0.8).m_exact == doctest::Approx(5000.0));
    CHECK(tau2(var, 0.02) == doctest::Approx(s));
    // Scale equivariance in the effect size.
    const auto a = m2_rule(1000, 2e-4, 0.01, 0.05, 0.5), b = m2_rule(1000, 2e-4, 0.03, 0.05, 0.5);
    CHECK(a.m_exact / b.m_exact == doctest::Approx(9.0).epsilon(1e-14));
    const auto g9 = m2_rule(1000, 2e-4, 0.025, 0.05, 0.9), g5 = m2_rule(1000, 2e-4, 0.025, 0.05, 0.5);
    CHECK(g9.m_exact / g5.m_exact == doctest::Approx(std::pow(s_value(0.05, 0.9) / s_value(0.05, 0.5), 2)));
    CHECK_FALSE(m2_rule(1000, 1.0, 0.001, 0.05, 0.9, 1e6).feasible);
    CHECK_THROWS_AS(m2_rule(1000, 1e-4, 0.0, 0.05, 0.5), Error);
  }

  TEST_CASE("data-oblivious m3") {
    CHECK(m3_rule(1e7, 5, 0.05, 0.5).m_exact == doctest::Approx(1e7 * std::pow(s_value(0.05, 0.5) / 5, 2)));
    const auto eponymy = m3_rule(562170, 5, 0.05, 0.8);
    CHECK(eponymy.m >= 138900);
    CHECK(eponymy.m <= 139200);
    const double s = s_value(0.05, 0.8);
    CHECK(m3_rule(1e5, s, 0.05, 0.8).m_exact == doctest::Approx(1e5));
    CHECK(eponymy.m_exact * 25 == doctest::Approx(562170 * s * s));
  }

  TEST_CASE("countsketch size helper") {
    CHECK(countsketch_m(10, 0.5, 0.1) == 4400);
  }
}
