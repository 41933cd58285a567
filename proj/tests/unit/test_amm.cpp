#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "sketchreg/amm.hpp"
#include "sketchreg/error.hpp"
#include "sketchreg/linalg.hpp"

using namespace sketchreg;

namespace {

DenseMatrix rank_example() {
  return DenseMatrix::from_rows({{1, 0}, {0, 1}, {-0.25, 0.5}, {0.25, -0.5}, {0, 0}});
}

/// Σ_k ‖A_k‖²‖B_k‖²/p_k, the part of the AMM variance that depends on p.
double variance_objective(const DenseMatrix& a, const DenseMatrix& b, const std::vector<double>& p) {
  double s = 0;
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double na = norm2(a.row(k)), nb = norm2(b.row(k));
    if (na * nb > 0) s += na * na * nb * nb / p[k];
  }
  return s;
}

/// Rows with unequal norms so that the optimal and uniform distributions differ.
DenseMatrix heterogeneous(std::size_t n, std::size_t d, std::uint64_t seed) {
  DenseMatrix a = testutil::gaussian(n, d, seed);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) a(i, j) *= i % 10 == 0 ? 10.0 : 1.0;
  return a;
}

}  // namespace

TEST_SUITE("amm") {
  TEST_CASE("distribution validation") {
    CHECK_THROWS_AS(make_distribution({0.5, 0.6}), Error);
    CHECK_THROWS_AS(make_distribution({1.5, -0.5}), Error);
    CHECK(uniform_distribution(4).probabilities[2] == 0.25);
  }

  TEST_CASE("optimal probabilities on the pen-and-pencil matrix") {
    const DenseMatrix a = rank_example();
    const auto p = optimal_probabilities(a, a).probabilities;
    const double total = 1 + 1 + 0.3125 + 0.3125;
    CHECK(p[0] == doctest::Approx(1 / total));
    CHECK(p[2] == doctest::Approx(0.3125 / total));
    CHECK(p[4] == 0.0);
    const auto u = optimal_probabilities(DenseMatrix::identity(5), DenseMatrix::identity(5)).probabilities;
    for (double v : u) CHECK(v == doctest::Approx(0.2));
    CHECK_THROWS_AS(optimal_probabilities(DenseMatrix(3, 2), DenseMatrix(3, 2)), Error);
  }

  TEST_CASE("optimal probabilities beat random distributions on the simplex") {
    const DenseMatrix a = testutil::gaussian(50, 3, 1), b = testutil::gaussian(50, 3, 2);
    const double best = variance_objective(a, b, optimal_probabilities(a, b).probabilities);
    Rng rng(5);
    for (int t = 0; t < 10000; ++t) {
      std::vector<double> p(50);
      for (double& v : p) v = rng.exponential();
      const double s = std::accumulate(p.begin(), p.end(), 0.0);
      for (double& v : p) v /= s;
      REQUIRE(variance_objective(a, b, p) >= best * (1 - 1e-12));
    }
  }

  TEST_CASE("exhaustive permutation and constant summands are exact") {
    const DenseMatrix a = testutil::gaussian(20, 3, 3), b = testutil::gaussian(20, 2, 4);
    Rng rng(1);
    const auto perm = random_permutation(rng, 20);
    CHECK(max_abs_diff(amm_at(a, b, uniform_distribution(20), perm), multiply_tn(a, b)) < 1e-12);
    const DenseMatrix ones(30, 1, std::vector<double>(30, 1.0));
    for (std::uint64_t seed = 0; seed < 5; ++seed)
      CHECK(amm(ones, ones, 7, uniform_distribution(30), seed)(0, 0) == doctest::Approx(30.0).epsilon(1e-14));
  }

  TEST_CASE("estimator is unbiased") {
    const DenseMatrix a = testutil::gaussian(100, 3, 5), b = testutil::gaussian(100, 3, 6);
    const DenseMatrix target = multiply_tn(a, b);
    const auto p = optimal_probabilities(a, b);
    const std::size_t reps = 2000;
    std::vector<double> s1(9, 0.0), s2(9, 0.0);
    for (std::uint64_t seed = 0; seed < reps; ++seed) {
      const DenseMatrix c = amm(a, b, 10, p, seed);
      for (std::size_t k = 0; k < 9; ++k) {
        s1[k] += c.data()[k];
        s2[k] += c.data()[k] * c.data()[k];
      }
    }
    for (std::size_t k = 0; k < 9; ++k) {
      const double mean = s1[k] / reps;
      const double se = std::sqrt((s2[k] / reps - mean * mean) / reps);
      CHECK(std::abs(mean - target.data()[k]) < 4 * se);
    }
  }

  TEST_CASE("variance bound, exact variance and the empirical error") {
    const DenseMatrix a = heterogeneous(200, 3, 7), b = heterogeneous(200, 2, 8);
    const std::size_t m = 20, reps = 3000;
    const DenseMatrix c = multiply_tn(a, b);
    const auto opt = optimal_probabilities(a, b);
    const auto uni = uniform_distribution(200);
    auto mse = [&](const SamplingDistribution& p, std::uint64_t salt) {
      std::vector<double> e(reps);
      for (std::size_t r = 0; r < reps; ++r) {
        const double f = frobenius_norm(subtract(amm(a, b, m, p, salt + r), c));
        e[r] = f * f;
      }
      const double mean = std::accumulate(e.begin(), e.end(), 0.0) / reps;
      double ss = 0;
      for (double v : e) ss += (v - mean) * (v - mean);
      return std::pair{mean, std::sqrt(ss / (reps - 1) / reps)};
    };
    const auto [mo, so] = mse(opt, 0);
    const auto [mu, su] = mse(uni, 100000);
    const double exact = amm_exact_variance(a, b, m, opt);
    CHECK(std::abs(mo - exact) < 4 * so);
    CHECK(exact <= amm_variance_bound(a, b, m));
    CHECK(mo + 3 * std::hypot(so, su) < mu);
  }

  TEST_CASE("Markov coverage") {
    const DenseMatrix a = testutil::gaussian(100, 3, 9), b = testutil::gaussian(100, 3, 10);
    const std::size_t m = 40, reps = 2000;
    const double eps = std::sqrt(2.0 / m);
    const DenseMatrix c = multiply_tn(a, b);
    const double thresh = eps * eps * std::pow(frobenius_norm(a) * frobenius_norm(b), 2);
    const auto p = optimal_probabilities(a, b);
    std::size_t exceed = 0;
    for (std::size_t r = 0; r < reps; ++r) exceed += std::pow(frobenius_norm(subtract(amm(a, b, m, p, r), c)), 2) > thresh;
    const double bound = amm_markov_probability(m, eps);
    CHECK(bound == doctest::Approx(0.5));
    CHECK(double(exceed) / reps <= bound + 3 * std::sqrt(bound * (1 - bound) / reps));
  }

  TEST_CASE("variance bound arithmetic and the m rule") {
    DenseMatrix unit(2, 2);
    unit(0, 0) = 1;
    CHECK(amm_variance_bound(unit, unit, 10) == doctest::Approx(0.1));
    const DenseMatrix a = rank_example();
    const double fro2 = 1 + 1 + 0.3125 + 0.3125;
    CHECK(amm_variance_bound(a, a, 2) == doctest::Approx(fro2 * fro2 / 2));
    CHECK(amm_required_m(0.1, 0.1) == 1000);
    CHECK(amm_required_m(0.05, 0.01) == 40000);
    CHECK(amm_required_m(0.999999, 0.999999) == 2);
    CHECK(amm_required_m(1.0, 1.0) == 1);
  }
}
