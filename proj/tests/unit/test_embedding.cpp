#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sketchreg/embedding.hpp"
#include "sketchreg/linalg.hpp"

using namespace sketchreg;

namespace {

SketchOperator rotation(std::size_t n, std::uint64_t seed) { return make_explicit(svd(testutil::gaussian(n, n, seed)).U); }

}  // namespace

TEST_SUITE("embedding") {
  TEST_CASE("an exact isometry is a perfect embedding") {
    const DenseMatrix a = testutil::gaussian(12, 4, 1);
    const auto op = rotation(12, 2);
    CHECK(jl_pairwise_success(a, op, 0.01) == 1.0);
    CHECK(singular_distortion(a, op) < 1e-12);
    CHECK(singular_ratio_norm(a, op) < 1e-12);
    const auto rep = embedding_report(a, op, 0.1, 0.1);
    CHECK(rep.pairwise_success_rate == 1.0);
    CHECK(rep.epsilon_target == 0.1);
  }

  TEST_CASE("pairwise success counts distinct pairs and skips zero distances") {
    // Columns 0 and 1 coincide; the sketch halves every squared distance.
    const DenseMatrix a = DenseMatrix::from_rows({{1, 1, 0}, {0, 0, 1}});
    const DenseMatrix half = scale(a, std::sqrt(0.5));
    CHECK(jl_pairwise_success(a, half, 0.1) == 0.0);
    CHECK(jl_pairwise_success(a, a, 0.1) == 1.0);
    // Dropping one basis vector keeps one of the three pairs.
    const DenseMatrix e = DenseMatrix::identity(3);
    DenseMatrix dropped = e;
    dropped(2, 2) = 0.0;
    CHECK(jl_pairwise_success(e, dropped, 0.1) == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("rank collapse gives distortion one") {
    const DenseMatrix a = DenseMatrix::from_rows({{1, 0}, {0, 1}, {-0.25, 0.5}, {0.25, -0.5}, {0, 0}});
    const auto pi2 = make_explicit(DenseMatrix::from_rows({{1, 0, 0, 0, 0}, {0, 0, 0, 0, 1}}));
    CHECK(singular_distortion(a, pi2) == doctest::Approx(1.0));
  }

  TEST_CASE("distortion equals the spectral deviation of the sketched basis Gram") {
    const DenseMatrix a = testutil::gaussian(200, 4, 3);
    const DenseMatrix u = svd(a).U;
    for (SchemeId s : {SchemeId::RS1, SchemeId::RP2, SchemeId::CS}) {
      const auto op = build_sketch(s, 200, 40, 7);
      const DenseMatrix pu = apply_sketch(op, u);
      const double eps_hat = singular_distortion_of(pu);
      CHECK(eps_hat == doctest::Approx(singular_distortion(a, op)).epsilon(1e-10));
      const auto ev = oracle::sym_eigenvalues(testutil::to_mat(subtract(gram(pu), DenseMatrix::identity(4))));
      double dev = 0;
      for (double e : ev) dev = std::max(dev, std::abs(e));
      CHECK(std::abs(eps_hat - dev) < 1e-10);
      Rng rng(s == SchemeId::CS ? 1 : 2);
      const DenseMatrix pa = apply_sketch(op, a);
      for (int t = 0; t < 100; ++t) {
        std::vector<double> x(4);
        for (double& v : x) v = rng.normal();
        const double full = std::pow(norm2(multiply(a, x)), 2);
        const double sk = std::pow(norm2(multiply(pa, x)), 2);
        CHECK(std::abs(sk - full) <= (eps_hat + 1e-10) * full);
      }
    }
  }

  TEST_CASE("singular ratio norm against the eigen oracle") {
    const DenseMatrix a = testutil::gaussian(100, 3, 4);
    const auto op = build_sketch(SchemeId::RS1, 100, 30, 5);
    const DenseMatrix pa = apply_sketch(op, a);
    const auto s = oracle::singular_values(testutil::to_mat(a));
    const auto t = oracle::singular_values(testutil::to_mat(pa));
    double ss = 0;
    for (std::size_t k = 0; k < 3; ++k) ss += std::pow(t[k] / s[k] - 1, 2);
    CHECK(singular_ratio_norm(a, pa) == doctest::Approx(std::sqrt(ss)).epsilon(1e-9));
    CHECK(singular_ratio_norm(a, op) == doctest::Approx(std::sqrt(ss)).epsilon(1e-9));
  }

  TEST_CASE("uniform sampling of 1000 rows embeds a normal design") {
    // An independent simulation of this design puts P(ε̂ < 0.15) at 0.887.
    Rng rng(6);
    DenseMatrix a(20000, 5);
    for (auto& v : a.data()) v = rng.normal();
    const DenseMatrix u = svd(a).U;
    int good = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
      good += singular_distortion_of(apply_sketch(build_sketch(SchemeId::RS1, 20000, 1000, seed), u)) < 0.15;
    CHECK(std::abs(good / 200.0 - 0.887) < 4 * std::sqrt(0.887 * 0.113 / 200));
    int loose = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed)
      loose += singular_distortion_of(apply_sketch(build_sketch(SchemeId::RS1, 20000, 1000, seed), u)) < 0.2;
    CHECK(loose >= 190);
  }

  TEST_CASE("the Table 1 m grid") {
    CHECK(table1_m_grid(5, 0.1) == std::vector<std::size_t>{161, 322, 644, 966, 1288, 2576});
  }
}
