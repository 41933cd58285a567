#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "sketchreg/error.hpp"
#include "sketchreg/sketch.hpp"

using namespace sketchreg;

namespace {

SketchOperator build_any(SchemeId s, std::size_t n, std::size_t m, std::uint64_t seed, const DenseMatrix& src) {
  return build_sketch(s, n, m, seed, s == SchemeId::RS4 ? &src : nullptr);
}

/// Appendix-style countsketch with 0-based buckets.
SketchOperator worked_countsketch() {
  return make_countsketch(3, {1, 2, 0, 1, 0, 0, 2, 1, 0}, {-1, -1, 1, -1, 1, -1, 1, -1, 1});
}

}  // namespace

TEST_SUITE("sketch") {
  TEST_CASE("labels round-trip") {
    for (SchemeId s : kAllSchemes) CHECK(parse_scheme(scheme_label(s)) == s);
    CHECK(parse_scheme("SRHT") == SchemeId::RP3);
    CHECK(parse_scheme("rs4") == SchemeId::RS4);
    CHECK_THROWS_AS(parse_scheme("rp9"), Error);
  }

  TEST_CASE("build preconditions") {
    CHECK_THROWS_AS(build_sketch(SchemeId::RS1, 5, 6, 1), Error);
    try {
      build_sketch(SchemeId::RS4, 10, 3, 1);
      FAIL("expected MissingSource");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MissingSource);
    }
  }

  TEST_CASE("a seed selecting rows 9, 5, 1 of nine carries weights sqrt(3)") {
    bool found = false;
    for (std::uint64_t seed = 0; seed < 200000 && !found; ++seed) {
      const auto op = build_sketch(SchemeId::RS1, 9, 3, seed);
      const auto& sr = std::get<SampledRows>(op.representation);
      if (sr.indices == std::vector<std::size_t>{8, 4, 0}) {
        found = true;
        for (double w : sr.weights) CHECK(w == doctest::Approx(std::sqrt(3.0)));
        const DenseMatrix a = testutil::gaussian(9, 2, 1);
        const DenseMatrix s = apply_sketch(op, a);
        for (std::size_t j = 0; j < 2; ++j) CHECK(s(0, j) == doctest::Approx(std::sqrt(3.0) * a(8, j)));
      }
    }
    CHECK(found);
  }

  TEST_CASE("build is deterministic and seed sensitive") {
    const DenseMatrix src = testutil::gaussian(64, 3, 2);
    for (SchemeId s : kAllSchemes) {
      CAPTURE(scheme_label(s));
      const DenseMatrix a1 = apply_sketch(build_any(s, 64, 16, 5, src), src);
      const DenseMatrix a2 = apply_sketch(build_any(s, 64, 16, 5, src), src);
      const DenseMatrix b = apply_sketch(build_any(s, 64, 16, 6, src), src);
      CHECK(a1 == a2);
      CHECK(!(a1 == b));
    }
  }

  TEST_CASE("apply agrees with the materialized operator") {
    const DenseMatrix a = testutil::gaussian(50, 3, 3);
    for (SchemeId s : kAllSchemes) {
      CAPTURE(scheme_label(s));
      const auto op = build_any(s, 50, 12, 9, a);
      const DenseMatrix p = materialize(op);
      CHECK(p.rows() == op.output_rows());
      CHECK(max_abs_diff(apply_sketch(op, a), multiply(p, a)) <= 1e-12 * std::max(1.0, max_abs(a)) * 50);
      const DenseMatrix b = testutil::gaussian(op.output_rows(), 2, 4);
      CHECK(max_abs_diff(apply_sketch_transpose(op, b), multiply(transpose(p), b)) < 1e-10);
    }
  }

  TEST_CASE("apply through a row map reads the mapped rows") {
    const DenseMatrix big = testutil::gaussian(40, 3, 5);
    std::vector<std::size_t> map;
    for (std::size_t i = 0; i < 40; i += 2) map.push_back(i);
    const DenseMatrix sub = select_rows(big, map);
    for (SchemeId s : {SchemeId::RS1, SchemeId::RP1, SchemeId::RP3, SchemeId::CS}) {
      const auto op = build_sketch(s, map.size(), 8, 3);
      CHECK(max_abs_diff(apply_sketch(op, big, map), apply_sketch(op, sub)) < 1e-12);
    }
    CHECK_THROWS_AS(apply_sketch(build_sketch(SchemeId::CS, 10, 3, 1), big), Error);
  }

  TEST_CASE("sampling rows have one non-zero per row, countsketch one per column") {
    const DenseMatrix src = testutil::gaussian(30, 2, 6);
    for (SchemeId s : {SchemeId::RS1, SchemeId::RS2, SchemeId::RS3, SchemeId::RS4}) {
      const DenseMatrix p = materialize(build_any(s, 30, 10, 4, src));
      for (std::size_t i = 0; i < p.rows(); ++i) {
        int nz = 0;
        for (double v : p.row(i)) nz += v != 0.0;
        CHECK(nz == 1);
      }
    }
    const DenseMatrix cs = materialize(build_sketch(SchemeId::CS, 30, 10, 4));
    for (std::size_t j = 0; j < 30; ++j) {
      int nz = 0;
      double sq = 0;
      for (std::size_t i = 0; i < 10; ++i) {
        nz += cs(i, j) != 0.0;
        sq += cs(i, j) * cs(i, j);
      }
      CHECK(nz == 1);
      CHECK(sq == 1.0);
    }
  }

  TEST_CASE("structural properties by scheme") {
    const DenseMatrix src = testutil::gaussian(64, 3, 7);
    struct Expect {
      SchemeId s;
      bool p1, p2;
    };
    // RS2 at m close to n repeats rows with near certainty, which breaks ΠΠ' = (n/m)I.
    for (auto e : {Expect{SchemeId::RS1, true, true}, Expect{SchemeId::RS2, true, false},
                   Expect{SchemeId::RS3, true, false}, Expect{SchemeId::RS4, true, false},
                   Expect{SchemeId::RP1, false, false}, Expect{SchemeId::RP2, false, false},
                   Expect{SchemeId::RP4, false, false}, Expect{SchemeId::CS, false, false}}) {
      CAPTURE(scheme_label(e.s));
      const auto rep = check_pi_properties(build_any(e.s, 64, 40, 11, src));
      CHECK(rep.prop1_holds == e.p1);
      CHECK(rep.prop2_holds == e.p2);
    }
    CHECK(check_pi_properties(build_sketch(SchemeId::RP3, 64, 40, 11)).prop2_holds);
  }

  TEST_CASE("SRHT with m = n on a power of two is orthonormal") {
    const DenseMatrix p = materialize(build_sketch(SchemeId::RP3, 16, 16, 2));
    CHECK(max_abs_diff(gram(p), DenseMatrix::identity(16)) < 1e-10);
  }

  TEST_CASE("sparse projection entries and zero frequency") {
    std::size_t zeros = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto op = build_sketch(SchemeId::RP4, 50, 20, seed);
      const double scale = std::get<DenseProjection>(op.representation).scale;
      const DenseMatrix p = materialize(op);
      for (double v : p.data()) {
        const double u = v / scale;
        CHECK((u == 0.0 || std::abs(std::abs(u) - 1.0) < 1e-12));
        zeros += u == 0.0;
        ++total;
      }
    }
    const double rate = double(zeros) / double(total);
    CHECK(std::abs(rate - 2.0 / 3.0) < 4 * std::sqrt(2.0 / 9.0 / double(total)));
  }

  TEST_CASE("Bernoulli retention count averages m") {
    const std::size_t n = 100, m = 30, reps = 2000;
    double sum = 0;
    for (std::uint64_t seed = 0; seed < reps; ++seed) sum += double(build_sketch(SchemeId::RS3, n, m, seed).output_rows());
    const double se = std::sqrt(n * 0.3 * 0.7 / reps);
    CHECK(std::abs(sum / reps - double(m)) < 3 * se);
  }

  TEST_CASE("uniform sketched Gram is unbiased") {
    const DenseMatrix a = testutil::gaussian(50, 2, 8);
    const DenseMatrix target = gram(a);
    const std::size_t reps = 2000;
    std::vector<double> s1(4, 0.0), s2(4, 0.0);
    for (std::uint64_t seed = 0; seed < reps; ++seed) {
      const DenseMatrix g = gram(apply_sketch(build_sketch(SchemeId::RS1, 50, 10, seed), a));
      for (std::size_t k = 0; k < 4; ++k) {
        s1[k] += g.data()[k];
        s2[k] += g.data()[k] * g.data()[k];
      }
    }
    for (std::size_t k = 0; k < 4; ++k) {
      const double mean = s1[k] / reps;
      const double se = std::sqrt((s2[k] / reps - mean * mean) / reps);
      CHECK(std::abs(mean - target.data()[k]) < 3 * se);
    }
  }

  TEST_CASE("worked countsketch matches the printed matrix") {
    const DenseMatrix expected = DenseMatrix::from_rows({{0, 0, 1, 0, 1, -1, 0, 0, 1},
                                                         {-1, 0, 0, -1, 0, 0, 0, -1, 0},
                                                         {0, -1, 0, 0, 0, 0, 1, 0, 0}});
    CHECK(materialize(worked_countsketch()) == expected);
  }

  TEST_CASE("streaming countsketch equals batch application") {
    const DenseMatrix a = testutil::gaussian(1000, 4, 9);
    const auto op = build_sketch(SchemeId::CS, 1000, 50, 21);
    Rng rng(4);
    const auto order = random_permutation(rng, 1000);
    auto acc = countsketch_stream(50, 4, 21);
    for (std::size_t i : order) cs_update(acc, i, a.row(i));
    CHECK(max_abs_diff(cs_finalize(acc), apply_sketch(op, a)) <= 1e-12);
    try {
      cs_update(acc, order[0], a.row(order[0]));
      FAIL("expected DuplicateRow");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DuplicateRow);
    }
  }

  TEST_CASE("a single streamed row lands in its bucket with its sign") {
    CsAccumulator acc(worked_countsketch(), 2);
    const std::vector<double> row{2.0, -3.0};
    acc.update(0, row);
    const DenseMatrix s = acc.finalize();
    CHECK(s(1, 0) == -2.0);
    CHECK(s(1, 1) == 3.0);
    CHECK(s(0, 0) == 0.0);
    CHECK(s(2, 1) == 0.0);
  }

  TEST_CASE("serialization round-trips every representation") {
    const DenseMatrix a = testutil::gaussian(40, 3, 10);
    std::vector<SketchOperator> ops;
    for (SchemeId s : kAllSchemes) ops.push_back(build_any(s, 40, 9, 33, a));
    ops.push_back(worked_countsketch());
    ops.push_back(make_row_selection(5, {4, 0}, {0.5, 1.0 / 3.0}));
    ops.push_back(make_explicit(testutil::gaussian(3, 40, 2)));
    for (const auto& op : ops) {
      CAPTURE(serialize(op));
      const SketchOperator back = deserialize(serialize(op));
      CHECK(back.scheme == op.scheme);
      CHECK(back.n == op.n);
      CHECK(materialize(back) == materialize(op));
    }
    CHECK_THROWS_AS(deserialize("garbage"), Error);
  }
}
