#pragma once

#include <vector>

#include "oracles.hpp"
#include "sketchreg/matrix.hpp"
#include "sketchreg/random.hpp"

namespace testutil {

inline oracle::Mat to_mat(const sketchreg::DenseMatrix& a) {
  oracle::Mat m(a.rows(), std::vector<double>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m[i][j] = a(i, j);
  return m;
}

inline sketchreg::DenseMatrix gaussian(std::size_t r, std::size_t c, std::uint64_t seed) {
  sketchreg::Rng rng(seed);
  sketchreg::DenseMatrix a(r, c);
  for (auto& v : a.data()) v = rng.normal();
  return a;
}

}  // namespace testutil
