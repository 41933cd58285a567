#pragma once

#include <cstddef>
#include <string_view>

#include "sketchreg/matrix.hpp"
#include "sketchreg/random.hpp"

namespace sketchreg {

/// Regressor generators used by the experiments.
///  NormalX       iid N(0,1)
///  ExponentialX  iid exponential with mean 5
///  PearsonX      iid Pearson draws with mean 0, sd 1, skewness 1, kurtosis 5
///  RareDummy     [1, x1, x2, 1{|x3| > 3}] with x iid N(0,1); `cols` is ignored (always 4)
enum class DgpKind { NormalX, ExponentialX, PearsonX, RareDummy };

std::string_view to_string(DgpKind k) noexcept;
DgpKind parse_dgp(std::string_view text);

inline constexpr double kExponentialMean = 5.0;
inline constexpr double kRareDummyCutoff = 3.0;

/// n×cols design drawn row by row from `rng`.
DenseMatrix draw_design(DgpKind kind, std::size_t n, std::size_t cols, Rng& rng);

/// Column count the generator actually produces for a requested `cols`.
std::size_t design_cols(DgpKind kind, std::size_t cols) noexcept;

}  // namespace sketchreg
