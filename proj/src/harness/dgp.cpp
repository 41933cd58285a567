#include "sketchreg/harness/dgp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "sketchreg/distributions.hpp"
#include "sketchreg/error.hpp"

namespace sketchreg {

std::string_view to_string(DgpKind k) noexcept {
  switch (k) {
    case DgpKind::NormalX: return "normal";
    case DgpKind::ExponentialX: return "exponential";
    case DgpKind::PearsonX: return "pearson";
    case DgpKind::RareDummy: return "raredummy";
  }
  return "normal";
}

DgpKind parse_dgp(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "normal" || t == "normalx") return DgpKind::NormalX;
  if (t == "exponential" || t == "exponentialx") return DgpKind::ExponentialX;
  if (t == "pearson" || t == "pearsonx") return DgpKind::PearsonX;
  if (t == "raredummy" || t == "rare_dummy") return DgpKind::RareDummy;
  throw Error(ErrorKind::ConfigError, "unknown dgp '" + std::string(text) + "'");
}

std::size_t design_cols(DgpKind kind, std::size_t cols) noexcept { return kind == DgpKind::RareDummy ? 4 : cols; }

DenseMatrix draw_design(DgpKind kind, std::size_t n, std::size_t cols, Rng& rng) {
  const std::size_t d = design_cols(kind, cols);
  if (n == 0 || d == 0) throw Error(ErrorKind::InvalidDims, "design must be non-empty");
  DenseMatrix x(n, d);
  switch (kind) {
    case DgpKind::NormalX:
      for (std::size_t i = 0; i < n; ++i)
        for (double& v : x.row(i)) v = rng.normal();
      break;
    case DgpKind::ExponentialX:
      for (std::size_t i = 0; i < n; ++i)
        for (double& v : x.row(i)) v = kExponentialMean * rng.exponential();
      break;
    case DgpKind::PearsonX: {
      const PearsonSampler draw(0.0, 1.0, 1.0, 5.0);
      for (std::size_t i = 0; i < n; ++i)
        for (double& v : x.row(i)) v = draw(rng);
      break;
    }
    case DgpKind::RareDummy:
      for (std::size_t i = 0; i < n; ++i) {
        auto r = x.row(i);
        r[0] = 1.0;
        r[1] = rng.normal();
        r[2] = rng.normal();
        r[3] = std::abs(rng.normal()) > kRareDummyCutoff ? 1.0 : 0.0;
      }
      break;
  }
  return x;
}

}  // namespace sketchreg
