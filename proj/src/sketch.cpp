#include "sketchreg/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <sstream>
#include <utility>

#include "sketchreg/error.hpp"
#include "sketchreg/linalg.hpp"
#include "sketchreg/random.hpp"

namespace sketchreg {

namespace {

// Stream tags folded into the operator seed; one per independent source of randomness.
enum StreamTag : std::uint64_t {
  kTagSelect = 1,
  kTagBucket = 2,
  kTagSign = 3,
  kTagBernoulli = 4,
  kTagProjectionRow = 5,
  kTagHadamardSign = 6,
  kTagHadamardRows = 7,
};

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Unnormalized projection entries of row i, written to out[k·stride] for k < n.
void projection_row(const SketchOperator& op, const DenseProjection& dp, std::size_t i, double* out,
                    std::size_t stride, std::vector<double>& scratch) {
  Rng rng(derive_seed(op.seed, {kTagProjectionRow, i}));
  const std::size_t n = op.n;
  switch (dp.kind) {
    case ProjectionKind::Gaussian:
      scratch.resize(n);
      rng.fill_normal(scratch);
      for (std::size_t k = 0; k < n; ++k) out[k * stride] = scratch[k];
      break;
    case ProjectionKind::Rademacher:
      for (std::size_t j = 0; j < n; j += 64) {
        std::uint64_t bits = rng();
        const std::size_t end = std::min(n, j + 64);
        for (std::size_t t = j; t < end; ++t, bits >>= 1) out[t * stride] = (bits & 1U) ? 1.0 : -1.0;
      }
      break;
    case ProjectionKind::Sparse: {
      // Each 32-bit half is one uniform draw u; u < T/2 → +1, T/2 ≤ u < T → −1, else 0,
      // with T = 2^32/s.
      const double s = static_cast<double>(dp.sparsity);
      const auto threshold = static_cast<std::uint64_t>(std::ldexp(1.0, 32) / s);
      const std::uint64_t half = threshold / 2;
      for (std::size_t j = 0; j < n; j += 2) {
        const std::uint64_t bits = rng();
        const std::size_t end = std::min(n, j + 2);
        for (std::size_t t = j; t < end; ++t) {
          const std::uint64_t u = (t == j) ? (bits & 0xFFFFFFFFULL) : (bits >> 32);
          out[t * stride] = u < half ? 1.0 : (u < 2 * half ? -1.0 : 0.0);
        }
      }
      break;
    }
  }
}

constexpr std::size_t kProjectionBlock = 8;

/// acc[j][r] += Σ_k block[k][r]·rows[k][j] for kProjectionBlock interleaved projection rows.
/// Narrow designs keep the accumulators in registers.
template <std::size_t D>
[[gnu::always_inline]] inline void projection_kernel_body(const double* __restrict block, const double* __restrict rows,
                                                          std::size_t n, double* __restrict acc) noexcept {
  double local[D][kProjectionBlock] = {};
  for (std::size_t k = 0; k < n; ++k) {
    const double* p = block + k * kProjectionBlock;
    const double* a = rows + k * D;
    for (std::size_t j = 0; j < D; ++j)
      for (std::size_t r = 0; r < kProjectionBlock; ++r) local[j][r] += p[r] * a[j];
  }
  for (std::size_t j = 0; j < D; ++j)
    for (std::size_t r = 0; r < kProjectionBlock; ++r) acc[j * kProjectionBlock + r] += local[j][r];
}

template <std::size_t D>
__attribute__((target("avx2,fma"))) void projection_kernel_avx2(
    const double* __restrict block, const double* __restrict rows, std::size_t n, double* __restrict acc) noexcept {
  projection_kernel_body<D>(block, rows, n, acc);
}

template <std::size_t D>
void projection_kernel_base(const double* __restrict block, const double* __restrict rows, std::size_t n,
                            double* __restrict acc) noexcept {
  projection_kernel_body<D>(block, rows, n, acc);
}

void projection_kernel_generic(const double* __restrict block, const double* __restrict rows, std::size_t n,
                               std::size_t d, double* __restrict acc) noexcept {
  for (std::size_t k = 0; k < n; ++k) {
    const double* p = block + k * kProjectionBlock;
    const double* a = rows + k * d;
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t r = 0; r < kProjectionBlock; ++r) acc[j * kProjectionBlock + r] += p[r] * a[j];
  }
}

template <std::size_t... Ds>
bool dispatch_kernel(std::index_sequence<Ds...>, const double* block, const double* rows, std::size_t n, std::size_t d,
                     double* acc) noexcept {
  static const bool avx2 = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ((d == Ds + 1 ? ((avx2 ? projection_kernel_avx2<Ds + 1>(block, rows, n, acc)
                                : projection_kernel_base<Ds + 1>(block, rows, n, acc)),
                          true)
                       : false) ||
          ...);
}

void projection_kernel(const double* block, const double* rows, std::size_t n, std::size_t d, double* acc) noexcept {
  if (!dispatch_kernel(std::make_index_sequence<12>{}, block, rows, n, d, acc))
    projection_kernel_generic(block, rows, n, d, acc);
}

void fwht(std::vector<double>& v) {
  const std::size_t n = v.size();
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t i = 0; i < n; i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        const double a = v[j];
        const double b = v[j + len];
        v[j] = a + b;
        v[j + len] = a - b;
      }
    }
  }
}

double hadamard_entry(std::size_t r, std::size_t c) {
  return (std::popcount(static_cast<std::uint64_t>(r & c)) & 1U) ? -1.0 : 1.0;
}

void require_dims(std::size_t n, std::size_t m) {
  if (m < 1 || m > n) {
    throw Error(ErrorKind::InvalidDims, "sketch size m=" + std::to_string(m) + " must lie in [1, n=" + std::to_string(n) + "]");
  }
}

}  // namespace

std::string_view scheme_label(SchemeId s) noexcept {
  switch (s) {
    case SchemeId::RS1: return "rs1";
    case SchemeId::RS2: return "rs2";
    case SchemeId::RS3: return "rs3";
    case SchemeId::RS4: return "lev";
    case SchemeId::RP1: return "rp1";
    case SchemeId::RP2: return "rp2";
    case SchemeId::RP3: return "rp3";
    case SchemeId::RP4: return "rp4";
    case SchemeId::CS: return "cs";
  }
  return "?";
}

SchemeId parse_scheme(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "rs4" || t == "srht") return t == "rs4" ? SchemeId::RS4 : SchemeId::RP3;
  for (SchemeId s : kAllSchemes)
    if (scheme_label(s) == t) return s;
  throw Error(ErrorKind::ConfigError, "unknown sketching scheme '" + std::string(text) + "'");
}

bool is_sampling(SchemeId s) noexcept {
  return s == SchemeId::RS1 || s == SchemeId::RS2 || s == SchemeId::RS3 || s == SchemeId::RS4;
}

std::size_t SketchOperator::output_rows() const noexcept {
  if (const auto* sr = std::get_if<SampledRows>(&representation)) return sr->indices.size();
  if (const auto* em = std::get_if<ExplicitMatrix>(&representation)) return em->P.rows();
  return m;
}

std::uint32_t cs_bucket(std::uint64_t seed, std::size_t row, std::size_t m) noexcept {
  return static_cast<std::uint32_t>(counter_below(derive_seed(seed, {kTagBucket}), row, m));
}

std::int8_t cs_sign(std::uint64_t seed, std::size_t row) noexcept {
  return (counter_bits(derive_seed(seed, {kTagSign}), row) >> 63) ? std::int8_t{1} : std::int8_t{-1};
}

SketchOperator build_sketch(SchemeId scheme, std::size_t n, std::size_t m, std::uint64_t seed,
                            const DenseMatrix* source, BuildOptions options) {
  require_dims(n, m);
  SketchOperator op;
  op.scheme = scheme;
  op.n = n;
  op.m = m;
  op.seed = seed;
  op.sparsity = options.sparsity;
  const double uniform_weight = std::sqrt(static_cast<double>(n) / static_cast<double>(m));

  switch (scheme) {
    case SchemeId::RS1: {
      Rng rng(derive_seed(seed, {kTagSelect}));
      SampledRows sr;
      sr.indices = sample_without_replacement(rng, n, m);
      sr.weights.assign(m, uniform_weight);
      op.representation = std::move(sr);
      break;
    }
    case SchemeId::RS2: {
      Rng rng(derive_seed(seed, {kTagSelect}));
      SampledRows sr;
      sr.indices.resize(m);
      for (auto& idx : sr.indices) idx = rng.below(n);
      sr.weights.assign(m, uniform_weight);
      op.representation = std::move(sr);
      break;
    }
    case SchemeId::RS3: {
      const std::uint64_t s = derive_seed(seed, {kTagBernoulli});
      const double keep = static_cast<double>(m) / static_cast<double>(n);
      SampledRows sr;
      for (std::size_t i = 0; i < n; ++i)
        if (counter_uniform(s, i) < keep) sr.indices.push_back(i);
      sr.weights.assign(sr.indices.size(), uniform_weight);
      op.representation = std::move(sr);
      break;
    }
    case SchemeId::RS4: {
      if (source == nullptr) throw Error(ErrorKind::MissingSource, "leverage sampling needs the source matrix");
      if (source->rows() != n) throw Error(ErrorKind::DimMismatch, "source rows differ from n");
      const LeverageProfile lp = leverage_scores(*source);
      AliasTable table(lp.probabilities);
      Rng rng(derive_seed(seed, {kTagSelect}));
      SampledRows sr;
      sr.indices.resize(m);
      sr.weights.resize(m);
      for (std::size_t s = 0; s < m; ++s) {
        const std::size_t k = table.sample(rng);
        sr.indices[s] = k;
        sr.weights[s] = 1.0 / std::sqrt(static_cast<double>(m) * lp.probabilities[k]);
      }
      op.representation = std::move(sr);
      break;
    }
    case SchemeId::RP1:
    case SchemeId::RP2:
      op.representation = DenseProjection{scheme == SchemeId::RP1 ? ProjectionKind::Gaussian : ProjectionKind::Rademacher,
                                          options.sparsity, 1.0 / std::sqrt(static_cast<double>(m))};
      break;
    case SchemeId::RP4:
      if (options.sparsity < 1) throw Error(ErrorKind::ConfigError, "sparsity must be at least 1");
      op.representation = DenseProjection{ProjectionKind::Sparse, options.sparsity,
                                          std::sqrt(static_cast<double>(options.sparsity) / static_cast<double>(m))};
      break;
    case SchemeId::RP3: {
      RandomizedHadamard rh;
      rh.padded_n = next_pow2(n);
      Rng sign_rng(derive_seed(seed, {kTagHadamardSign}));
      rh.signs.resize(n);
      for (std::size_t i = 0; i < n; i += 64) {
        std::uint64_t bits = sign_rng();
        for (std::size_t t = i; t < std::min(n, i + 64); ++t, bits >>= 1) rh.signs[t] = (bits & 1U) ? 1 : -1;
      }
      Rng row_rng(derive_seed(seed, {kTagHadamardRows}));
      rh.rows = sample_without_replacement(row_rng, rh.padded_n, m);
      rh.scale = 1.0 / std::sqrt(static_cast<double>(m));
      op.representation = std::move(rh);
      break;
    }
    case SchemeId::CS:
      op.representation = HashSign{};
      break;
  }
  return op;
}

SketchOperator make_countsketch(std::size_t m, std::vector<std::uint32_t> bucket, std::vector<std::int8_t> sign) {
  if (bucket.size() != sign.size()) throw Error(ErrorKind::DimMismatch, "bucket and sign maps differ in length");
  for (auto b : bucket)
    if (b >= m) throw Error(ErrorKind::InvalidDims, "bucket outside [0, m)");
  for (auto g : sign)
    if (g != 1 && g != -1) throw Error(ErrorKind::DomainError, "countsketch signs must be +1 or -1");
  SketchOperator op;
  op.scheme = SchemeId::CS;
  op.hand_built = true;
  op.n = bucket.size();
  op.m = m;
  op.representation = HashSign{std::move(bucket), std::move(sign)};
  return op;
}

SketchOperator make_row_selection(std::size_t n, std::vector<std::size_t> indices, std::vector<double> weights) {
  if (indices.size() != weights.size()) throw Error(ErrorKind::DimMismatch, "indices and weights differ in length");
  for (auto i : indices)
    if (i >= n) throw Error(ErrorKind::InvalidDims, "selected row outside [0, n)");
  SketchOperator op;
  op.scheme = SchemeId::RS1;
  op.hand_built = true;
  op.n = n;
  op.m = indices.size();
  op.representation = SampledRows{std::move(indices), std::move(weights)};
  return op;
}

SketchOperator make_explicit(DenseMatrix P, SchemeId tag) {
  SketchOperator op;
  op.scheme = tag;
  op.hand_built = true;
  op.n = P.cols();
  op.m = P.rows();
  op.representation = ExplicitMatrix{std::move(P)};
  return op;
}

namespace {

template <class RowAt>
DenseMatrix apply_impl(const SketchOperator& op, std::size_t d, RowAt&& row_at) {
  return std::visit(
      [&](const auto& rep) -> DenseMatrix {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, SampledRows>) {
          DenseMatrix out(rep.indices.size(), d);
          for (std::size_t s = 0; s < rep.indices.size(); ++s) {
            auto src = row_at(rep.indices[s]);
            auto dst = out.row(s);
            for (std::size_t j = 0; j < d; ++j) dst[j] = rep.weights[s] * src[j];
          }
          return out;
        } else if constexpr (std::is_same_v<T, HashSign>) {
          DenseMatrix out(op.m, d);
          const bool expl = !rep.bucket.empty();
          const std::uint64_t bucket_seed = derive_seed(op.seed, {kTagBucket});
          const std::uint64_t sign_seed = derive_seed(op.seed, {kTagSign});
          for (std::size_t i = 0; i < op.n; ++i) {
            const std::size_t b = expl ? rep.bucket[i] : counter_below(bucket_seed, i, op.m);
            const double g = expl ? rep.sign[i] : ((counter_bits(sign_seed, i) >> 63) ? 1.0 : -1.0);
            auto src = row_at(i);
            auto dst = out.row(b);
            for (std::size_t j = 0; j < d; ++j) dst[j] += g * src[j];
          }
          return out;
        } else if constexpr (std::is_same_v<T, DenseProjection>) {
          // Rows of A are gathered contiguously and Π is generated kProjectionBlock rows at a
          // time, interleaved so the kernel's innermost loop runs across those rows.
          std::vector<double> rows(op.n * d);
          for (std::size_t k = 0; k < op.n; ++k) {
            auto src = row_at(k);
            std::copy(src.begin(), src.end(), rows.begin() + static_cast<std::ptrdiff_t>(k * d));
          }
          DenseMatrix out(op.m, d);
          std::vector<double> block(op.n * kProjectionBlock);
          std::vector<double> acc(d * kProjectionBlock);
          std::vector<double> scratch;
          for (std::size_t i0 = 0; i0 < op.m; i0 += kProjectionBlock) {
            const std::size_t count = std::min(kProjectionBlock, op.m - i0);
            if (count < kProjectionBlock) std::fill(block.begin(), block.end(), 0.0);
            for (std::size_t r = 0; r < count; ++r)
              projection_row(op, rep, i0 + r, block.data() + r, kProjectionBlock, scratch);
            std::fill(acc.begin(), acc.end(), 0.0);
            projection_kernel(block.data(), rows.data(), op.n, d, acc.data());
            for (std::size_t r = 0; r < count; ++r)
              for (std::size_t j = 0; j < d; ++j) out(i0 + r, j) = rep.scale * acc[j * kProjectionBlock + r];
          }
          return out;
        } else if constexpr (std::is_same_v<T, RandomizedHadamard>) {
          DenseMatrix out(rep.rows.size(), d);
          std::vector<double> col(rep.padded_n);
          for (std::size_t j = 0; j < d; ++j) {
            std::fill(col.begin(), col.end(), 0.0);
            for (std::size_t i = 0; i < op.n; ++i) col[i] = rep.signs[i] * row_at(i)[j];
            fwht(col);
            for (std::size_t r = 0; r < rep.rows.size(); ++r) out(r, j) = rep.scale * col[rep.rows[r]];
          }
          return out;
        } else {
          DenseMatrix out(rep.P.rows(), d);
          for (std::size_t i = 0; i < rep.P.rows(); ++i)
            for (std::size_t k = 0; k < op.n; ++k) {
              const double p = rep.P(i, k);
              if (p == 0.0) continue;
              auto src = row_at(k);
              for (std::size_t j = 0; j < d; ++j) out(i, j) += p * src[j];
            }
          return out;
        }
      },
      op.representation);
}

}  // namespace

DenseMatrix apply_sketch(const SketchOperator& op, const DenseMatrix& a) {
  if (a.rows() != op.n) {
    throw Error(ErrorKind::DimMismatch, "operator expects " + std::to_string(op.n) + " rows, matrix has " + std::to_string(a.rows()));
  }
  return apply_impl(op, a.cols(), [&](std::size_t i) { return a.row(i); });
}

DenseMatrix apply_sketch(const SketchOperator& op, const DenseMatrix& a, std::span<const std::size_t> row_map) {
  if (row_map.size() != op.n) throw Error(ErrorKind::DimMismatch, "row map length differs from operator n");
  for (std::size_t r : row_map)
    if (r >= a.rows()) throw Error(ErrorKind::InvalidDims, "row map points outside the matrix");
  return apply_impl(op, a.cols(), [&](std::size_t i) { return a.row(row_map[i]); });
}

DenseMatrix apply_sketch_transpose(const SketchOperator& op, const DenseMatrix& b) {
  if (b.rows() != op.output_rows()) throw Error(ErrorKind::DimMismatch, "transpose application: row count mismatch");
  const std::size_t d = b.cols();
  DenseMatrix out(op.n, d);
  if (const auto* sr = std::get_if<SampledRows>(&op.representation)) {
    for (std::size_t s = 0; s < sr->indices.size(); ++s) {
      auto dst = out.row(sr->indices[s]);
      auto src = b.row(s);
      for (std::size_t j = 0; j < d; ++j) dst[j] += sr->weights[s] * src[j];
    }
    return out;
  }
  if (const auto* hs = std::get_if<HashSign>(&op.representation)) {
    const bool expl = !hs->bucket.empty();
    for (std::size_t i = 0; i < op.n; ++i) {
      const std::size_t bk = expl ? hs->bucket[i] : cs_bucket(op.seed, i, op.m);
      const double g = expl ? hs->sign[i] : cs_sign(op.seed, i);
      auto src = b.row(bk);
      auto dst = out.row(i);
      for (std::size_t j = 0; j < d; ++j) dst[j] = g * src[j];
    }
    return out;
  }
  return multiply_tn(materialize(op), b);
}

DenseMatrix materialize(const SketchOperator& op, std::size_t cap) {
  const std::size_t r = op.output_rows();
  if (r * op.n > cap) throw Error(ErrorKind::InvalidDims, "operator too large to materialize");
  DenseMatrix P(r, op.n);
  std::visit(
      [&](const auto& rep) {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, SampledRows>) {
          for (std::size_t s = 0; s < r; ++s) P(s, rep.indices[s]) = rep.weights[s];
        } else if constexpr (std::is_same_v<T, HashSign>) {
          const bool expl = !rep.bucket.empty();
          for (std::size_t i = 0; i < op.n; ++i) {
            const std::size_t b = expl ? rep.bucket[i] : cs_bucket(op.seed, i, op.m);
            P(b, i) = expl ? rep.sign[i] : cs_sign(op.seed, i);
          }
        } else if constexpr (std::is_same_v<T, DenseProjection>) {
          std::vector<double> scratch;
          for (std::size_t i = 0; i < r; ++i) {
            auto row = P.row(i);
            projection_row(op, rep, i, row.data(), 1, scratch);
            for (double& v : row) v *= rep.scale;
          }
        } else if constexpr (std::is_same_v<T, RandomizedHadamard>) {
          for (std::size_t s = 0; s < r; ++s)
            for (std::size_t k = 0; k < op.n; ++k) P(s, k) = rep.scale * hadamard_entry(rep.rows[s], k) * rep.signs[k];
        } else {
          P = rep.P;
        }
      },
      op.representation);
  return P;
}

PropertyReport check_pi_properties(const SketchOperator& op) {
  DenseMatrix P;
  if (op.scheme == SchemeId::RS3 && std::holds_alternative<SampledRows>(op.representation)) {
    // n×n form: diagonal with √(n/m) on retained rows, zero elsewhere.
    const auto& sr = std::get<SampledRows>(op.representation);
    if (op.n * op.n > kMaterializeCap) throw Error(ErrorKind::InvalidDims, "operator too large to materialize");
    P = DenseMatrix(op.n, op.n);
    for (std::size_t s = 0; s < sr.indices.size(); ++s) P(sr.indices[s], sr.indices[s]) = sr.weights[s];
  } else {
    P = materialize(op);
  }
  const DenseMatrix ptp = gram(P);
  const DenseMatrix ppt = multiply(P, transpose(P));
  const double ratio = static_cast<double>(op.n) / static_cast<double>(op.m);
  PropertyReport rep;
  for (std::size_t i = 0; i < ptp.rows(); ++i)
    for (std::size_t j = 0; j < ptp.cols(); ++j)
      if (i != j) rep.max_offdiag_pi_t_pi = std::max(rep.max_offdiag_pi_t_pi, std::abs(ptp(i, j)));
  for (std::size_t i = 0; i < ppt.rows(); ++i)
    for (std::size_t j = 0; j < ppt.cols(); ++j)
      rep.max_dev_pipit = std::max(rep.max_dev_pipit, std::abs(ppt(i, j) - (i == j ? ratio : 0.0)));
  const double tol = 1e-10 * std::max(1.0, ratio);
  rep.prop1_holds = rep.max_offdiag_pi_t_pi <= tol;
  rep.prop2_holds = rep.max_dev_pipit <= tol;
  return rep;
}

}  // namespace sketchreg
