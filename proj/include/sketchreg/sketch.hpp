#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sketchreg/matrix.hpp"

namespace sketchreg {

enum class SchemeId { RS1, RS2, RS3, RS4, RP1, RP2, RP3, RP4, CS };

inline constexpr std::array<SchemeId, 9> kAllSchemes = {
    SchemeId::RS1, SchemeId::RS2, SchemeId::RS3, SchemeId::RS4, SchemeId::RP1,
    SchemeId::RP2, SchemeId::RP3, SchemeId::RP4, SchemeId::CS};

/// Lower-case label used in reports: rs1 rs2 rs3 lev rp1 rp2 rp3 rp4 cs.
std::string_view scheme_label(SchemeId s) noexcept;
/// Accepts labels case-insensitively, plus the aliases rs4 and srht.
SchemeId parse_scheme(std::string_view text);
bool is_sampling(SchemeId s) noexcept;

/// Rows of A picked (possibly repeatedly) and rescaled.
struct SampledRows {
  std::vector<std::size_t> indices;
  std::vector<double> weights;
};

/// Countsketch maps. When `bucket`/`sign` are empty they are derived from the seed by a
/// counter hash, so any single row's assignment is recomputable in isolation.
struct HashSign {
  std::vector<std::uint32_t> bucket;  ///< 0-based, explicit maps only
  std::vector<std::int8_t> sign;
};

enum class ProjectionKind { Gaussian, Rademacher, Sparse };

/// Dense m×n projection whose rows are regenerated from per-row streams on demand.
/// Entries: Gaussian N(0,1); Rademacher ±1; Sparse ±1 w.p. 1/(2s) each, else 0.
/// The overall factor `scale` multiplies every entry.
struct DenseProjection {
  ProjectionKind kind = ProjectionKind::Gaussian;
  unsigned sparsity = 3;
  double scale = 1.0;
};

/// SRHT: rows of H·D (H the ±1 Walsh-Hadamard matrix of order padded_n) picked without
/// replacement, times `scale` = 1/√m, i.e. √(N/m)·P·(H/√N)·D.
struct RandomizedHadamard {
  std::size_t padded_n = 0;
  std::vector<std::int8_t> signs;  ///< length n
  std::vector<std::size_t> rows;   ///< length m, in [0, padded_n)
  double scale = 1.0;
};

/// Caller-supplied Π, used for test hooks and worked examples.
struct ExplicitMatrix {
  DenseMatrix P;
};

struct SketchOperator {
  SchemeId scheme = SchemeId::RS1;
  std::size_t n = 0;
  std::size_t m = 0;  ///< expected row count for RS3
  std::uint64_t seed = 0;
  unsigned sparsity = 3;
  bool hand_built = false;  ///< representation not derivable from the seed
  std::variant<SampledRows, HashSign, DenseProjection, RandomizedHadamard, ExplicitMatrix> representation;

  /// Rows produced by apply_sketch (differs from m only for RS3).
  std::size_t output_rows() const noexcept;
};

struct BuildOptions {
  unsigned sparsity = 3;  ///< RP4 s; the √n variant is requested by passing that value
};

/// Realize Π for a scheme. Deterministic in (scheme, n, m, seed[, source]).
/// RS4 needs `source` for its leverage probabilities.
SketchOperator build_sketch(SchemeId scheme, std::size_t n, std::size_t m, std::uint64_t seed,
                            const DenseMatrix* source = nullptr, BuildOptions options = {});

/// Countsketch with explicit 0-based buckets and ±1 signs.
SketchOperator make_countsketch(std::size_t m, std::vector<std::uint32_t> bucket, std::vector<std::int8_t> sign);
/// Row selection with given weights (scheme tag RS1).
SketchOperator make_row_selection(std::size_t n, std::vector<std::size_t> indices, std::vector<double> weights);
SketchOperator make_explicit(DenseMatrix P, SchemeId tag = SchemeId::RP1);

/// Countsketch bucket and sign of row i for a seed-derived operator.
std::uint32_t cs_bucket(std::uint64_t seed, std::size_t row, std::size_t m) noexcept;
std::int8_t cs_sign(std::uint64_t seed, std::size_t row) noexcept;

/// ΠA without materializing Π.
DenseMatrix apply_sketch(const SketchOperator& op, const DenseMatrix& a);
/// ΠA where operator row i reads row row_map[i] of A (op.n = row_map.size()). Lets a block
/// of a larger matrix be sketched without copying it out.
DenseMatrix apply_sketch(const SketchOperator& op, const DenseMatrix& a, std::span<const std::size_t> row_map);
/// Π'B for B with output_rows() rows; result is n × cols(B).
DenseMatrix apply_sketch_transpose(const SketchOperator& op, const DenseMatrix& b);

inline constexpr std::size_t kMaterializeCap = 100'000'000;
/// Dense Π (output_rows × n). For testing; throws InvalidDims above `cap` entries.
DenseMatrix materialize(const SketchOperator& op, std::size_t cap = kMaterializeCap);

struct PropertyReport {
  bool prop1_holds = false;  ///< Π'Π diagonal
  bool prop2_holds = false;  ///< ΠΠ' = (n/m)·I_m
  double max_offdiag_pi_t_pi = 0.0;
  double max_dev_pipit = 0.0;
};

/// Measures both structural properties on the materialized operator. RS3 is assessed in its
/// n×n diagonal form, where ΠΠ' has zero rows for dropped observations.
PropertyReport check_pi_properties(const SketchOperator& op);

/// Streaming one-pass countsketch accumulator. Single writer.
class CsAccumulator {
 public:
  CsAccumulator(std::size_t m, std::size_t cols, std::uint64_t seed);
  /// Uses the maps of an existing countsketch operator (explicit or seed-derived).
  CsAccumulator(const SketchOperator& op, std::size_t cols);

  void update(std::size_t row_index, std::span<const double> row);
  const DenseMatrix& state() const noexcept { return state_; }
  DenseMatrix finalize() const { return state_; }

 private:
  std::size_t bucket(std::size_t row) const;
  std::int8_t sign(std::size_t row) const;

  std::size_t m_;
  std::uint64_t seed_;
  std::vector<std::uint32_t> bucket_;
  std::vector<std::int8_t> sign_;
  DenseMatrix state_;
  std::vector<bool> seen_;
};

CsAccumulator countsketch_stream(std::size_t m, std::size_t cols, std::uint64_t seed);
void cs_update(CsAccumulator& acc, std::size_t row_index, std::span<const double> row);
DenseMatrix cs_finalize(const CsAccumulator& acc);

/// Self-describing text record. Seed-derived representations are rebuilt on load; explicit
/// maps (RS4 draws, explicit countsketch, explicit Π) are stored in hexfloat.
std::string serialize(const SketchOperator& op);
SketchOperator deserialize(std::string_view record);

}  // namespace sketchreg
