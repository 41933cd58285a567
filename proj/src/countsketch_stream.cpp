#include <cstdio>
#include <sstream>

#include "sketchreg/error.hpp"
#include "sketchreg/sketch.hpp"

namespace sketchreg {

CsAccumulator::CsAccumulator(std::size_t m, std::size_t cols, std::uint64_t seed)
    : m_(m), seed_(seed), state_(m, cols) {
  if (m == 0) throw Error(ErrorKind::InvalidDims, "countsketch needs at least one bucket");
}

CsAccumulator::CsAccumulator(const SketchOperator& op, std::size_t cols)
    : m_(op.m), seed_(op.seed), state_(op.m, cols) {
  const auto* hs = std::get_if<HashSign>(&op.representation);
  if (hs == nullptr) throw Error(ErrorKind::ConfigError, "streaming needs a countsketch operator");
  bucket_ = hs->bucket;
  sign_ = hs->sign;
}

std::size_t CsAccumulator::bucket(std::size_t row) const {
  if (bucket_.empty()) return cs_bucket(seed_, row, m_);
  if (row >= bucket_.size()) throw Error(ErrorKind::InvalidDims, "row index beyond the explicit hash map");
  return bucket_[row];
}

std::int8_t CsAccumulator::sign(std::size_t row) const {
  return sign_.empty() ? cs_sign(seed_, row) : sign_[row];
}

void CsAccumulator::update(std::size_t row_index, std::span<const double> row) {
  if (row.size() != state_.cols()) throw Error(ErrorKind::DimMismatch, "streamed row has the wrong width");
  if (row_index >= seen_.size()) seen_.resize(row_index + 1, false);
  if (seen_[row_index]) throw Error(ErrorKind::DuplicateRow, "row " + std::to_string(row_index) + " streamed twice");
  const std::size_t b = bucket(row_index);
  const double g = sign(row_index);
  seen_[row_index] = true;
  auto dst = state_.row(b);
  for (std::size_t j = 0; j < row.size(); ++j) dst[j] += g * row[j];
}

CsAccumulator countsketch_stream(std::size_t m, std::size_t cols, std::uint64_t seed) {
  return CsAccumulator(m, cols, seed);
}

void cs_update(CsAccumulator& acc, std::size_t row_index, std::span<const double> row) {
  acc.update(row_index, row);
}

DenseMatrix cs_finalize(const CsAccumulator& acc) { return acc.finalize(); }

namespace {

constexpr std::string_view kHeader = "sketchreg-operator 1";

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& tok) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "bad number '" + tok + "' in operator record");
  }
}

}  // namespace

std::string serialize(const SketchOperator& op) {
  std::ostringstream os;
  os << kHeader << '\n'
     << "scheme " << scheme_label(op.scheme) << '\n'
     << "n " << op.n << '\n'
     << "m " << op.m << '\n'
     << "seed " << op.seed << '\n'
     << "sparsity " << op.sparsity << '\n';
  if (!op.hand_built && op.scheme != SchemeId::RS4) return os.str();
  if (const auto* sr = std::get_if<SampledRows>(&op.representation)) {
    os << "rows " << sr->indices.size() << '\n';
    for (std::size_t s = 0; s < sr->indices.size(); ++s) os << sr->indices[s] << ' ' << hex(sr->weights[s]) << '\n';
  } else if (const auto* hs = std::get_if<HashSign>(&op.representation)) {
    os << "hash " << hs->bucket.size() << '\n';
    for (std::size_t i = 0; i < hs->bucket.size(); ++i) os << hs->bucket[i] << ' ' << int(hs->sign[i]) << '\n';
  } else if (const auto* em = std::get_if<ExplicitMatrix>(&op.representation)) {
    os << "matrix " << em->P.rows() << ' ' << em->P.cols() << '\n';
    for (double v : em->P.data()) os << hex(v) << '\n';
  }
  return os.str();
}

SketchOperator deserialize(std::string_view record) {
  std::istringstream is{std::string(record)};
  std::string line;
  if (!std::getline(is, line) || line != kHeader) throw Error(ErrorKind::ParseError, "missing operator record header");
  std::string key, scheme_text;
  std::size_t n = 0, m = 0;
  std::uint64_t seed = 0;
  unsigned sparsity = 3;
  auto expect = [&](const char* name) {
    if (!(is >> key) || key != name) throw Error(ErrorKind::ParseError, std::string("expected field '") + name + "'");
  };
  expect("scheme");
  is >> scheme_text;
  expect("n");
  is >> n;
  expect("m");
  is >> m;
  expect("seed");
  is >> seed;
  expect("sparsity");
  is >> sparsity;
  if (!is) throw Error(ErrorKind::ParseError, "truncated operator record");
  const SchemeId scheme = parse_scheme(scheme_text);

  std::string section;
  if (!(is >> section)) {
    if (scheme == SchemeId::RS4) throw Error(ErrorKind::ParseError, "leverage operator record lacks its draws");
    return build_sketch(scheme, n, m, seed, nullptr, BuildOptions{sparsity});
  }
  SketchOperator op;
  op.scheme = scheme;
  op.n = n;
  op.m = m;
  op.seed = seed;
  op.sparsity = sparsity;
  op.hand_built = scheme != SchemeId::RS4;
  if (section == "rows") {
    std::size_t count = 0;
    is >> count;
    SampledRows sr;
    for (std::size_t s = 0; s < count; ++s) {
      std::size_t idx = 0;
      std::string w;
      if (!(is >> idx >> w)) throw Error(ErrorKind::ParseError, "truncated row list");
      sr.indices.push_back(idx);
      sr.weights.push_back(parse_double(w));
    }
    op.representation = std::move(sr);
  } else if (section == "hash") {
    std::size_t count = 0;
    is >> count;
    HashSign hs;
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t b = 0;
      int g = 0;
      if (!(is >> b >> g)) throw Error(ErrorKind::ParseError, "truncated hash map");
      hs.bucket.push_back(b);
      hs.sign.push_back(static_cast<std::int8_t>(g));
    }
    op.representation = std::move(hs);
  } else if (section == "matrix") {
    std::size_t r = 0, c = 0;
    is >> r >> c;
    std::vector<double> v(r * c);
    for (auto& x : v) {
      std::string t;
      if (!(is >> t)) throw Error(ErrorKind::ParseError, "truncated matrix");
      x = parse_double(t);
    }
    op.representation = ExplicitMatrix{DenseMatrix(r, c, std::move(v))};
  } else {
    throw Error(ErrorKind::ParseError, "unknown operator section '" + section + "'");
  }
  return op;
}

}  // namespace sketchreg
