#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sketchreg {

enum class ErrorKind {
  NonConvergence,
  RankDeficient,
  MissingSource,
  InvalidDims,
  DimMismatch,
  DuplicateRow,
  DegenerateInput,
  SingularSketch,
  SingularRestriction,
  PartitionImpossible,
  AllSketchesSingular,
  DegenerateSpread,
  DomainError,
  ParseError,
  NonNumeric,
  EmptyInput,
  IoError,
  ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; the kind tells callers which contract failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sketchreg
