#include "sketchreg/error.hpp"

namespace sketchreg {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::MissingSource: return "MissingSource";
    case ErrorKind::InvalidDims: return "InvalidDims";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::DuplicateRow: return "DuplicateRow";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::SingularSketch: return "SingularSketch";
    case ErrorKind::SingularRestriction: return "SingularRestriction";
    case ErrorKind::PartitionImpossible: return "PartitionImpossible";
    case ErrorKind::AllSketchesSingular: return "AllSketchesSingular";
    case ErrorKind::DegenerateSpread: return "DegenerateSpread";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NonNumeric: return "NonNumeric";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace sketchreg
