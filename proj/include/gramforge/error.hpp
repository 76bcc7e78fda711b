#pragma once

#include <stdexcept>
#include <string>

namespace gramforge {

enum class ErrorKind {
  InvalidEdge,
  UnknownName,
  ParseError,
  InfeasibleWidth,
  InfeasibleData,
  NotPsd,
  AlignmentInfeasible,
  InconsistentOverlap,
  InvalidEdmData,
  NumericalFailure,
  NumericalConsistency,
  RankStructure,
  SizeGuard,
  DimensionMismatch,
};

constexpr const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidEdge: return "invalid-edge";
    case ErrorKind::UnknownName: return "unknown-name";
    case ErrorKind::ParseError: return "parse-error";
    case ErrorKind::InfeasibleWidth: return "infeasible-width";
    case ErrorKind::InfeasibleData: return "infeasible-data";
    case ErrorKind::NotPsd: return "not-psd";
    case ErrorKind::AlignmentInfeasible: return "alignment-infeasible";
    case ErrorKind::InconsistentOverlap: return "inconsistent-overlap";
    case ErrorKind::InvalidEdmData: return "invalid-edm-data";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::NumericalConsistency: return "numerical-consistency";
    case ErrorKind::RankStructure: return "rank-structure";
    case ErrorKind::SizeGuard: return "size-guard";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace gramforge
