#include "dyncount/error.hpp"

namespace dyncount {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPrime: return "NonPrime";
    case ErrorCode::DomainTooLarge: return "DomainTooLarge";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::ZeroElement: return "ZeroElement";
    case ErrorCode::InvalidElement: return "InvalidElement";
    case ErrorCode::InvalidPolynomial: return "InvalidPolynomial";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::ZeroLambda: return "ZeroLambda";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::OutOfFamily: return "OutOfFamily";
    case ErrorCode::NotAPermutation: return "NotAPermutation";
    case ErrorCode::TooLargeForOracle: return "TooLargeForOracle";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DivisionUndefined: return "DivisionUndefined";
    case ErrorCode::CheckpointCorrupt: return "CheckpointCorrupt";
  }
  return "Unknown";
}

}  // namespace dyncount
