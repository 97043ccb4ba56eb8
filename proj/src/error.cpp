#include "sketch_infer/error.hpp"

namespace sketch_infer {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ConvergenceError: return "ConvergenceError";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::MissingWStar: return "MissingWStar";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::GammaNonpositive: return "GammaNonpositive";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::NegativeVariance: return "NegativeVariance";
    case ErrorCode::NegativeDenominator: return "NegativeDenominator";
    case ErrorCode::DegenerateSSR: return "DegenerateSSR";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DivideByZero: return "DivideByZero";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace sketch_infer
