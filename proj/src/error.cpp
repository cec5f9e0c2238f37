// SPDX-License-Identifier: Apache-2.0
#include "strigraph/error.hpp"

namespace strigraph {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSignature: return "InvalidSignature";
    case ErrorCode::kSignatureMismatch: return "SignatureMismatch";
    case ErrorCode::kMalformedGraph: return "MalformedGraph";
    case ErrorCode::kStaleOrder: return "StaleOrder";
    case ErrorCode::kTypeMismatch: return "TypeMismatch";
    case ErrorCode::kNotBoundaryCoherent: return "NotBoundaryCoherent";
    case ErrorCode::kNoSuchVertex: return "NoSuchVertex";
    case ErrorCode::kNoSuchEdge: return "NoSuchEdge";
    case ErrorCode::kInvalidRule: return "InvalidRule";
    case ErrorCode::kUnknownRule: return "UnknownRule";
    case ErrorCode::kStaleMatch: return "StaleMatch";
    case ErrorCode::kFrameMismatch: return "FrameMismatch";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kMissingValuation: return "MissingValuation";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

std::string Violation::str() const {
  return subject.empty() ? kind : kind + "(" + subject + ")";
}

}  // namespace strigraph
