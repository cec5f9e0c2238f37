// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace strigraph {

/// Domain error categories. The CLI maps every one of these to exit code 1
/// and the server to HTTP 422, except where noted on the endpoint.
enum class ErrorCode {
  kInvalidSignature,
  kSignatureMismatch,
  kMalformedGraph,
  kStaleOrder,
  kTypeMismatch,
  kNotBoundaryCoherent,
  kNoSuchVertex,
  kNoSuchEdge,
  kInvalidRule,
  kUnknownRule,
  kStaleMatch,
  kFrameMismatch,
  kDimMismatch,
  kShapeMismatch,
  kMissingValuation,
  kParseError,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// A single invariant violation reported by the validate_* family.
struct Violation {
  std::string kind;
  std::string subject;

  std::string str() const;
  friend bool operator==(const Violation&, const Violation&) = default;
};

}  // namespace strigraph
