#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nodalcover {

enum class ErrorCode {
  kInvalidParams,
  kInvalidInput,
  kDisconnectedSubset,
  kDisconnectedComplex,
  kNonSurface,
  kInvalidWord,
  kDegreeTooLarge,
  kInfiniteGroup,
  kBoundExceeded,
  kFaceVoltageNontrivial,
  kDisconnectedInput,
  kBasepointOutside,
  kIndexOutOfRange,
  kMissingCoordinates,
  kDegenerateTriangle,
  kNoConvergence,
  kAmbiguousCount,
  kRangeExceeded,
  kIntertwiningFailure,
  kClusterNotFound,
  kEmptyOrFullSubset,
  kAllZeroVector,
  kZeroSetTooLarge,
  kSingleDomain,
  kInvalidSignature,
  kNoCocycle,
  kUncertifiedRange,
  kRankAmbiguous,
  kBoundViolated,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nodalcover
