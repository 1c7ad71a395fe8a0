#include "nodalcover/error.hpp"

namespace nodalcover {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParams: return "invalid-params";
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kDisconnectedSubset: return "disconnected-subset";
    case ErrorCode::kDisconnectedComplex: return "disconnected-complex";
    case ErrorCode::kNonSurface: return "non-surface";
    case ErrorCode::kInvalidWord: return "invalid-word";
    case ErrorCode::kDegreeTooLarge: return "degree-too-large";
    case ErrorCode::kInfiniteGroup: return "infinite-group";
    case ErrorCode::kBoundExceeded: return "bound-exceeded";
    case ErrorCode::kFaceVoltageNontrivial: return "face-voltage-nontrivial";
    case ErrorCode::kDisconnectedInput: return "disconnected-input";
    case ErrorCode::kBasepointOutside: return "basepoint-outside";
    case ErrorCode::kIndexOutOfRange: return "index-out-of-range";
    case ErrorCode::kMissingCoordinates: return "missing-coordinates";
    case ErrorCode::kDegenerateTriangle: return "degenerate-triangle";
    case ErrorCode::kNoConvergence: return "no-convergence";
    case ErrorCode::kAmbiguousCount: return "ambiguous-count";
    case ErrorCode::kRangeExceeded: return "range-exceeded";
    case ErrorCode::kIntertwiningFailure: return "intertwining-failure";
    case ErrorCode::kClusterNotFound: return "cluster-not-found";
    case ErrorCode::kEmptyOrFullSubset: return "empty-or-full-subset";
    case ErrorCode::kAllZeroVector: return "all-zero-vector";
    case ErrorCode::kZeroSetTooLarge: return "zero-set-too-large";
    case ErrorCode::kSingleDomain: return "single-domain";
    case ErrorCode::kInvalidSignature: return "invalid-signature";
    case ErrorCode::kNoCocycle: return "no-cocycle";
    case ErrorCode::kUncertifiedRange: return "uncertified-range";
    case ErrorCode::kRankAmbiguous: return "rank-ambiguous";
    case ErrorCode::kBoundViolated: return "bound-violated";
  }
  return "unknown";
}

}  // namespace nodalcover
