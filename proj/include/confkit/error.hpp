//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CONFKIT_ERROR_HPP_
#define CONFKIT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace confkit {

enum class ErrorCode {
  kMalformedCounts,
  kIndexOutOfRange,
  kInconsistentConnectivity,
  kUnsupportedV3000,
  kFieldOverflow,
  kEnsembleMismatch,
  kEmptyEnsemble,
  kFrameAtomMismatch,
  kNonNumeric,
  kMalformedRecord,
  kUnknownElement,
  kEmptyMask,
  kDegenerateGeometry,
  kInvalidDihedral,
  kEmbeddingFailed,
  kCoincidentAtoms,
  kInvalidArgument,
  kDisconnected,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

/// Every recoverable failure in the library is reported through this type;
/// code() identifies the failure class independently of the message text.
class Error: public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) { }

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

}  // namespace confkit

#endif  // CONFKIT_ERROR_HPP_
