#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ibrs {

enum class ErrorCode {
  kWrongLength,
  kBadEncoding,
  kOffCurve,
  kOffSubgroup,
  kTruncated,
  kUnknownProfile,
  kProfileNotOperational,
  kInvalidArgument,
  kDuplicateRingMember,
  kSignerNotInRing,
  kDuplicateIdentity,
  kUnknownIdentity,
  kDecryptionFailed,
  kMacFailure,
  kUnsupportedAlgorithm,
  kIntegrityViolation,
  kRingListExpired,
  kInsufficientRing,
  kNoRingList,
  kRevoked,
  kRngFailure,
  kCryptoBackend,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  explicit Error(ErrorCode code) : Error(code, std::string(to_string(code))) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ibrs
