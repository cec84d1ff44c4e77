#include "ibrs/bytes.hpp"

namespace ibrs {

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

namespace {

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw Error(ErrorCode::kBadEncoding, "invalid hex digit");
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(ErrorCode::kWrongLength, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  return out;
}

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kWrongLength: return "wrong length";
    case ErrorCode::kBadEncoding: return "bad encoding";
    case ErrorCode::kOffCurve: return "point not on curve";
    case ErrorCode::kOffSubgroup: return "point not in prime-order subgroup";
    case ErrorCode::kTruncated: return "truncated input";
    case ErrorCode::kUnknownProfile: return "unknown curve profile";
    case ErrorCode::kProfileNotOperational: return "curve profile is size-only";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDuplicateRingMember: return "duplicate ring member";
    case ErrorCode::kSignerNotInRing: return "signer not in ring";
    case ErrorCode::kDuplicateIdentity: return "identity already registered";
    case ErrorCode::kUnknownIdentity: return "unknown identity";
    case ErrorCode::kDecryptionFailed: return "decryption failed";
    case ErrorCode::kMacFailure: return "MAC verification failed";
    case ErrorCode::kUnsupportedAlgorithm: return "unsupported algorithm";
    case ErrorCode::kIntegrityViolation: return "integrity violation";
    case ErrorCode::kRingListExpired: return "ring list expired";
    case ErrorCode::kInsufficientRing: return "ring list too small";
    case ErrorCode::kNoRingList: return "no ring list held";
    case ErrorCode::kRevoked: return "pseudonym revoked";
    case ErrorCode::kRngFailure: return "RNG failure";
    case ErrorCode::kCryptoBackend: return "crypto backend failure";
  }
  return "unknown error";
}

}  // namespace ibrs
