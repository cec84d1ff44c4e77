#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ibrs/error.hpp"

namespace ibrs {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) noexcept {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

/// Big-endian writer used by every canonical encoding in the library.
class ByteWriter {
 public:
  ByteWriter& u8(std::uint8_t v) {
    out_.push_back(v);
    return *this;
  }
  ByteWriter& u16(std::uint16_t v) { return put_be(v, 2); }
  ByteWriter& u32(std::uint32_t v) { return put_be(v, 4); }
  ByteWriter& u64(std::uint64_t v) { return put_be(v, 8); }
  ByteWriter& raw(ByteView data) {
    out_.insert(out_.end(), data.begin(), data.end());
    return *this;
  }
  /// u32 length prefix followed by the bytes.
  ByteWriter& lp(ByteView data) {
    u32(static_cast<std::uint32_t>(data.size()));
    return raw(data);
  }

  std::size_t size() const noexcept { return out_.size(); }
  const Bytes& bytes() const noexcept { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  ByteWriter& put_be(std::uint64_t v, int width) {
    for (int i = width - 1; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    return *this;
  }

  Bytes out_;
};

/// Bounds-checked reader; every short read throws kTruncated.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) noexcept : data_(data) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get_be(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get_be(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get_be(4)); }
  std::uint64_t u64() { return get_be(8); }

  ByteView raw(std::size_t n) {
    need(n);
    auto view = data_.subspan(pos_, n);
    pos_ += n;
    return view;
  }
  ByteView lp() { return raw(u32()); }

  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool done() const noexcept { return remaining() == 0; }
  void expect_done() const {
    if (!done()) throw Error(ErrorCode::kBadEncoding, "trailing bytes after message");
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw Error(ErrorCode::kTruncated, "input truncated");
  }
  std::uint64_t get_be(std::size_t width) {
    need(width);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v = (v << 8) | data_[pos_ + i];
    pos_ += width;
    return v;
  }

  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace ibrs
