// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace parp {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

std::string hex_encode(ByteView data);
std::optional<Bytes> hex_decode(std::string_view hex);

inline std::string hex_encode(const Bytes& b) { return hex_encode(ByteView{b}); }

// Canonical big-endian integer encoding used throughout the wire format.
inline void put_u64(Bytes& out, uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline void put_u32(Bytes& out, uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline void put_u16(Bytes& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

inline Bytes be64(uint64_t v) {
    Bytes b;
    b.reserve(8);
    put_u64(b, v);
    return b;
}

// Minimal big-endian encoding: no leading zero bytes, except 0 -> 0x00.
Bytes be_minimal(uint64_t v);

// Bounds-checked sequential reader over an untrusted buffer. All getters
// return false once the buffer is exhausted; the cursor never overruns.
class ByteReader {
  public:
    explicit ByteReader(ByteView data) : data_(data) {}

    size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

    bool get_u8(uint8_t& out);
    bool get_u16(uint16_t& out);
    bool get_u32(uint32_t& out);
    bool get_u64(uint64_t& out);
    bool get_bytes(size_t n, Bytes& out);
    template <size_t N>
    bool get_array(std::array<uint8_t, N>& out) {
        if (remaining() < N) return false;
        std::memcpy(out.data(), data_.data() + pos_, N);
        pos_ += N;
        return true;
    }

  private:
    ByteView data_;
    size_t pos_ = 0;
};

}  // namespace parp
