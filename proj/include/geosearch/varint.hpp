#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace geosearch {

// LEB128-style varint: 7 data bits per byte, least-significant group first,
// high bit set while more bytes follow. This layout is part of the on-disk
// index contract and must not change.
inline void put_varint(std::vector<uint8_t>& out, uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<uint8_t>(v) | 0x80);
        v >>= 7;
    }
    out.push_back(static_cast<uint8_t>(v));
}

inline uint64_t get_varint(const uint8_t*& p, const uint8_t* end) {
    uint64_t v = 0;
    unsigned shift = 0;
    for (;;) {
        if (p == end) {
            throw std::runtime_error("varint: truncated input");
        }
        uint8_t b = *p++;
        v |= static_cast<uint64_t>(b & 0x7F) << shift;
        if ((b & 0x80) == 0) {
            return v;
        }
        shift += 7;
        if (shift > 63) {
            throw std::runtime_error("varint: value overflows 64 bits");
        }
    }
}

inline uint32_t get_varint32(const uint8_t*& p, const uint8_t* end) {
    uint64_t v = get_varint(p, end);
    if (v > UINT32_MAX) {
        throw std::runtime_error("varint: value overflows 32 bits");
    }
    return static_cast<uint32_t>(v);
}

}  // namespace geosearch
