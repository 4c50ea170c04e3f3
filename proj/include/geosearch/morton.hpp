#pragma once

#include <cstdint>
#include <stdexcept>

namespace geosearch {

namespace detail {

// Spreads the low 16 bits of v into the even bit positions.
inline uint32_t part1by1(uint32_t v) {
    v &= 0x0000FFFF;
    v = (v | (v << 8)) & 0x00FF00FF;
    v = (v | (v << 4)) & 0x0F0F0F0F;
    v = (v | (v << 2)) & 0x33333333;
    v = (v | (v << 1)) & 0x55555555;
    return v;
}

inline uint32_t compact1by1(uint32_t v) {
    v &= 0x55555555;
    v = (v | (v >> 1)) & 0x33333333;
    v = (v | (v >> 2)) & 0x0F0F0F0F;
    v = (v | (v >> 4)) & 0x00FF00FF;
    v = (v | (v >> 8)) & 0x0000FFFF;
    return v;
}

}  // namespace detail

// Z-order code of a tile: x in the even (low) bit positions, y in the odd
// ones. 2*bits wide; bits defaults to the 1024x1024 grid.
inline uint32_t morton_encode(uint32_t tile_x, uint32_t tile_y, unsigned bits = 10) {
    if (bits < 1 || bits > 16) {
        throw std::out_of_range("morton_encode: bits must be in [1,16]");
    }
    uint32_t limit = 1u << bits;
    if (tile_x >= limit || tile_y >= limit) {
        throw std::out_of_range("morton_encode: tile coordinate out of range");
    }
    return detail::part1by1(tile_x) | (detail::part1by1(tile_y) << 1);
}

inline uint32_t morton_x(uint32_t code) {
    return detail::compact1by1(code);
}

inline uint32_t morton_y(uint32_t code) {
    return detail::compact1by1(code >> 1);
}

}  // namespace geosearch
