#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "geosearch/geometry.hpp"
#include "geosearch/toeprints.hpp"

namespace geosearch {

// Closed interval of toeprint IDs.
struct IdInterval {
    uint32_t lo = 0;
    uint32_t hi = 0;

    bool operator==(const IdInterval&) const = default;
};

// Sorts and merges overlapping or adjacent intervals into disjoint runs.
std::vector<IdInterval> normalize_intervals(std::vector<IdInterval> intervals);

// Greedily merges the two runs separated by the smallest ID gap until at most
// `m` remain. Input must be disjoint and ascending.
std::vector<IdInterval> cap_intervals(std::vector<IdInterval> runs, uint32_t m);

// Covers the union of `intervals` with at most k intervals, cutting only at
// the k-1 largest inter-run gaps; that choice minimizes the total covered
// length. Input need not be normalized.
std::vector<IdInterval> compute_sweeps(std::vector<IdInterval> intervals, uint32_t k);

// Row-major indices of all tiles whose cell intersects `rect` (closed
// intersection; `rect` must lie within the unit domain).
std::vector<uint32_t> tile_cover(const Rect& rect, unsigned grid_bits = 10);

// Memory-resident grid over the toeprint ID space: for every tile, up to m
// disjoint ID intervals covering every toeprint that intersects the tile.
// False positives are possible, false negatives never.
class TileGrid {
  public:
    static TileGrid build(std::span<const Toeprint> toeprints, unsigned grid_bits = 10,
                          uint32_t max_intervals = 2);

    unsigned grid_bits() const { return grid_bits_; }
    uint32_t side() const { return 1u << grid_bits_; }
    uint64_t tile_count() const { return static_cast<uint64_t>(side()) * side(); }
    uint32_t max_intervals() const { return max_intervals_; }
    uint32_t toeprint_count() const { return toeprint_count_; }

    std::span<const IdInterval> tile(uint32_t tx, uint32_t ty) const {
        uint64_t t = static_cast<uint64_t>(ty) * side() + tx;
        return {intervals_.data() + offsets_[t], offsets_[t + 1] - offsets_[t]};
    }

    // Appends the interval lists of all tiles intersecting `rect`.
    void collect_intervals(const Rect& rect, std::vector<IdInterval>& out) const;

    void save(const std::filesystem::path& path) const;
    static TileGrid load(const std::filesystem::path& path);

  private:
    unsigned grid_bits_ = 10;
    uint32_t max_intervals_ = 2;
    uint32_t toeprint_count_ = 0;
    std::vector<uint32_t> offsets_;  // tile_count()+1 entries into intervals_
    std::vector<IdInterval> intervals_;
};

}  // namespace geosearch
