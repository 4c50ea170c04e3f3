#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "geosearch/geometry.hpp"
#include "geosearch/io.hpp"
#include "geosearch/io_meter.hpp"

namespace geosearch {

// One footprint region, cut loose from its document and given a dense ID
// along the space-filling curve. Stored on disk in ID order, so ID intervals
// are contiguous byte ranges.
struct Toeprint {
    uint32_t id = 0;
    uint32_t doc_id = 0;
    Rect rect;
    double certainty = 1.0;

    bool operator==(const Toeprint&) const = default;
};

// Tile coordinate of a point at the given grid resolution; clamps 1.0 into
// the last tile.
inline uint32_t tile_coord(double v, unsigned grid_bits) {
    uint32_t side = 1u << grid_bits;
    double scaled = v * static_cast<double>(side);
    if (scaled <= 0.0) {
        return 0;
    }
    uint32_t t = static_cast<uint32_t>(scaled);
    return t >= side ? side - 1 : t;
}

// One toeprint per footprint region. IDs follow ascending Morton code of the
// region's center tile, ties broken by doc ID, then rectangle, then
// certainty, so spatially close regions get close IDs.
std::vector<Toeprint> assign_toeprints(std::span<const std::optional<Footprint>> footprints,
                                       unsigned grid_bits = 10);

// Fixed 48-byte records in ID order: id u32, doc_id u32, rect 4xf64,
// certainty f64, all little-endian.
void write_toeprints(std::span<const Toeprint> toeprints, const std::filesystem::path& path);

class ToeprintStore {
  public:
    static constexpr uint64_t kRecordSize = 48;

    static ToeprintStore open(const std::filesystem::path& path);

    uint32_t count() const { return count_; }

    // One contiguous scan over records [lo, hi]; charges one seek plus the
    // scanned bytes.
    std::vector<Toeprint> fetch_sweep(uint32_t lo, uint32_t hi, IoMeter& meter) const;

    std::vector<Toeprint> read_all() const;

  private:
    RandomAccessFile file_;
    uint32_t count_ = 0;
};

}  // namespace geosearch
