#include "geosearch/tile_grid.hpp"

#include <algorithm>
#include <stdexcept>

#include "geosearch/io.hpp"
#include "geosearch/varint.hpp"

namespace geosearch {

namespace {

constexpr char kGridMagic[4] = {'G', 'S', 'G', 'R'};

struct TileRange {
    uint32_t x0, x1, y0, y1;  // inclusive
};

TileRange tile_range(const Rect& rect, unsigned grid_bits) {
    return {tile_coord(rect.xmin, grid_bits), tile_coord(rect.xmax, grid_bits),
            tile_coord(rect.ymin, grid_bits), tile_coord(rect.ymax, grid_bits)};
}

}  // namespace

std::vector<IdInterval> normalize_intervals(std::vector<IdInterval> intervals) {
    for (const IdInterval& iv : intervals) {
        if (iv.lo > iv.hi) {
            throw std::invalid_argument("interval with lo > hi");
        }
    }
    std::sort(intervals.begin(), intervals.end(),
              [](const IdInterval& a, const IdInterval& b) {
                  return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
              });
    std::vector<IdInterval> out;
    for (const IdInterval& iv : intervals) {
        // Adjacent runs ([a,b],[b+1,c]) merge too: they cover one ID range.
        if (!out.empty() && (iv.lo <= out.back().hi || iv.lo - out.back().hi == 1)) {
            out.back().hi = std::max(out.back().hi, iv.hi);
        } else {
            out.push_back(iv);
        }
    }
    return out;
}

std::vector<IdInterval> cap_intervals(std::vector<IdInterval> runs, uint32_t m) {
    if (m < 1) {
        throw std::invalid_argument("cap_intervals: m must be >= 1");
    }
    while (runs.size() > m) {
        std::size_t best = 0;
        uint32_t best_gap = UINT32_MAX;
        for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
            uint32_t gap = runs[i + 1].lo - runs[i].hi;
            if (gap < best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        runs[best].hi = runs[best + 1].hi;
        runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(best) + 1);
    }
    return runs;
}

std::vector<IdInterval> compute_sweeps(std::vector<IdInterval> intervals, uint32_t k) {
    if (k < 1) {
        throw std::invalid_argument("compute_sweeps: k must be >= 1");
    }
    std::vector<IdInterval> runs = normalize_intervals(std::move(intervals));
    if (runs.size() <= k) {
        return runs;
    }

    // Keep the k-1 widest gaps; closing all others covers the least length.
    std::vector<std::size_t> gap_order(runs.size() - 1);
    for (std::size_t i = 0; i < gap_order.size(); ++i) {
        gap_order[i] = i;
    }
    std::sort(gap_order.begin(), gap_order.end(), [&](std::size_t a, std::size_t b) {
        uint32_t ga = runs[a + 1].lo - runs[a].hi;
        uint32_t gb = runs[b + 1].lo - runs[b].hi;
        return ga != gb ? ga > gb : a < b;
    });
    std::vector<bool> cut(runs.size() - 1, false);
    for (std::size_t i = 0; i < k - 1; ++i) {
        cut[gap_order[i]] = true;
    }

    std::vector<IdInterval> sweeps;
    sweeps.push_back(runs.front());
    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (cut[i - 1]) {
            sweeps.push_back(runs[i]);
        } else {
            sweeps.back().hi = runs[i].hi;
        }
    }
    return sweeps;
}

std::vector<uint32_t> tile_cover(const Rect& rect, unsigned grid_bits) {
    if (!in_unit_domain(rect)) {
        throw std::invalid_argument("tile_cover: rect must lie within the unit domain");
    }
    TileRange r = tile_range(rect, grid_bits);
    std::vector<uint32_t> tiles;
    tiles.reserve(static_cast<std::size_t>(r.x1 - r.x0 + 1) * (r.y1 - r.y0 + 1));
    for (uint32_t ty = r.y0; ty <= r.y1; ++ty) {
        for (uint32_t tx = r.x0; tx <= r.x1; ++tx) {
            tiles.push_back(ty * (1u << grid_bits) + tx);
        }
    }
    return tiles;
}

TileGrid TileGrid::build(std::span<const Toeprint> toeprints, unsigned grid_bits,
                         uint32_t max_intervals) {
    if (max_intervals < 1) {
        throw std::invalid_argument("TileGrid: max_intervals must be >= 1");
    }
    if (grid_bits < 1 || grid_bits > 16) {
        throw std::invalid_argument("TileGrid: grid_bits must be in [1,16]");
    }
    TileGrid grid;
    grid.grid_bits_ = grid_bits;
    grid.max_intervals_ = max_intervals;
    grid.toeprint_count_ = static_cast<uint32_t>(toeprints.size());

    const uint64_t tiles = grid.tile_count();
    const uint32_t side = grid.side();

    // Toeprints come in ID order, so each tile's runs can be grown in place.
    std::vector<std::vector<IdInterval>> per_tile(tiles);
    uint32_t expected_id = 0;
    for (const Toeprint& t : toeprints) {
        if (t.id != expected_id++) {
            throw std::invalid_argument("TileGrid: toeprints must be dense and in ID order");
        }
        TileRange r = tile_range(t.rect, grid_bits);
        for (uint32_t ty = r.y0; ty <= r.y1; ++ty) {
            for (uint32_t tx = r.x0; tx <= r.x1; ++tx) {
                auto& runs = per_tile[static_cast<uint64_t>(ty) * side + tx];
                if (!runs.empty() && runs.back().hi + 1 == t.id) {
                    runs.back().hi = t.id;
                } else {
                    runs.push_back({t.id, t.id});
                }
            }
        }
    }

    grid.offsets_.assign(tiles + 1, 0);
    for (uint64_t t = 0; t < tiles; ++t) {
        if (per_tile[t].size() > max_intervals) {
            per_tile[t] = cap_intervals(std::move(per_tile[t]), max_intervals);
        }
        grid.offsets_[t + 1] = grid.offsets_[t] + static_cast<uint32_t>(per_tile[t].size());
    }
    grid.intervals_.reserve(grid.offsets_[tiles]);
    for (uint64_t t = 0; t < tiles; ++t) {
        grid.intervals_.insert(grid.intervals_.end(), per_tile[t].begin(), per_tile[t].end());
    }
    return grid;
}

void TileGrid::collect_intervals(const Rect& rect, std::vector<IdInterval>& out) const {
    TileRange r = tile_range(rect, grid_bits_);
    for (uint32_t ty = r.y0; ty <= r.y1; ++ty) {
        uint64_t row = static_cast<uint64_t>(ty) * side();
        uint32_t begin = offsets_[row + r.x0];
        uint32_t end = offsets_[row + r.x1 + 1];
        // Tiles are contiguous within a row, so one span covers the x range.
        out.insert(out.end(), intervals_.begin() + begin, intervals_.begin() + end);
    }
}

void TileGrid::save(const std::filesystem::path& path) const {
    FileWriter out(path, kGridMagic);
    out.put_u8(static_cast<uint8_t>(grid_bits_));
    out.put_u32(max_intervals_);
    out.put_u32(toeprint_count_);

    std::vector<uint8_t> buf;
    for (uint64_t t = 0; t < tile_count(); ++t) {
        buf.clear();
        uint32_t begin = offsets_[t];
        uint32_t end = offsets_[t + 1];
        put_varint(buf, end - begin);
        uint32_t prev_hi = 0;
        for (uint32_t i = begin; i < end; ++i) {
            const IdInterval& iv = intervals_[i];
            put_varint(buf, i == begin ? iv.lo : iv.lo - prev_hi);
            put_varint(buf, iv.hi - iv.lo);
            prev_hi = iv.hi;
        }
        out.put_bytes(buf.data(), buf.size());
    }
    out.close();
}

TileGrid TileGrid::load(const std::filesystem::path& path) {
    std::vector<uint8_t> payload = read_payload(path, kGridMagic);
    ByteCursor cur(payload.data(), payload.data() + payload.size(), path.string());

    TileGrid grid;
    grid.grid_bits_ = cur.u8();
    if (grid.grid_bits_ < 1 || grid.grid_bits_ > 16) {
        throw std::runtime_error(path.string() + ": grid_bits out of range");
    }
    grid.max_intervals_ = cur.u32();
    grid.toeprint_count_ = cur.u32();

    const uint64_t tiles = grid.tile_count();
    grid.offsets_.assign(tiles + 1, 0);
    for (uint64_t t = 0; t < tiles; ++t) {
        uint32_t count = cur.varint32();
        uint32_t prev_hi = 0;
        for (uint32_t i = 0; i < count; ++i) {
            IdInterval iv;
            iv.lo = (i == 0 ? cur.varint32() : prev_hi + cur.varint32());
            iv.hi = iv.lo + cur.varint32();
            prev_hi = iv.hi;
            grid.intervals_.push_back(iv);
        }
        grid.offsets_[t + 1] = static_cast<uint32_t>(grid.intervals_.size());
    }
    if (!cur.at_end()) {
        throw std::runtime_error(path.string() + ": trailing bytes after tile data");
    }
    return grid;
}

}  // namespace geosearch
