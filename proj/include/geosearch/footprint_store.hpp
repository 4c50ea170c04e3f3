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

struct FootprintRecord {
    uint32_t doc_id = 0;
    Footprint footprint;
};

// One row of the offset table: where a document's record lives in
// footprints.bin, plus the footprint's bounding box (the Geo-First MBR
// metadata, so opening an index never has to scan the record file).
struct FootprintOffsetEntry {
    uint32_t doc_id = 0;
    uint64_t offset = 0;  // absolute file offset of the record
    uint32_t length = 0;  // record length in bytes
    Rect mbr;
};

// Disk ranges to read for one request. Records closer than the gap threshold
// share a run; a larger gap starts a new run (a forward seek).
struct FetchPlan {
    struct Run {
        uint64_t begin = 0;
        uint64_t end = 0;  // half-open
    };
    std::vector<Run> runs;
    std::vector<uint32_t> doc_ids;

    uint64_t total_bytes() const {
        uint64_t sum = 0;
        for (const Run& r : runs) {
            sum += r.end - r.begin;
        }
        return sum;
    }
};

// Pass as the gap threshold to always merge (a single run).
constexpr uint64_t kNoGapLimit = UINT64_MAX;

// Planning rule on its own, usable against any offset table. `doc_ids` must
// be strictly ascending and present in the table.
FetchPlan plan_fetch(std::span<const FootprintOffsetEntry> table, std::span<const uint32_t> doc_ids,
                     uint64_t gap_threshold_bytes);

// Serializes footprints ascending by doc ID. Documents without a footprint
// (empty optional) get no record. Record layout: doc_id u32, region count
// u16, then per region four f64 coordinates and one f64 certainty, all
// little-endian.
void write_footprint_store(std::span<const std::optional<Footprint>> footprints,
                           const std::filesystem::path& bin_path,
                           const std::filesystem::path& idx_path);

class FootprintStore {
  public:
    static FootprintStore open(const std::filesystem::path& bin_path,
                               const std::filesystem::path& idx_path);

    const std::vector<FootprintOffsetEntry>& entries() const { return entries_; }
    const FootprintOffsetEntry* lookup(uint32_t doc_id) const;

    FetchPlan plan(std::span<const uint32_t> doc_ids, uint64_t gap_threshold_bytes) const {
        return plan_fetch(entries_, doc_ids, gap_threshold_bytes);
    }

    // Executes a plan: one seek and one contiguous read per run, gap bytes
    // included. Returns exactly the requested footprints in doc ID order.
    std::vector<FootprintRecord> fetch(const FetchPlan& plan, IoMeter& meter) const;

    // Reads every record sequentially, bypassing the meter (used to build
    // in-memory oracles, not by the query paths).
    std::vector<FootprintRecord> read_all() const;

  private:
    std::vector<FootprintOffsetEntry> entries_;
    RandomAccessFile bin_;
};

}  // namespace geosearch
