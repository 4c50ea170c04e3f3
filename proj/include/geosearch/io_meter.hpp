#pragma once

#include <cstdint>

namespace geosearch {

// Per-query I/O accounting. One meter per query execution; categories are
// charged by the structure that performs the read. Memory-resident
// structures (lexicon, tile grid, MBR tree, doc lengths) are never charged.
struct IoMeter {
    uint64_t postings_bytes = 0;
    uint64_t footprint_bytes = 0;
    uint64_t toeprint_bytes = 0;
    uint64_t seek_count = 0;

    uint64_t total_bytes() const { return postings_bytes + footprint_bytes + toeprint_bytes; }

    IoMeter& operator+=(const IoMeter& o) {
        postings_bytes += o.postings_bytes;
        footprint_bytes += o.footprint_bytes;
        toeprint_bytes += o.toeprint_bytes;
        seek_count += o.seek_count;
        return *this;
    }
};

}  // namespace geosearch
