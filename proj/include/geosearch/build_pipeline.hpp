#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "geosearch/geocoder.hpp"
#include "geosearch/manifest.hpp"

namespace geosearch {

struct BuildOptions {
    std::filesystem::path corpus;
    std::filesystem::path gazetteer;
    std::filesystem::path out_dir;
    unsigned grid_bits = 10;
    uint32_t m = 2;
    uint64_t gap_kib = 64;
    bool store_positions = true;
    std::optional<std::filesystem::path> global_scores;
    GeocoderParams geocoder;
};

// Runs the whole indexing pipeline: ingest, geocode, inverted index,
// footprint store (with MBR metadata), toeprints, tile grid, manifest.
// Stage failures are reported with the stage name; partial outputs are
// removed and no manifest is written.
IndexManifest build_all(const BuildOptions& options);

}  // namespace geosearch
