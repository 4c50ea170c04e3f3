#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "geosearch/inverted_index.hpp"

namespace geosearch {

// Plain-text `key=value` manifest tying one index directory together. File
// paths are stored relative to the directory.
struct IndexManifest {
    std::filesystem::path dir;
    uint32_t format_version = 1;
    unsigned grid_bits = 10;
    uint32_t m = 2;                   // intervals per tile
    uint64_t gap_bytes = 64 * 1024;   // footprint fetch gap threshold

    std::filesystem::path lexicon;
    std::filesystem::path postings;
    std::filesystem::path doclens;
    std::filesystem::path footprints;
    std::filesystem::path footprints_idx;
    std::filesystem::path toeprints;
    std::filesystem::path grid;
    std::optional<std::filesystem::path> global_scores;

    static IndexManifest load(const std::filesystem::path& index_dir);
    void save() const;

    // Every referenced file must exist and carry the expected magic/version.
    void validate() const;

    // The file entries, in manifest order (global scores last, if present).
    std::vector<std::filesystem::path> files() const;

    IndexPaths index_paths() const { return {lexicon, postings, doclens}; }
};

}  // namespace geosearch
