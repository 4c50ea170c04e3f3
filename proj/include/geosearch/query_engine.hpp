#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geosearch/footprint_store.hpp"
#include "geosearch/geometry.hpp"
#include "geosearch/inverted_index.hpp"
#include "geosearch/manifest.hpp"
#include "geosearch/ranking.hpp"
#include "geosearch/rtree.hpp"
#include "geosearch/tile_grid.hpp"
#include "geosearch/toeprints.hpp"

namespace geosearch {

enum class Algo { text_first, geo_first, k_sweep, oracle };

std::string_view algo_name(Algo algo);
std::optional<Algo> algo_from_name(std::string_view name);

struct Query {
    std::vector<std::string> terms;  // non-empty set; duplicates are ignored
    Footprint footprint;             // usually one rectangle at certainty 1
    uint32_t k_results = 10;
    uint32_t k_sweeps = 4;           // K-Sweep only; must be >= the grid's m
};

struct StageCount {
    const char* stage;
    uint64_t count;
};

struct QueryReport {
    std::vector<ScoredHit> hits;
    IoMeter io;
    std::vector<StageCount> stages;
};

struct EngineOptions {
    ScoreWeights weights;
    GeoScoreKind geo_kind = GeoScoreKind::inner_product;
    std::optional<uint64_t> gap_bytes;  // overrides the manifest's value
};

// Immutable query-processing core over one opened index. The three access
// paths return identical ranked results and differ only in I/O cost.
class QueryEngine {
  public:
    static QueryEngine open(const IndexManifest& manifest, const EngineOptions& options = {});

    QueryReport run(Algo algo, const Query& query) const;
    QueryReport text_first(const Query& query) const;
    QueryReport geo_first(const Query& query) const;
    QueryReport k_sweep(const Query& query) const;

    // Full-scan reference ranking over the in-memory collection image.
    // Performs no metered I/O; ground truth for the three algorithms.
    std::vector<ScoredHit> brute_force(const Query& query) const;

    const InvertedIndex& index() const { return index_; }
    const FootprintStore& footprint_store() const { return footprints_; }
    const ToeprintStore& toeprint_store() const { return toeprints_; }
    const TileGrid& grid() const { return grid_; }
    const MbrTree& mbr_tree() const { return mbr_tree_; }
    uint64_t gap_bytes() const { return gap_bytes_; }
    const ScoreWeights& weights() const { return weights_; }

  private:
    QueryEngine() = default;

    // Sorted unique copy of the query's terms; the shared scoring order.
    std::vector<std::string> normalized_terms(const Query& query) const;
    void validate(const Query& query) const;

    struct ScoreContext {
        std::vector<const LexiconEntry*> entries;  // aligned with normalized terms
    };
    ScoreContext score_context(std::span<const std::string> terms) const;
    std::optional<ScoredHit> score_doc(uint32_t doc_id, std::span<const uint32_t> freqs,
                                       const Footprint& doc_footprint, const Query& query,
                                       const ScoreContext& ctx) const;

    struct OracleImage {
        // Per document: (term_id, freq) pairs ascending by term_id.
        std::vector<std::vector<std::pair<uint32_t, uint32_t>>> doc_terms;
        std::vector<std::optional<Footprint>> footprints;
    };
    const OracleImage& oracle_image() const;

    InvertedIndex index_;
    FootprintStore footprints_;
    ToeprintStore toeprints_;
    TileGrid grid_;
    MbrTree mbr_tree_;
    GlobalScoreTable globals_;
    ScoreWeights weights_;
    GeoScoreKind geo_kind_ = GeoScoreKind::inner_product;
    uint64_t gap_bytes_ = 64 * 1024;

    mutable std::unique_ptr<std::mutex> oracle_mutex_ = std::make_unique<std::mutex>();
    mutable std::unique_ptr<OracleImage> oracle_;
};

}  // namespace geosearch
