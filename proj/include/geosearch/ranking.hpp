#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <unordered_map>
#include <vector>

#include "geosearch/geometry.hpp"

namespace geosearch {

// Per-query-term inputs to the cosine measure.
struct TermScoreInput {
    uint32_t doc_term_freq = 0;        // f_{D,t}, >= 1
    uint32_t collection_doc_freq = 0;  // f_t, >= 1
};

// Cosine-style term score: sum over query terms of
// ln(1 + n/f_t) * (1 + ln f_{D,t}) / sqrt(|D|). Natural logarithms.
double text_score(std::span<const TermScoreInput> terms, uint32_t n_docs, uint32_t doc_length);

enum class GeoScoreKind {
    inner_product,        // weighted by certainties on both sides
    intersection_volume,  // plain overlap area
};

// Unnormalized inner product of two footprint amplitude functions:
// sum over region pairs of area(r ∩ s) * certainty(r) * certainty(s).
double geo_inner_product(const Footprint& a, const Footprint& b);

// Query mass used for normalization: sum of area * certainty over the query
// regions (certainty dropped for the intersection-volume variant).
double query_mass(const Footprint& query, GeoScoreKind kind);

// Normalized geographic score in [0,1]; zero iff every region pair is
// disjoint. Throws when the query mass is zero.
double geo_score(const Footprint& query, const Footprint& doc,
                 GeoScoreKind kind = GeoScoreKind::inner_product);

// Precomputed global rank (e.g. Pagerank), normalized to [0,1].
// Missing documents score zero.
class GlobalScoreTable {
  public:
    GlobalScoreTable() = default;

    // Loads `doc_id<TAB>pr` lines; values outside [0,1] are rejected.
    static GlobalScoreTable load(const std::filesystem::path& path);

    double get(uint32_t doc_id) const {
        auto it = scores_.find(doc_id);
        return it == scores_.end() ? 0.0 : it->second;
    }
    std::size_t size() const { return scores_.size(); }

  private:
    std::unordered_map<uint32_t, double> scores_;
};

struct ScoreWeights {
    double w_text = 1.0;
    double w_geo = 1.0;
    double w_global = 1.0;
};

inline bool valid_weights(const ScoreWeights& w) {
    return w.w_text >= 0.0 && w.w_geo >= 0.0 && w.w_global >= 0.0 &&
           (w.w_text > 0.0 || w.w_geo > 0.0 || w.w_global > 0.0);
}

struct ScoredHit {
    uint32_t doc_id = 0;
    double text_score = 0.0;
    double geo_score = 0.0;
    double global_score = 0.0;
    double combined = 0.0;
};

inline ScoredHit combined_hit(uint32_t doc_id, double text, double geo, double global,
                              const ScoreWeights& w) {
    return ScoredHit{doc_id, text, geo, global,
                     w.w_text * text + w.w_geo * geo + w.w_global * global};
}

// Descending combined score, ties broken by ascending doc ID.
inline bool hit_before(const ScoredHit& a, const ScoredHit& b) {
    if (a.combined != b.combined) {
        return a.combined > b.combined;
    }
    return a.doc_id < b.doc_id;
}

// The k highest-scoring hits in rank order; all hits when fewer than k.
std::vector<ScoredHit> top_k(std::vector<ScoredHit> hits, uint32_t k_results);

}  // namespace geosearch
