#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace geosearch {

// Parameters for the seeded synthetic corpus. Term frequencies follow a Zipf
// law with exponent `zipf_s`; place names are grouped into `n_clusters`
// spatial clusters so geocoding yields clustered footprints.
struct SyntheticSpec {
    uint32_t n_docs = 10'000;
    uint32_t vocab_size = 2'000;
    double zipf_s = 1.0;
    uint32_t n_clusters = 20;
    uint64_t seed = 42;
};

// Shape of a generated query trace. Footprint areas are drawn log-uniformly
// from [min_area_frac, max_area_frac] of the unit domain; terms come from the
// top `term_rank_frac` fraction of the vocabulary by frequency rank.
struct TraceSpec {
    uint32_t n_queries = 200;
    double min_area_frac = 1e-4;
    double max_area_frac = 1.0;
    double term_rank_frac = 0.25;
    uint64_t salt = 0;  // distinguishes multiple traces drawn over one corpus
};

struct SyntheticFiles {
    std::filesystem::path corpus;
    std::filesystem::path gazetteer;
    std::filesystem::path trace;
};

class SyntheticGenerator {
  public:
    explicit SyntheticGenerator(const SyntheticSpec& spec);

    void write_corpus(const std::filesystem::path& path) const;
    void write_gazetteer(const std::filesystem::path& path) const;
    void write_trace(const std::filesystem::path& path, const TraceSpec& trace) const;

    // Writes corpus.tsv, gazetteer.tsv and trace.tsv under `dir`.
    SyntheticFiles write_all(const std::filesystem::path& dir, const TraceSpec& trace = {}) const;

    // Vocabulary term with frequency rank `rank` (0 = most frequent).
    static std::string term_for_rank(uint64_t rank);

  private:
    struct Embed {
        std::string text;  // space-joined place name as embedded in documents
        uint32_t cluster = 0;
        uint32_t token_count = 1;
    };

    SyntheticSpec spec_;
    std::vector<double> zipf_cdf_;
    std::vector<double> cluster_x_, cluster_y_, cluster_r_;
    std::vector<std::string> gazetteer_lines_;
    std::vector<Embed> embeds_;
    std::vector<std::vector<uint32_t>> cluster_places_;
};

}  // namespace geosearch
