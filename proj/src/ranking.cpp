#include "geosearch/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace geosearch {

double text_score(std::span<const TermScoreInput> terms, uint32_t n_docs, uint32_t doc_length) {
    if (doc_length < 1) {
        throw std::invalid_argument("text_score: document length must be >= 1");
    }
    double denom = std::sqrt(static_cast<double>(doc_length));
    double score = 0.0;
    for (const TermScoreInput& t : terms) {
        if (t.doc_term_freq < 1 || t.collection_doc_freq < 1) {
            throw std::invalid_argument("text_score: frequencies must be >= 1");
        }
        double idf = std::log(1.0 + static_cast<double>(n_docs) / t.collection_doc_freq);
        double tf = 1.0 + std::log(static_cast<double>(t.doc_term_freq));
        score += idf * tf / denom;
    }
    return score;
}

double geo_inner_product(const Footprint& a, const Footprint& b) {
    double sum = 0.0;
    for (const FootprintRegion& r : a.regions) {
        for (const FootprintRegion& s : b.regions) {
            sum += intersection_area(r.rect, s.rect) * r.certainty * s.certainty;
        }
    }
    return sum;
}

double query_mass(const Footprint& query, GeoScoreKind kind) {
    double mass = 0.0;
    for (const FootprintRegion& r : query.regions) {
        mass += r.rect.area() * (kind == GeoScoreKind::inner_product ? r.certainty : 1.0);
    }
    return mass;
}

double geo_score(const Footprint& query, const Footprint& doc, GeoScoreKind kind) {
    double mass = query_mass(query, kind);
    if (!(mass > 0.0)) {
        throw std::invalid_argument("geo_score: query footprint has zero mass");
    }
    double sum = 0.0;
    if (kind == GeoScoreKind::inner_product) {
        sum = geo_inner_product(query, doc);
    } else {
        for (const FootprintRegion& r : query.regions) {
            for (const FootprintRegion& s : doc.regions) {
                sum += intersection_area(r.rect, s.rect);
            }
        }
    }
    return std::min(1.0, sum / mass);
}

GlobalScoreTable GlobalScoreTable::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error(path.string() + ": cannot open global score file");
    }
    GlobalScoreTable table;
    std::string line;
    uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        uint32_t doc_id;
        double pr;
        if (!(fields >> doc_id >> pr)) {
            throw std::runtime_error(path.string() + " line " + std::to_string(line_no) +
                                     ": expected doc_id<TAB>pr");
        }
        if (!(pr >= 0.0 && pr <= 1.0)) {
            throw std::runtime_error(path.string() + " line " + std::to_string(line_no) +
                                     ": pr must be in [0,1]");
        }
        table.scores_[doc_id] = pr;
    }
    return table;
}

std::vector<ScoredHit> top_k(std::vector<ScoredHit> hits, uint32_t k_results) {
    if (k_results < 1) {
        throw std::invalid_argument("top_k: k_results must be >= 1");
    }
    if (hits.size() > k_results) {
        std::partial_sort(hits.begin(), hits.begin() + k_results, hits.end(), hit_before);
        hits.resize(k_results);
    } else {
        std::sort(hits.begin(), hits.end(), hit_before);
    }
    return hits;
}

}  // namespace geosearch
