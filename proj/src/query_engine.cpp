#include "geosearch/query_engine.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace geosearch {

std::string_view algo_name(Algo algo) {
    switch (algo) {
        case Algo::text_first: return "text-first";
        case Algo::geo_first: return "geo-first";
        case Algo::k_sweep: return "k-sweep";
        case Algo::oracle: return "oracle";
    }
    return "?";
}

std::optional<Algo> algo_from_name(std::string_view name) {
    if (name == "text-first") return Algo::text_first;
    if (name == "geo-first") return Algo::geo_first;
    if (name == "k-sweep") return Algo::k_sweep;
    if (name == "oracle") return Algo::oracle;
    return std::nullopt;
}

QueryEngine QueryEngine::open(const IndexManifest& manifest, const EngineOptions& options) {
    manifest.validate();
    if (!valid_weights(options.weights)) {
        throw std::invalid_argument("engine: at least one score weight must be positive");
    }

    QueryEngine engine;
    engine.index_ = InvertedIndex::open(manifest.index_paths());
    engine.footprints_ = FootprintStore::open(manifest.footprints, manifest.footprints_idx);
    engine.toeprints_ = ToeprintStore::open(manifest.toeprints);
    engine.grid_ = TileGrid::load(manifest.grid);
    if (manifest.global_scores) {
        engine.globals_ = GlobalScoreTable::load(*manifest.global_scores);
    }
    engine.weights_ = options.weights;
    engine.geo_kind_ = options.geo_kind;
    engine.gap_bytes_ = options.gap_bytes.value_or(manifest.gap_bytes);

    // The tree is memory-resident, rebuilt from the MBR metadata in the
    // offset table; the record file itself is not touched.
    std::vector<std::pair<Rect, uint32_t>> items;
    items.reserve(engine.footprints_.entries().size());
    for (const FootprintOffsetEntry& e : engine.footprints_.entries()) {
        items.emplace_back(e.mbr, e.doc_id);
    }
    engine.mbr_tree_ = MbrTree::build(items);
    return engine;
}

std::vector<std::string> QueryEngine::normalized_terms(const Query& query) const {
    std::vector<std::string> terms = query.terms;
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    return terms;
}

void QueryEngine::validate(const Query& query) const {
    if (query.terms.empty()) {
        throw std::invalid_argument("query: term set is empty");
    }
    if (!valid_footprint(query.footprint)) {
        throw std::invalid_argument("query: footprint must be non-empty rectangles inside the unit domain");
    }
    if (query.k_results < 1) {
        throw std::invalid_argument("query: k_results must be >= 1");
    }
}

QueryEngine::ScoreContext QueryEngine::score_context(std::span<const std::string> terms) const {
    ScoreContext ctx;
    ctx.entries.reserve(terms.size());
    for (const std::string& term : terms) {
        ctx.entries.push_back(index_.find(term));
    }
    return ctx;
}

std::optional<ScoredHit> QueryEngine::score_doc(uint32_t doc_id, std::span<const uint32_t> freqs,
                                                const Footprint& doc_footprint, const Query& query,
                                                const ScoreContext& ctx) const {
    double geo = geo_score(query.footprint, doc_footprint, geo_kind_);
    if (!(geo > 0.0)) {
        return std::nullopt;
    }
    std::vector<TermScoreInput> inputs(freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        inputs[i] = {freqs[i], ctx.entries[i]->doc_freq};
    }
    double text = text_score(inputs, index_.stats().n, index_.doc_length(doc_id));
    return combined_hit(doc_id, text, geo, globals_.get(doc_id), weights_);
}

QueryReport QueryEngine::run(Algo algo, const Query& query) const {
    switch (algo) {
        case Algo::text_first: return text_first(query);
        case Algo::geo_first: return geo_first(query);
        case Algo::k_sweep: return k_sweep(query);
        case Algo::oracle: {
            QueryReport report;
            report.hits = brute_force(query);
            return report;
        }
    }
    throw std::invalid_argument("unknown algorithm");
}

QueryReport QueryEngine::text_first(const Query& query) const {
    validate(query);
    std::vector<std::string> terms = normalized_terms(query);
    ScoreContext ctx = score_context(terms);
    QueryReport report;

    DaatResult daat = index_.daat_stream(terms, &report.io);
    report.stages.push_back({"daat", daat.doc_ids.size()});

    // Only documents with footprint records can score geographically.
    std::vector<uint32_t> present;
    std::vector<std::size_t> rows;
    for (std::size_t row = 0; row < daat.doc_ids.size(); ++row) {
        if (footprints_.lookup(daat.doc_ids[row]) != nullptr) {
            present.push_back(daat.doc_ids[row]);
            rows.push_back(row);
        }
    }
    report.stages.push_back({"footprints_requested", present.size()});

    FetchPlan plan = footprints_.plan(present, gap_bytes_);
    std::vector<FootprintRecord> records = footprints_.fetch(plan, report.io);

    std::vector<ScoredHit> hits;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (auto hit = score_doc(records[i].doc_id, daat.freqs_of(rows[i]), records[i].footprint,
                                 query, ctx)) {
            hits.push_back(*hit);
        }
    }
    report.stages.push_back({"geo_matched", hits.size()});
    report.hits = top_k(std::move(hits), query.k_results);
    return report;
}

QueryReport QueryEngine::geo_first(const Query& query) const {
    validate(query);
    std::vector<std::string> terms = normalized_terms(query);
    ScoreContext ctx = score_context(terms);
    QueryReport report;

    std::vector<uint32_t> spatial = mbr_tree_.query(query.footprint.bounds());
    report.stages.push_back({"mbr_candidates", spatial.size()});

    DaatResult filtered = index_.filter_docids_scored(spatial, terms, &report.io);
    report.stages.push_back({"index_filtered", filtered.doc_ids.size()});

    FetchPlan plan = footprints_.plan(filtered.doc_ids, gap_bytes_);
    std::vector<FootprintRecord> records = footprints_.fetch(plan, report.io);

    std::vector<ScoredHit> hits;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (auto hit = score_doc(records[i].doc_id, filtered.freqs_of(i), records[i].footprint,
                                 query, ctx)) {
            hits.push_back(*hit);
        }
    }
    report.stages.push_back({"geo_matched", hits.size()});
    report.hits = top_k(std::move(hits), query.k_results);
    return report;
}

QueryReport QueryEngine::k_sweep(const Query& query) const {
    validate(query);
    if (query.k_sweeps < grid_.max_intervals()) {
        throw std::invalid_argument("query: k_sweeps must be >= the grid's intervals-per-tile bound");
    }
    std::vector<std::string> terms = normalized_terms(query);
    ScoreContext ctx = score_context(terms);
    QueryReport report;

    // Step 1: interval union over all tiles intersecting the query footprint.
    std::vector<IdInterval> intervals;
    for (const FootprintRegion& region : query.footprint.regions) {
        grid_.collect_intervals(region.rect, intervals);
    }
    std::vector<IdInterval> sweeps = compute_sweeps(std::move(intervals), query.k_sweeps);
    report.stages.push_back({"sweeps", sweeps.size()});

    // Step 2: up to k contiguous scans.
    std::vector<Toeprint> fetched;
    for (const IdInterval& sweep : sweeps) {
        std::vector<Toeprint> part = toeprints_.fetch_sweep(sweep.lo, sweep.hi, report.io);
        fetched.insert(fetched.end(), part.begin(), part.end());
    }
    report.stages.push_back({"toeprints_fetched", fetched.size()});

    // Sweep padding brings along toeprints that cannot contribute; drop them
    // before translating to doc IDs.
    std::erase_if(fetched, [&](const Toeprint& t) {
        for (const FootprintRegion& region : query.footprint.regions) {
            if (region.rect.intersects(t.rect)) {
                return false;
            }
        }
        return true;
    });
    report.stages.push_back({"toeprints_intersecting", fetched.size()});

    // Step 3: translate to doc IDs, sort, filter through the inverted index.
    std::map<uint32_t, Footprint> doc_regions;
    for (const Toeprint& t : fetched) {
        doc_regions[t.doc_id].regions.push_back({t.rect, t.certainty});
    }
    std::vector<uint32_t> candidates;
    candidates.reserve(doc_regions.size());
    for (const auto& [doc, fp] : doc_regions) {
        candidates.push_back(doc);
    }
    report.stages.push_back({"docs_candidate", candidates.size()});

    DaatResult filtered = index_.filter_docids_scored(candidates, terms, &report.io);
    report.stages.push_back({"index_filtered", filtered.doc_ids.size()});

    // Step 4: geo scores from the toeprints fetched in step 2. Regions outside
    // every sweep cannot intersect the query footprint, so scoring the fetched
    // subset (in canonical region order) equals scoring the full footprint.
    std::vector<ScoredHit> hits;
    for (std::size_t i = 0; i < filtered.doc_ids.size(); ++i) {
        Footprint& fp = doc_regions[filtered.doc_ids[i]];
        std::sort(fp.regions.begin(), fp.regions.end(), region_less);
        if (auto hit = score_doc(filtered.doc_ids[i], filtered.freqs_of(i), fp, query, ctx)) {
            hits.push_back(*hit);
        }
    }
    report.stages.push_back({"geo_matched", hits.size()});
    report.hits = top_k(std::move(hits), query.k_results);
    return report;
}

const QueryEngine::OracleImage& QueryEngine::oracle_image() const {
    std::lock_guard<std::mutex> lock(*oracle_mutex_);
    if (!oracle_) {
        auto image = std::make_unique<OracleImage>();
        image->doc_terms.resize(index_.stats().n);
        // Lexicon order is ascending, so per-doc term lists come out sorted.
        for (uint32_t term_id = 0; term_id < index_.lexicon().size(); ++term_id) {
            const LexiconEntry& entry = index_.lexicon()[term_id];
            std::vector<uint8_t> run = index_.read_run(entry, nullptr);
            for (const Posting& p : decode_postings(run, index_.has_positions())) {
                image->doc_terms.at(p.doc_id).emplace_back(term_id, p.freq);
            }
        }
        image->footprints.resize(index_.stats().n);
        for (FootprintRecord& rec : footprints_.read_all()) {
            image->footprints.at(rec.doc_id) = std::move(rec.footprint);
        }
        oracle_ = std::move(image);
    }
    return *oracle_;
}

std::vector<ScoredHit> QueryEngine::brute_force(const Query& query) const {
    validate(query);
    std::vector<std::string> terms = normalized_terms(query);
    ScoreContext ctx = score_context(terms);
    const OracleImage& image = oracle_image();

    std::vector<uint32_t> term_ids(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (ctx.entries[i] == nullptr) {
            return {};  // a term absent from the collection matches nothing
        }
        term_ids[i] = static_cast<uint32_t>(ctx.entries[i] - index_.lexicon().data());
    }

    std::vector<ScoredHit> hits;
    std::vector<uint32_t> freqs(terms.size());
    for (uint32_t doc = 0; doc < image.doc_terms.size(); ++doc) {
        const auto& doc_terms = image.doc_terms[doc];
        bool all = true;
        for (std::size_t i = 0; i < term_ids.size(); ++i) {
            auto it = std::lower_bound(doc_terms.begin(), doc_terms.end(),
                                       std::pair<uint32_t, uint32_t>{term_ids[i], 0});
            if (it == doc_terms.end() || it->first != term_ids[i]) {
                all = false;
                break;
            }
            freqs[i] = it->second;
        }
        if (!all || !image.footprints[doc]) {
            continue;
        }
        if (auto hit = score_doc(doc, freqs, *image.footprints[doc], query, ctx)) {
            hits.push_back(*hit);
        }
    }
    return top_k(std::move(hits), query.k_results);
}

}  // namespace geosearch
