#include <doctest.h>

#include <map>
#include <string>

#include "geosearch/bench.hpp"
#include "geosearch/query_engine.hpp"
#include "support/fixtures.hpp"

using namespace geosearch;

namespace {

const QueryEngine& fixture_engine() {
    static QueryEngine engine = QueryEngine::open(testfx::small_fixture().manifest);
    return engine;
}

std::vector<Query> fixture_trace() {
    return load_trace(testfx::small_fixture().files.trace);
}

Query simple_query(std::vector<std::string> terms, Rect rect, uint32_t k = 10) {
    Query q;
    q.terms = std::move(terms);
    q.footprint = single_rect_footprint(rect);
    q.k_results = k;
    return q;
}

uint64_t stage(const QueryReport& report, const char* name) {
    for (const StageCount& s : report.stages) {
        if (std::string_view(s.stage) == name) {
            return s.count;
        }
    }
    FAIL("missing stage ", name);
    return 0;
}

// A corpus where one term matches everything but footprints sit in two far
// clusters; spatially selective queries then separate the access paths.
const IndexManifest& contrast_manifest() {
    static IndexManifest manifest = [] {
        auto dir = testfx::fresh_dir("contrast");
        std::string corpus;
        for (int i = 0; i < 200; ++i) {
            corpus += "site" + std::to_string(i / 4) + "\tcommon filler" +
                      (i % 2 == 0 ? " west westcity" : " east eastcity") + " text\n";
        }
        testfx::write_file(dir / "corpus.tsv", corpus);
        testfx::write_file(dir / "gaz.tsv",
                           "westcity\t0.10 0.10 0.14 0.14\tcity\n"
                           "eastcity\t0.80 0.80 0.84 0.84\tcity\n");
        BuildOptions options;
        options.corpus = dir / "corpus.tsv";
        options.gazetteer = dir / "gaz.tsv";
        options.out_dir = dir / "idx";
        options.m = 1;  // also serves the single-sweep test below
        return build_all(options);
    }();
    return manifest;
}

}  // namespace

TEST_SUITE("query_engine") {

TEST_CASE("unknown terms produce an empty result at zero footprint cost") {
    QueryReport report = fixture_engine().text_first(simple_query({"nosuchterm"}, {0, 0, 1, 1}));
    CHECK(report.hits.empty());
    CHECK(report.io.footprint_bytes == 0);

    QueryReport geo = fixture_engine().geo_first(simple_query({"nosuchterm"}, {0, 0, 1, 1}));
    CHECK(geo.hits.empty());
    QueryReport ks = fixture_engine().k_sweep(simple_query({"nosuchterm"}, {0, 0, 1, 1}));
    CHECK(ks.hits.empty());
    CHECK(fixture_engine().brute_force(simple_query({"nosuchterm"}, {0, 0, 1, 1})).empty());
}

TEST_CASE("a full-domain footprint reduces text-first to conjunctive text ranking") {
    std::vector<std::string> terms = {SyntheticGenerator::term_for_rank(0)};
    Query q = simple_query(terms, {0, 0, 1, 1}, 10000);
    QueryReport report = fixture_engine().text_first(q);

    // Every geocoded document containing the term must appear: the query
    // intersects every footprint.
    const InvertedIndex& idx = fixture_engine().index();
    DaatResult daat = idx.daat_stream(terms);
    uint64_t geocoded = 0;
    for (uint32_t doc : daat.doc_ids) {
        geocoded += fixture_engine().footprint_store().lookup(doc) != nullptr ? 1 : 0;
    }
    CHECK(report.hits.size() == geocoded);
    for (const ScoredHit& h : report.hits) {
        CHECK(h.geo_score > 0.0);
    }
}

TEST_CASE("all three algorithms match brute force over the fixture trace") {
    const QueryEngine& engine = fixture_engine();
    std::vector<Query> queries = fixture_trace();
    REQUIRE(queries.size() == 40);
    for (const Query& q : queries) {
        std::vector<ScoredHit> oracle = engine.brute_force(q);
        for (Algo algo : {Algo::text_first, Algo::geo_first, Algo::k_sweep}) {
            QueryReport report = engine.run(algo, q);
            auto mismatch = compare_rankings(oracle, report.hits);
            if (mismatch) {
                FAIL(algo_name(algo), ": ", *mismatch);
            }
        }
    }
}

TEST_CASE("stage counters never grow along a pipeline") {
    const QueryEngine& engine = fixture_engine();
    for (const Query& q : fixture_trace()) {
        QueryReport tf = engine.text_first(q);
        CHECK(stage(tf, "daat") >= stage(tf, "footprints_requested"));
        CHECK(stage(tf, "footprints_requested") >= stage(tf, "geo_matched"));

        QueryReport gf = engine.geo_first(q);
        CHECK(stage(gf, "mbr_candidates") >= stage(gf, "index_filtered"));
        CHECK(stage(gf, "index_filtered") >= stage(gf, "geo_matched"));

        QueryReport ks = engine.k_sweep(q);
        CHECK(stage(ks, "toeprints_fetched") >= stage(ks, "toeprints_intersecting"));
        CHECK(stage(ks, "toeprints_intersecting") >= stage(ks, "docs_candidate"));
        CHECK(stage(ks, "docs_candidate") >= stage(ks, "index_filtered"));
        CHECK(stage(ks, "index_filtered") >= stage(ks, "geo_matched"));
    }
}

TEST_CASE("k-sweep stays within its sweep budget") {
    const QueryEngine& engine = fixture_engine();
    for (Query q : fixture_trace()) {
        for (uint32_t k : {2u, 4u, 16u}) {
            q.k_sweeps = k;
            QueryReport report = engine.k_sweep(q);
            CHECK(stage(report, "sweeps") <= k);
            // Seeks = one per postings run read plus one per sweep.
            CHECK(report.io.seek_count <= q.terms.size() + k);
        }
    }
}

TEST_CASE("a single sweep scans one contiguous span") {
    QueryEngine engine = QueryEngine::open(contrast_manifest());  // built with m=1
    Query q = simple_query({"common"}, {0.05, 0.05, 0.9, 0.9});
    q.k_sweeps = 1;

    std::vector<IdInterval> intervals;
    for (const FootprintRegion& region : q.footprint.regions) {
        engine.grid().collect_intervals(region.rect, intervals);
    }
    auto runs = normalize_intervals(intervals);
    REQUIRE_FALSE(runs.empty());
    QueryReport report = engine.k_sweep(q);
    CHECK(stage(report, "sweeps") == 1);
    CHECK(report.io.seek_count == q.terms.size() + 1);
    uint64_t span = runs.back().hi - runs.front().lo + 1;
    CHECK(report.io.toeprint_bytes == span * ToeprintStore::kRecordSize);
}

TEST_CASE("sweep budget equal to the natural run count fetches the exact union") {
    const QueryEngine& engine = fixture_engine();
    for (Query q : fixture_trace()) {
        std::vector<IdInterval> intervals;
        for (const FootprintRegion& region : q.footprint.regions) {
            engine.grid().collect_intervals(region.rect, intervals);
        }
        auto runs = normalize_intervals(intervals);
        if (runs.empty() || runs.size() < engine.grid().max_intervals()) {
            continue;
        }
        q.k_sweeps = static_cast<uint32_t>(runs.size());
        QueryReport report = engine.k_sweep(q);
        uint64_t union_bytes = 0;
        for (const IdInterval& run : runs) {
            union_bytes += (static_cast<uint64_t>(run.hi) - run.lo + 1) * ToeprintStore::kRecordSize;
        }
        CHECK(report.io.toeprint_bytes == union_bytes);
    }
}

TEST_CASE("geo-first reads no postings when the rectangle misses every MBR") {
    QueryEngine engine = QueryEngine::open(contrast_manifest());
    // Both clusters live well inside the domain; a sliver at the far corner
    // intersects nothing.
    Query q = simple_query({"common"}, {0.97, 0.97, 0.99, 0.99});
    QueryReport report = engine.geo_first(q);
    CHECK(report.hits.empty());
    CHECK(stage(report, "mbr_candidates") == 0);
    CHECK(report.io.postings_bytes == 0);  // only the lexicon was consulted
    CHECK(report.io.footprint_bytes == 0);
}

TEST_CASE("k-sweep fetches a superset of the toeprints intersecting the query") {
    const QueryEngine& engine = fixture_engine();
    static std::vector<Toeprint> all = engine.toeprint_store().read_all();
    int exercised = 0;
    for (const Query& q : fixture_trace()) {
        std::vector<IdInterval> intervals;
        for (const FootprintRegion& region : q.footprint.regions) {
            engine.grid().collect_intervals(region.rect, intervals);
        }
        std::vector<IdInterval> sweeps = compute_sweeps(intervals, q.k_sweeps);
        auto fetched = [&](uint32_t id) {
            for (const IdInterval& s : sweeps) {
                if (id >= s.lo && id <= s.hi) {
                    return true;
                }
            }
            return false;
        };
        for (const Toeprint& t : all) {
            bool intersects = false;
            for (const FootprintRegion& region : q.footprint.regions) {
                intersects |= region.rect.intersects(t.rect);
            }
            if (intersects) {
                CHECK(fetched(t.id));
                ++exercised;
            }
        }
    }
    CHECK(exercised > 0);
}

TEST_CASE("geo-first fetches fewer footprint bytes on selective queries") {
    QueryEngine engine = QueryEngine::open(contrast_manifest());
    // "common" matches all 200 docs; the query rectangle touches only the
    // west cluster, so the MBR tree admits only half the collection.
    Query q = simple_query({"common"}, {0.08, 0.08, 0.16, 0.16});
    QueryReport text = engine.text_first(q);
    QueryReport geo = engine.geo_first(q);
    REQUIRE_FALSE(text.hits.empty());
    CHECK(compare_rankings(text.hits, geo.hits) == std::nullopt);
    CHECK(geo.io.footprint_bytes < text.io.footprint_bytes);
    CHECK(stage(geo, "mbr_candidates") < stage(text, "daat"));
}

TEST_CASE("query validation rejects bad inputs") {
    const QueryEngine& engine = fixture_engine();
    Query no_terms = simple_query({}, {0, 0, 1, 1});
    CHECK_THROWS_AS(engine.text_first(no_terms), std::invalid_argument);

    Query bad_rect = simple_query({"a"}, {0.2, 0.2, 1.4, 0.4});
    CHECK_THROWS_AS(engine.text_first(bad_rect), std::invalid_argument);

    Query zero_k = simple_query({"a"}, {0, 0, 1, 1});
    zero_k.k_results = 0;
    CHECK_THROWS_AS(engine.geo_first(zero_k), std::invalid_argument);

    Query low_sweeps = simple_query({"a"}, {0, 0, 1, 1});
    low_sweeps.k_sweeps = engine.grid().max_intervals() - 1;
    CHECK_THROWS_AS(engine.k_sweep(low_sweeps), std::invalid_argument);
}

TEST_CASE("repeated execution is deterministic") {
    const QueryEngine& engine = fixture_engine();
    Query q = fixture_trace().at(3);
    QueryReport a = engine.k_sweep(q);
    QueryReport b = engine.k_sweep(q);
    REQUIRE(a.hits.size() == b.hits.size());
    for (std::size_t i = 0; i < a.hits.size(); ++i) {
        CHECK(a.hits[i].doc_id == b.hits[i].doc_id);
        CHECK(a.hits[i].combined == b.hits[i].combined);
    }
    CHECK(a.io.toeprint_bytes == b.io.toeprint_bytes);
    CHECK(a.io.seek_count == b.io.seek_count);
}

TEST_CASE("duplicate query terms collapse to the set semantics") {
    const QueryEngine& engine = fixture_engine();
    std::string term = SyntheticGenerator::term_for_rank(1);
    Query dup = simple_query({term, term}, {0, 0, 1, 1});
    Query single = simple_query({term}, {0, 0, 1, 1});
    QueryReport a = engine.text_first(dup);
    QueryReport b = engine.text_first(single);
    CHECK(compare_rankings(b.hits, a.hits) == std::nullopt);
}

}  // TEST_SUITE
