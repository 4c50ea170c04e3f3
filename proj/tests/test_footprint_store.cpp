#include <doctest.h>

#include <map>
#include <random>

#include "geosearch/footprint_store.hpp"
#include "geosearch/geocoder.hpp"
#include "support/fixtures.hpp"

using namespace geosearch;

namespace {

FootprintStore& fixture_store() {
    static FootprintStore store = FootprintStore::open(testfx::small_fixture().manifest.footprints,
                                                       testfx::small_fixture().manifest.footprints_idx);
    return store;
}

std::vector<FootprintOffsetEntry> fake_table() {
    // Records at byte ranges [0,50), [60,100), [4000,4100).
    return {{10, 0, 50, {}}, {11, 60, 40, {}}, {12, 4000, 100, {}}};
}

std::vector<uint32_t> random_present_docs(std::mt19937_64& rng, double keep_prob) {
    std::vector<uint32_t> docs;
    for (const FootprintOffsetEntry& e : fixture_store().entries()) {
        if ((rng() >> 11) * 0x1.0p-53 < keep_prob) {
            docs.push_back(e.doc_id);
        }
    }
    return docs;
}

}  // namespace

TEST_SUITE("footprint_store") {

TEST_CASE("plan_fetch merges records within the gap threshold") {
    auto table = fake_table();
    std::vector<uint32_t> all = {10, 11, 12};
    FetchPlan plan = plan_fetch(table, all, 1024);
    REQUIRE(plan.runs.size() == 2);
    CHECK(plan.runs[0].begin == 0);
    CHECK(plan.runs[0].end == 100);
    CHECK(plan.runs[1].begin == 4000);
    CHECK(plan.runs[1].end == 4100);
    CHECK(plan.total_bytes() == 200);
}

TEST_CASE("plan_fetch limit cases") {
    auto table = fake_table();
    std::vector<uint32_t> all = {10, 11, 12};

    SUBCASE("single record: one exact run") {
        std::vector<uint32_t> one = {11};
        FetchPlan plan = plan_fetch(table, one, 0);
        REQUIRE(plan.runs.size() == 1);
        CHECK(plan.runs[0].begin == 60);
        CHECK(plan.runs[0].end == 100);
    }
    SUBCASE("gap threshold zero: one run per separated record") {
        FetchPlan plan = plan_fetch(table, all, 0);
        CHECK(plan.runs.size() == 3);
        CHECK(plan.total_bytes() == 190);
    }
    SUBCASE("no gap limit: one run total") {
        FetchPlan plan = plan_fetch(table, all, kNoGapLimit);
        REQUIRE(plan.runs.size() == 1);
        CHECK(plan.runs[0].begin == 0);
        CHECK(plan.runs[0].end == 4100);
    }
    SUBCASE("unknown doc id") {
        std::vector<uint32_t> missing = {10, 99};
        CHECK_THROWS_AS(plan_fetch(table, missing, 1024), std::runtime_error);
    }
    SUBCASE("unsorted request") {
        std::vector<uint32_t> bad = {11, 10};
        CHECK_THROWS_AS(plan_fetch(table, bad, 1024), std::invalid_argument);
    }
}

TEST_CASE("store roundtrip is bit-exact") {
    std::mt19937_64 rng(3);
    std::vector<std::optional<Footprint>> fps(200);
    for (std::size_t d = 0; d < fps.size(); ++d) {
        if (d % 3 == 1) {
            continue;  // no footprint for this doc
        }
        Footprint fp;
        int regions = 1 + rng() % 4;
        for (int r = 0; r < regions; ++r) {
            double x = (rng() % 1000) / 1200.0;
            double y = (rng() % 1000) / 1200.0;
            fp.regions.push_back({{x, y, x + 0.01, y + 0.01}, (1 + rng() % 10) / 10.0});
        }
        normalize_footprint(fp);
        fps[d] = fp;
    }

    auto dir = testfx::fresh_dir("fp_roundtrip");
    write_footprint_store(fps, dir / "fp.bin", dir / "fp.idx");
    FootprintStore store = FootprintStore::open(dir / "fp.bin", dir / "fp.idx");

    uint64_t prev_offset = 0;
    uint32_t prev_doc = 0;
    bool first = true;
    for (const FootprintOffsetEntry& e : store.entries()) {
        if (!first) {
            CHECK(e.offset > prev_offset);
            CHECK(e.doc_id > prev_doc);
        }
        CHECK(e.mbr == fps[e.doc_id]->bounds());
        prev_offset = e.offset;
        prev_doc = e.doc_id;
        first = false;
    }

    std::vector<FootprintRecord> all = store.read_all();
    std::size_t with_fp = 0;
    for (const auto& fp : fps) {
        with_fp += fp.has_value() ? 1 : 0;
    }
    REQUIRE(all.size() == with_fp);
    for (const FootprintRecord& rec : all) {
        CHECK(rec.footprint == *fps[rec.doc_id]);  // exact doubles
    }
    CHECK(store.lookup(1) == nullptr);  // doc 1 had no footprint
}

TEST_CASE("fetch returns requested footprints and meters exactly") {
    FootprintStore& store = fixture_store();
    std::mt19937_64 rng(17);
    std::map<uint32_t, Footprint> reference;
    for (const FootprintRecord& rec : store.read_all()) {
        reference[rec.doc_id] = rec.footprint;
    }

    for (double keep : {0.02, 0.3, 1.0}) {
        std::vector<uint32_t> docs = random_present_docs(rng, keep);
        FetchPlan plan = store.plan(docs, 64 * 1024);
        IoMeter meter;
        std::vector<FootprintRecord> got = store.fetch(plan, meter);
        REQUIRE(got.size() == docs.size());
        for (std::size_t i = 0; i < docs.size(); ++i) {
            CHECK(got[i].doc_id == docs[i]);
            CHECK(got[i].footprint == reference.at(docs[i]));
        }
        CHECK(meter.footprint_bytes == plan.total_bytes());
        CHECK(meter.seek_count == plan.runs.size());
    }
}

TEST_CASE("empty plan is free") {
    IoMeter meter;
    FetchPlan plan = fixture_store().plan({}, 0);
    CHECK(fixture_store().fetch(plan, meter).empty());
    CHECK(meter.footprint_bytes == 0);
    CHECK(meter.seek_count == 0);
}

TEST_CASE("bytes grow and seeks shrink monotonically in the gap threshold") {
    FootprintStore& store = fixture_store();
    std::mt19937_64 rng(11);
    const std::vector<uint64_t> gaps = {0, 4 * 1024, 64 * 1024, 1024 * 1024, kNoGapLimit};
    for (double keep : {0.05, 0.5}) {
        std::vector<uint32_t> docs = random_present_docs(rng, keep);
        if (docs.empty()) {
            continue;
        }
        uint64_t prev_bytes = 0;
        uint64_t prev_seeks = UINT64_MAX;
        for (uint64_t g : gaps) {
            FetchPlan plan = store.plan(docs, g);
            CHECK(plan.total_bytes() >= prev_bytes);
            CHECK(plan.runs.size() <= prev_seeks);
            prev_bytes = plan.total_bytes();
            prev_seeks = plan.runs.size();
        }
        CHECK(store.plan(docs, kNoGapLimit).runs.size() == 1);
    }
}

TEST_CASE("every plan covers every requested record") {
    FootprintStore& store = fixture_store();
    std::mt19937_64 rng(23);
    for (uint64_t g : {uint64_t(0), uint64_t(512), kNoGapLimit}) {
        std::vector<uint32_t> docs = random_present_docs(rng, 0.2);
        FetchPlan plan = store.plan(docs, g);
        for (uint32_t d : docs) {
            const FootprintOffsetEntry* e = store.lookup(d);
            REQUIRE(e != nullptr);
            bool covered = false;
            for (const FetchPlan::Run& run : plan.runs) {
                covered |= e->offset >= run.begin && e->offset + e->length <= run.end;
            }
            CHECK(covered);
        }
    }
}

}  // TEST_SUITE
