// Acceptance suite: exercises the full system against its hard contracts on
// seeded fixtures. Prints one pass/fail line per criterion; the exit code is
// the number of failures.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "geosearch/bench.hpp"
#include "geosearch/build_pipeline.hpp"
#include "geosearch/query_engine.hpp"
#include "geosearch/rtree.hpp"
#include "geosearch/synthetic.hpp"
#include "geosearch/tile_grid.hpp"

using namespace geosearch;

namespace {

struct Harness {
    int failures = 0;
    int index = 0;

    void run(const std::string& label, const std::function<void()>& body) {
        ++index;
        auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            body();
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        if (ok) {
            std::printf("[PASS] criterion %d: %s (%lldms)\n", index, label.c_str(),
                        static_cast<long long>(ms));
        } else {
            ++failures;
            std::printf("[FAIL] criterion %d: %s: %s\n", index, label.c_str(), detail.c_str());
        }
        std::fflush(stdout);
    }
};

[[noreturn]] void fail(const std::string& message) {
    throw std::runtime_error(message);
}

void require(bool condition, const std::string& message) {
    if (!condition) {
        fail(message);
    }
}

std::filesystem::path work_dir() {
    static std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("geosearch_acceptance_" + std::to_string(::getpid()));
        std::filesystem::remove_all(d);
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

SyntheticSpec fixture_spec() {
    SyntheticSpec spec;
    spec.n_docs = 10'000;
    spec.vocab_size = 2'000;
    spec.zipf_s = 1.0;
    spec.n_clusters = 20;
    spec.seed = 42;
    return spec;
}

// The 10k-document fixture shared by most criteria: corpus, gazetteer, a
// 200-query mixed trace (areas 0.01%..100%), and a built index.
struct Fixture {
    SyntheticFiles files;
    IndexManifest manifest;
};

const Fixture& fixture() {
    static Fixture f = [] {
        SyntheticGenerator gen(fixture_spec());
        TraceSpec trace;  // defaults: 200 queries, areas 1e-4..1.0 of the domain
        Fixture fx;
        fx.files = gen.write_all(work_dir() / "data", trace);
        BuildOptions options;
        options.corpus = fx.files.corpus;
        options.gazetteer = fx.files.gazetteer;
        options.out_dir = work_dir() / "idx";
        fx.manifest = build_all(options);
        return fx;
    }();
    return f;
}

const QueryEngine& engine() {
    static QueryEngine e = QueryEngine::open(fixture().manifest);
    return e;
}

uint64_t exhaustive_min_cover(const std::vector<IdInterval>& runs, uint32_t k) {
    std::size_t gaps = runs.size() - 1;
    uint64_t best = UINT64_MAX;
    for (uint32_t mask = 0; mask < (1u << gaps); ++mask) {
        if (static_cast<uint32_t>(__builtin_popcount(mask)) > k - 1) {
            continue;
        }
        uint64_t total = 0;
        uint32_t lo = runs[0].lo;
        for (std::size_t i = 0; i < gaps; ++i) {
            if (mask & (1u << i)) {
                total += runs[i].hi - lo + 1;
                lo = runs[i + 1].lo;
            }
        }
        total += runs.back().hi - lo + 1;
        best = std::min(best, total);
    }
    return best;
}

void criterion_cross_algorithm_equivalence() {
    std::vector<Query> queries = load_trace(fixture().files.trace);
    require(queries.size() == 200, "trace must hold 200 queries");
    std::vector<Algo> algos = {Algo::text_first, Algo::geo_first, Algo::k_sweep};
    // run_trace verifies every per-query ranking against brute force and
    // throws on the first divergence.
    TraceResult result = run_trace(engine(), queries, algos);
    require(result.equivalent, "equivalence flag must be set");
    for (const AlgoTraceStats& stats : result.per_algo) {
        require(stats.queries == 200, "every algorithm must run the whole trace");
    }
}

void criterion_text_score_fidelity() {
    // Hand case: ln(101) * (1 + ln 3) / sqrt(100).
    std::vector<TermScoreInput> hand = {{3, 10}};
    double expect = std::log(101.0) * (1.0 + std::log(3.0)) / 10.0;
    require(std::abs(text_score(hand, 1000, 100) - expect) <= 1e-12, "hand case diverges");
    require(std::abs(expect - 0.96853) < 5e-6, "hand case sanity");

    std::mt19937_64 rng(20240817);
    for (int i = 0; i < 1000; ++i) {
        uint32_t n = 1 + static_cast<uint32_t>(rng() % 2'000'000);
        uint32_t len = 1 + static_cast<uint32_t>(rng() % 10'000);
        uint32_t ft = 1 + static_cast<uint32_t>(rng() % n);
        uint32_t fdt = 1 + static_cast<uint32_t>(rng() % 500);
        std::vector<TermScoreInput> inputs = {{fdt, ft}};
        double got = text_score(inputs, n, len);
        long double want = std::log(1.0L + static_cast<long double>(n) / ft) *
                           (1.0L + std::log(static_cast<long double>(fdt))) /
                           std::sqrt(static_cast<long double>(len));
        long double rel = std::abs(got - want) / std::max(1.0L, std::abs(want));
        if (rel > 1e-12) {
            fail("tuple " + std::to_string(i) + ": relative error " + std::to_string((double)rel));
        }
    }
}

void criterion_grid_coverage() {
    TileGrid grid = TileGrid::load(fixture().manifest.grid);
    std::vector<Toeprint> toeprints =
        ToeprintStore::open(fixture().manifest.toeprints).read_all();
    require(toeprints.size() >= 10'000, "fixture must yield at least 10k toeprints");

    uint64_t checked = 0;
    for (const Toeprint& t : toeprints) {
        uint32_t x0 = tile_coord(t.rect.xmin, grid.grid_bits());
        uint32_t x1 = tile_coord(t.rect.xmax, grid.grid_bits());
        uint32_t y0 = tile_coord(t.rect.ymin, grid.grid_bits());
        uint32_t y1 = tile_coord(t.rect.ymax, grid.grid_bits());
        for (uint32_t ty = y0; ty <= y1; ++ty) {
            for (uint32_t tx = x0; tx <= x1; ++tx) {
                bool inside = false;
                for (const IdInterval& iv : grid.tile(tx, ty)) {
                    inside |= t.id >= iv.lo && t.id <= iv.hi;
                }
                ++checked;
                if (!inside) {
                    fail("toeprint " + std::to_string(t.id) + " missing from tile (" +
                         std::to_string(tx) + "," + std::to_string(ty) + ")");
                }
            }
        }
    }
    require(checked > 0, "no incidences checked");

    // The worked example: a tile intersected by exactly ids 3476..3500 and
    // 23400..31000 stores those two intervals verbatim at m=2.
    const double tile = 1.0 / 1024.0;
    Rect inside{200.5 * tile, 300.5 * tile, 200.6 * tile, 300.6 * tile};
    Rect outside{900.5 * tile, 50.5 * tile, 900.6 * tile, 50.6 * tile};
    std::vector<Toeprint> fabricated;
    for (uint32_t id = 0; id <= 31000; ++id) {
        bool in = (id >= 3476 && id <= 3500) || (id >= 23400 && id <= 31000);
        fabricated.push_back({id, id, in ? inside : outside, 1.0});
    }
    TileGrid worked = TileGrid::build(fabricated, 10, 2);
    auto intervals = worked.tile(200, 300);
    require(intervals.size() == 2, "worked tile must store two intervals");
    require(intervals[0] == IdInterval{3476, 3500} && intervals[1] == IdInterval{23400, 31000},
            "worked tile intervals are wrong");
}

void criterion_sweep_optimality() {
    std::mt19937_64 rng(7777);
    for (int round = 0; round < 300; ++round) {
        std::size_t n_runs = 1 + rng() % 12;
        std::vector<IdInterval> runs;
        uint32_t cursor = static_cast<uint32_t>(rng() % 100);
        for (std::size_t i = 0; i < n_runs; ++i) {
            uint32_t lo = cursor;
            uint32_t hi = lo + static_cast<uint32_t>(rng() % 80);
            runs.push_back({lo, hi});
            cursor = hi + 2 + static_cast<uint32_t>(rng() % 120);
        }
        for (uint32_t k = 1; k <= n_runs; ++k) {
            std::vector<IdInterval> sweeps = compute_sweeps(runs, k);
            require(sweeps.size() <= k, "sweep budget exceeded");
            uint64_t covered = 0;
            for (const IdInterval& s : sweeps) {
                covered += static_cast<uint64_t>(s.hi) - s.lo + 1;
            }
            uint64_t best = exhaustive_min_cover(runs, k);
            if (covered != best) {
                fail("round " + std::to_string(round) + " k=" + std::to_string(k) + ": covered " +
                     std::to_string(covered) + " != optimal " + std::to_string(best));
            }
            for (const IdInterval& run : runs) {
                bool inside = false;
                for (const IdInterval& s : sweeps) {
                    inside |= run.lo >= s.lo && run.hi <= s.hi;
                }
                require(inside, "sweeps fail to cover the union");
            }
        }
    }
}

void criterion_io_improvement() {
    // Geo-selective trace: areas at most 1% of the domain, terms from the
    // top decile of the vocabulary by frequency rank.
    SyntheticGenerator gen(fixture_spec());
    TraceSpec selective;
    selective.n_queries = 60;
    selective.min_area_frac = 1e-4;
    selective.max_area_frac = 0.01;
    selective.term_rank_frac = 0.10;
    selective.salt = 5;
    auto trace_path = work_dir() / "selective_trace.tsv";
    gen.write_trace(trace_path, selective);

    std::vector<Query> queries = load_trace(trace_path);  // defaults: k=10, k_sweeps=4
    std::vector<Algo> algos = {Algo::text_first, Algo::k_sweep};
    CostModel model;  // defaults: seek = 512 KiB equivalent
    TraceResult result = run_trace(engine(), queries, algos, model);

    uint64_t text_cost = result.per_algo[0].total_cost;
    uint64_t sweep_cost = result.per_algo[1].total_cost;
    double ratio = static_cast<double>(sweep_cost) / static_cast<double>(text_cost);
    std::printf("       measured cost ratio k-sweep/text-first = %.3f "
                "(k-sweep %llu, text-first %llu)\n",
                ratio, static_cast<unsigned long long>(sweep_cost),
                static_cast<unsigned long long>(text_cost));
    require(ratio <= 0.7, "k-sweep must cost at most 0.7x text-first; measured " +
                              std::to_string(ratio));
}

void criterion_grid_memory() {
    uint64_t size = std::filesystem::file_size(fixture().manifest.grid);
    std::printf("       serialized grid: %llu bytes\n", static_cast<unsigned long long>(size));
    require(size <= 8ull * 1024 * 1024, "grid file exceeds 8 MiB: " + std::to_string(size));
}

void criterion_mbr_exactness() {
    std::mt19937_64 rng(13579);
    auto u01 = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<std::pair<Rect, uint32_t>> items;
    for (uint32_t i = 0; i < 10'000; ++i) {
        double x = u01() * 0.95;
        double y = u01() * 0.95;
        double w = 0.001 + u01() * 0.05;
        double h = 0.001 + u01() * 0.05;
        items.emplace_back(Rect{x, y, std::min(1.0, x + w), std::min(1.0, y + h)}, i);
    }
    MbrTree tree = MbrTree::build(items);
    require(tree.check_invariants(), "tree structure invariants violated");

    for (int q = 0; q < 500; ++q) {
        double x = u01() * 0.8;
        double y = u01() * 0.8;
        Rect query{x, y, x + 0.002 + u01() * 0.2, y + 0.002 + u01() * 0.2};
        std::vector<uint32_t> expected;
        for (const auto& [rect, id] : items) {
            if (rect.intersects(query)) {
                expected.push_back(id);
            }
        }
        if (tree.query(query) != expected) {
            fail("query " + std::to_string(q) + " diverges from the linear scan");
        }
    }
}

void criterion_fetch_policy_monotonicity() {
    FootprintStore store =
        FootprintStore::open(fixture().manifest.footprints, fixture().manifest.footprints_idx);
    std::mt19937_64 rng(424242);
    const std::vector<uint64_t> thresholds = {0, 4 * 1024, 64 * 1024, 1024 * 1024, kNoGapLimit};
    for (int round = 0; round < 50; ++round) {
        std::vector<uint32_t> docs;
        double keep = 0.01 + 0.3 * static_cast<double>(rng() % 100) / 100.0;
        for (const FootprintOffsetEntry& e : store.entries()) {
            if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < keep) {
                docs.push_back(e.doc_id);
            }
        }
        if (docs.empty()) {
            continue;
        }
        uint64_t prev_bytes = 0;
        uint64_t prev_seeks = UINT64_MAX;
        for (uint64_t g : thresholds) {
            FetchPlan plan = store.plan(docs, g);
            IoMeter meter;
            store.fetch(plan, meter);
            require(meter.footprint_bytes == plan.total_bytes(), "meter bytes mismatch");
            require(meter.seek_count == plan.runs.size(), "meter seeks mismatch");
            require(meter.footprint_bytes >= prev_bytes, "bytes_read decreased as G grew");
            require(meter.seek_count <= prev_seeks, "seek_count increased as G grew");
            prev_bytes = meter.footprint_bytes;
            prev_seeks = meter.seek_count;
        }
        require(store.plan(docs, kNoGapLimit).runs.size() == 1, "G=inf must yield one run");
    }
}

void criterion_build_determinism() {
    BuildOptions options;
    options.corpus = fixture().files.corpus;
    options.gazetteer = fixture().files.gazetteer;

    auto read = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    };

    options.out_dir = work_dir() / "det_a";
    build_all(options);
    options.out_dir = work_dir() / "det_b";
    build_all(options);

    for (const char* name : {"lexicon.bin", "postings.bin", "doclens.bin", "footprints.bin",
                             "footprints.idx", "toeprints.bin", "grid.bin", "manifest"}) {
        std::string a = read(work_dir() / "det_a" / name);
        std::string b = read(work_dir() / "det_b" / name);
        require(!a.empty(), std::string(name) + " missing");
        if (a != b) {
            fail(std::string(name) + " differs between identical builds");
        }
    }
}

}  // namespace

int main() {
    Harness h;
    h.run("cross-algorithm equivalence on a 10k-doc corpus, 200-query trace",
          criterion_cross_algorithm_equivalence);
    h.run("term score matches independent evaluation within 1e-12",
          criterion_text_score_fidelity);
    h.run("tile grid coverage has no false negatives; worked tile reproduced",
          criterion_grid_coverage);
    h.run("sweep computation is length-optimal against exhaustive search",
          criterion_sweep_optimality);
    h.run("k-sweep costs at most 0.7x text-first on a geo-selective trace",
          criterion_io_improvement);
    h.run("serialized tile grid fits in 8 MiB", criterion_grid_memory);
    h.run("MBR tree equals the linear-scan oracle on 500 random queries",
          criterion_mbr_exactness);
    h.run("fetch policy is monotone in the gap threshold", criterion_fetch_policy_monotonicity);
    h.run("index builds are byte-deterministic", criterion_build_determinism);

    if (h.failures == 0) {
        std::printf("all %d criteria passed\n", h.index);
    } else {
        std::printf("%d of %d criteria FAILED\n", h.failures, h.index);
    }
    std::filesystem::remove_all(work_dir());
    return h.failures;
}
