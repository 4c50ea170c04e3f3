#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geosearch/query_engine.hpp"

namespace geosearch {

// Deterministic stand-in for wall clock: sequential bytes cost their size,
// each seek costs `seek_cost` equivalent bytes.
struct CostModel {
    uint64_t seek_cost = 512 * 1024;
    uint64_t byte_cost = 1;

    uint64_t cost(const IoMeter& io) const {
        return byte_cost * io.total_bytes() + seek_cost * io.seek_count;
    }
};

// Parses `term term ...<TAB>xmin ymin xmax ymax` lines; coordinates are
// fractions of the unit domain. Errors name the offending line.
std::vector<Query> load_trace(const std::filesystem::path& path, uint32_t k_results = 10,
                              uint32_t k_sweeps = 4);

// Empty result means the rankings agree (same docs, same order, every score
// component within `tolerance`); otherwise a description of the divergence.
std::optional<std::string> compare_rankings(std::span<const ScoredHit> expected,
                                            std::span<const ScoredHit> actual,
                                            double tolerance = 1e-9);

struct AlgoTraceStats {
    Algo algo = Algo::oracle;
    uint64_t queries = 0;
    IoMeter io;
    uint64_t candidates = 0;  // first-stage candidates, summed over the trace
    uint64_t total_cost = 0;
    double mean_cost = 0.0;
    double median_cost = 0.0;
};

struct TraceResult {
    std::vector<AlgoTraceStats> per_algo;
    bool equivalent = false;  // true on return; mismatches raise instead
};

// Replays every query under each algorithm, verifying each result against
// brute force. A divergence aborts the run, naming the query.
TraceResult run_trace(const QueryEngine& engine, std::span<const Query> queries,
                      std::span<const Algo> algos, const CostModel& model = {});

std::string format_table(const TraceResult& result);
// Machine-readable form; first line is the header row.
std::string format_csv(const TraceResult& result);
void write_csv(const TraceResult& result, const std::filesystem::path& path);

struct SweepStudyRow {
    uint32_t m = 0;
    uint32_t k_sweeps = 0;
    uint64_t fetched_bytes = 0;  // toeprint bytes over the whole trace
    uint64_t total_bytes = 0;    // trace length x full toeprint store size
    double ratio = 0.0;
};

// Toeprint bytes fetched as k_sweeps and m vary; only pairs with k >= m run.
std::vector<SweepStudyRow> sweep_study(const QueryEngine& engine, std::span<const Query> queries,
                                       std::span<const uint32_t> k_grid,
                                       std::span<const uint32_t> m_grid);

std::string format_sweep_table(std::span<const SweepStudyRow> rows);

}  // namespace geosearch
