#include "geosearch/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "geosearch/corpus.hpp"

namespace geosearch {

namespace {

uint64_t first_stage_count(Algo algo, const QueryReport& report) {
    const char* stage = nullptr;
    switch (algo) {
        case Algo::text_first: stage = "daat"; break;
        case Algo::geo_first: stage = "mbr_candidates"; break;
        case Algo::k_sweep: stage = "docs_candidate"; break;
        case Algo::oracle: return 0;
    }
    for (const StageCount& s : report.stages) {
        if (std::string_view(s.stage) == stage) {
            return s.count;
        }
    }
    return 0;
}

std::string describe_query(std::size_t index, const Query& query) {
    std::ostringstream os;
    os << "query #" << index << " [";
    for (std::size_t i = 0; i < query.terms.size(); ++i) {
        os << (i ? " " : "") << query.terms[i];
    }
    const Rect& r = query.footprint.regions.front().rect;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "] rect(%g %g %g %g)", r.xmin, r.ymin, r.xmax, r.ymax);
    os << buf;
    return os.str();
}

double median(std::vector<uint64_t> values) {
    if (values.empty()) {
        return 0.0;
    }
    std::sort(values.begin(), values.end());
    std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) {
        return static_cast<double>(values[mid]);
    }
    return (static_cast<double>(values[mid - 1]) + static_cast<double>(values[mid])) / 2.0;
}

}  // namespace

std::vector<Query> load_trace(const std::filesystem::path& path, uint32_t k_results,
                              uint32_t k_sweeps) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error(path.string() + ": cannot open trace file");
    }
    std::vector<Query> queries;
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
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error(path.string() + " line " + std::to_string(line_no) +
                                     ": expected terms<TAB>rect");
        }
        Query q;
        q.terms = tokenize(line.substr(0, tab));
        if (q.terms.empty()) {
            throw std::runtime_error(path.string() + " line " + std::to_string(line_no) +
                                     ": query has no terms");
        }
        Rect r;
        std::istringstream coords(line.substr(tab + 1));
        if (!(coords >> r.xmin >> r.ymin >> r.xmax >> r.ymax)) {
            throw std::runtime_error(path.string() + " line " + std::to_string(line_no) +
                                     ": malformed rectangle");
        }
        if (!in_unit_domain(r) || r.area() <= 0.0) {
            throw std::runtime_error(path.string() + " line " + std::to_string(line_no) +
                                     ": rectangle must be non-degenerate and inside [0,1]^2");
        }
        q.footprint = single_rect_footprint(r);
        q.k_results = k_results;
        q.k_sweeps = k_sweeps;
        queries.push_back(std::move(q));
    }
    return queries;
}

std::optional<std::string> compare_rankings(std::span<const ScoredHit> expected,
                                            std::span<const ScoredHit> actual, double tolerance) {
    if (expected.size() != actual.size()) {
        return "hit count " + std::to_string(actual.size()) + " != expected " +
               std::to_string(expected.size());
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const ScoredHit& e = expected[i];
        const ScoredHit& a = actual[i];
        if (e.doc_id != a.doc_id) {
            return "rank " + std::to_string(i + 1) + ": doc " + std::to_string(a.doc_id) +
                   " != expected " + std::to_string(e.doc_id);
        }
        auto close = [&](double x, double y) { return std::abs(x - y) <= tolerance; };
        if (!close(e.combined, a.combined) || !close(e.text_score, a.text_score) ||
            !close(e.geo_score, a.geo_score) || !close(e.global_score, a.global_score)) {
            return "rank " + std::to_string(i + 1) + ": scores diverge beyond tolerance for doc " +
                   std::to_string(e.doc_id);
        }
    }
    return std::nullopt;
}

TraceResult run_trace(const QueryEngine& engine, std::span<const Query> queries,
                      std::span<const Algo> algos, const CostModel& model) {
    TraceResult result;
    result.per_algo.resize(algos.size());
    std::vector<std::vector<uint64_t>> costs(algos.size());
    for (std::size_t a = 0; a < algos.size(); ++a) {
        result.per_algo[a].algo = algos[a];
    }

    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const Query& query = queries[qi];
        std::vector<ScoredHit> oracle = engine.brute_force(query);
        for (std::size_t a = 0; a < algos.size(); ++a) {
            QueryReport report = engine.run(algos[a], query);
            if (auto mismatch = compare_rankings(oracle, report.hits)) {
                throw std::runtime_error(std::string(algo_name(algos[a])) + " diverges from oracle on " +
                                         describe_query(qi, query) + ": " + *mismatch);
            }
            AlgoTraceStats& stats = result.per_algo[a];
            stats.queries += 1;
            stats.io += report.io;
            stats.candidates += first_stage_count(algos[a], report);
            costs[a].push_back(model.cost(report.io));
        }
    }

    for (std::size_t a = 0; a < algos.size(); ++a) {
        AlgoTraceStats& stats = result.per_algo[a];
        stats.total_cost = model.cost(stats.io);
        stats.mean_cost = stats.queries ? static_cast<double>(stats.total_cost) / stats.queries : 0.0;
        stats.median_cost = median(costs[a]);
    }
    result.equivalent = true;
    return result;
}

std::string format_table(const TraceResult& result) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-12s %8s %14s %12s %12s %12s %8s %12s %14s %14s\n",
                  "algorithm", "queries", "cost", "postings_b", "footprint_b", "toeprint_b",
                  "seeks", "candidates", "mean_cost", "median_cost");
    os << buf;
    for (const AlgoTraceStats& s : result.per_algo) {
        std::snprintf(buf, sizeof(buf),
                      "%-12s %8llu %14llu %12llu %12llu %12llu %8llu %12llu %14.1f %14.1f\n",
                      std::string(algo_name(s.algo)).c_str(),
                      static_cast<unsigned long long>(s.queries),
                      static_cast<unsigned long long>(s.total_cost),
                      static_cast<unsigned long long>(s.io.postings_bytes),
                      static_cast<unsigned long long>(s.io.footprint_bytes),
                      static_cast<unsigned long long>(s.io.toeprint_bytes),
                      static_cast<unsigned long long>(s.io.seek_count),
                      static_cast<unsigned long long>(s.candidates), s.mean_cost, s.median_cost);
        os << buf;
    }
    return os.str();
}

std::string format_csv(const TraceResult& result) {
    std::ostringstream os;
    os << "algorithm,queries,cost,bytes_postings,bytes_footprints,bytes_toeprints,bytes_total,"
          "seeks,candidates,mean_cost,median_cost,equivalent\n";
    for (const AlgoTraceStats& s : result.per_algo) {
        os << algo_name(s.algo) << ',' << s.queries << ',' << s.total_cost << ','
           << s.io.postings_bytes << ',' << s.io.footprint_bytes << ',' << s.io.toeprint_bytes
           << ',' << s.io.total_bytes() << ',' << s.io.seek_count << ',' << s.candidates << ','
           << s.mean_cost << ',' << s.median_cost << ',' << (result.equivalent ? 1 : 0) << '\n';
    }
    return os.str();
}

void write_csv(const TraceResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error(path.string() + ": cannot open report file");
    }
    out << format_csv(result);
    if (!out) {
        throw std::runtime_error(path.string() + ": write failed");
    }
}

std::vector<SweepStudyRow> sweep_study(const QueryEngine& engine, std::span<const Query> queries,
                                       std::span<const uint32_t> k_grid,
                                       std::span<const uint32_t> m_grid) {
    for (uint32_t k : k_grid) {
        if (k < 1) {
            throw std::invalid_argument("sweep_study: k values must be >= 1");
        }
    }
    for (uint32_t m : m_grid) {
        if (m < 1) {
            throw std::invalid_argument("sweep_study: m values must be >= 1");
        }
    }

    std::vector<Toeprint> toeprints = engine.toeprint_store().read_all();
    const uint64_t store_bytes = static_cast<uint64_t>(toeprints.size()) * ToeprintStore::kRecordSize;

    std::vector<SweepStudyRow> rows;
    for (uint32_t m : m_grid) {
        TileGrid grid = TileGrid::build(toeprints, engine.grid().grid_bits(), m);
        for (uint32_t k : k_grid) {
            if (k < m) {
                continue;
            }
            SweepStudyRow row{m, k, 0, store_bytes * queries.size(), 0.0};
            std::vector<IdInterval> intervals;
            for (const Query& query : queries) {
                intervals.clear();
                for (const FootprintRegion& region : query.footprint.regions) {
                    grid.collect_intervals(region.rect, intervals);
                }
                for (const IdInterval& sweep : compute_sweeps(intervals, k)) {
                    row.fetched_bytes +=
                        ToeprintStore::kRecordSize * (static_cast<uint64_t>(sweep.hi) - sweep.lo + 1);
                }
            }
            row.ratio = row.total_bytes ? static_cast<double>(row.fetched_bytes) / row.total_bytes : 0.0;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string format_sweep_table(std::span<const SweepStudyRow> rows) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%6s %8s %16s %16s %10s\n", "m", "k_sweeps", "fetched_bytes",
                  "total_bytes", "ratio");
    os << buf;
    for (const SweepStudyRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%6u %8u %16llu %16llu %10.4f\n", r.m, r.k_sweeps,
                      static_cast<unsigned long long>(r.fetched_bytes),
                      static_cast<unsigned long long>(r.total_bytes), r.ratio);
        os << buf;
    }
    return os.str();
}

}  // namespace geosearch
