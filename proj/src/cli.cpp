#include "geosearch/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <optional>

#include <CLI11.hpp>

#include "geosearch/bench.hpp"
#include "geosearch/build_pipeline.hpp"
#include "geosearch/corpus.hpp"
#include "geosearch/query_engine.hpp"
#include "geosearch/synthetic.hpp"

namespace geosearch {

namespace {

struct GenArgs {
    std::string out_dir;
    SyntheticSpec spec;
    TraceSpec trace;
};

struct BuildArgs {
    BuildOptions options;
    std::string global_scores;
    bool no_positions = false;
};

struct QueryArgs {
    std::string index_dir;
    std::string algo = "oracle";
    std::string terms;
    std::string rect;
    uint32_t k = 10;
    uint32_t sweeps = 4;
    ScoreWeights weights;
    bool volume_score = false;
};

struct BenchArgs {
    std::string index_dir;
    std::string trace;
    std::vector<std::string> algos = {"text-first", "geo-first", "k-sweep"};
    uint64_t seek_cost = 512 * 1024;
    uint32_t k = 10;
    uint32_t sweeps = 4;
    std::string report;
};

struct SweepArgs {
    std::string index_dir;
    std::string trace;
    std::vector<uint32_t> k_grid = {1, 2, 4, 8, 16};
    std::vector<uint32_t> m_grid = {1, 2, 4};
    uint32_t k = 10;
};

Query make_query(const QueryArgs& args) {
    Query q;
    q.terms = tokenize(args.terms);
    if (q.terms.empty()) {
        throw CLI::ValidationError("--terms", "no terms after tokenization");
    }
    Rect r;
    std::istringstream coords(args.rect);
    if (!(coords >> r.xmin >> r.ymin >> r.xmax >> r.ymax)) {
        throw CLI::ValidationError("--rect", "expected \"xmin ymin xmax ymax\"");
    }
    if (!in_unit_domain(r) || r.area() <= 0.0) {
        throw CLI::ValidationError("--rect", "rectangle must be non-degenerate and inside [0,1]^2");
    }
    q.footprint = single_rect_footprint(r);
    q.k_results = args.k;
    q.k_sweeps = args.sweeps;
    return q;
}

void print_hits(const std::vector<ScoredHit>& hits, std::ostream& out) {
    char buf[192];
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const ScoredHit& h = hits[i];
        std::snprintf(buf, sizeof(buf), "%zu\t%u\t%.9f\t%.9f\t%.9f\t%.9f\n", i + 1, h.doc_id,
                      h.combined, h.text_score, h.geo_score, h.global_score);
        out << buf;
    }
}

std::vector<Algo> parse_algos(const std::vector<std::string>& names) {
    std::vector<Algo> algos;
    for (const std::string& name : names) {
        std::optional<Algo> algo = algo_from_name(name);
        if (!algo) {
            throw CLI::ValidationError("--algos", "unknown algorithm '" + name + "'");
        }
        algos.push_back(*algo);
    }
    return algos;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"geographic search engine query-processing core"};
    app.require_subcommand(1);

    GenArgs gen;
    CLI::App* cmd_gen = app.add_subcommand("gen", "generate a synthetic corpus, gazetteer and query trace");
    cmd_gen->add_option("--out", gen.out_dir, "output directory")->required();
    cmd_gen->add_option("--docs", gen.spec.n_docs, "number of documents");
    cmd_gen->add_option("--vocab", gen.spec.vocab_size, "vocabulary size");
    cmd_gen->add_option("--zipf", gen.spec.zipf_s, "Zipf exponent");
    cmd_gen->add_option("--clusters", gen.spec.n_clusters, "spatial cluster count");
    cmd_gen->add_option("--seed", gen.spec.seed, "random seed");
    cmd_gen->add_option("--queries", gen.trace.n_queries, "trace query count");
    cmd_gen->add_option("--area-min", gen.trace.min_area_frac, "smallest query area fraction");
    cmd_gen->add_option("--area-max", gen.trace.max_area_frac, "largest query area fraction");
    cmd_gen->add_option("--term-rank-frac", gen.trace.term_rank_frac,
                        "query terms come from this top fraction of the vocabulary");

    BuildArgs build;
    CLI::App* cmd_build = app.add_subcommand("build", "build all index structures from a corpus");
    cmd_build->add_option("--corpus", build.options.corpus, "corpus file (site_key<TAB>text)")->required();
    cmd_build->add_option("--gazetteer", build.options.gazetteer, "gazetteer file")->required();
    cmd_build->add_option("--out", build.options.out_dir, "index output directory")->required();
    cmd_build->add_option("--grid-bits", build.options.grid_bits, "tile grid resolution (2^bits per side)");
    cmd_build->add_option("--m", build.options.m, "toeprint ID intervals per tile");
    cmd_build->add_option("--gap-kib", build.options.gap_kib, "footprint fetch gap threshold (KiB)");
    cmd_build->add_flag("--no-positions", build.no_positions, "do not embed token positions in postings");
    cmd_build->add_option("--global-scores", build.global_scores, "precomputed global score table");

    QueryArgs query;
    CLI::App* cmd_query = app.add_subcommand("query", "run one ranked query");
    cmd_query->add_option("--index", query.index_dir, "index directory")->required();
    cmd_query->add_option("--algo", query.algo, "text-first|geo-first|k-sweep|oracle")
        ->check(CLI::IsMember({"text-first", "geo-first", "k-sweep", "oracle"}));
    cmd_query->add_option("--terms", query.terms, "query terms")->required();
    cmd_query->add_option("--rect", query.rect, "query footprint: \"xmin ymin xmax ymax\"")->required();
    cmd_query->add_option("--k", query.k, "result count");
    cmd_query->add_option("--sweeps", query.sweeps, "sweep budget (k-sweep only)");
    cmd_query->add_option("--w-text", query.weights.w_text, "text score weight");
    cmd_query->add_option("--w-geo", query.weights.w_geo, "geo score weight");
    cmd_query->add_option("--w-global", query.weights.w_global, "global score weight");
    cmd_query->add_flag("--geo-volume", query.volume_score,
                        "score geography by intersection volume instead of the inner product");

    BenchArgs bench;
    CLI::App* cmd_bench = app.add_subcommand("bench", "replay a query trace and compare algorithm costs");
    cmd_bench->add_option("--index", bench.index_dir, "index directory")->required();
    cmd_bench->add_option("--trace", bench.trace, "query trace file")->required();
    cmd_bench->add_option("--algos", bench.algos, "algorithms to compare")->delimiter(',');
    cmd_bench->add_option("--seek-cost", bench.seek_cost, "equivalent bytes per seek");
    cmd_bench->add_option("--k", bench.k, "results per query");
    cmd_bench->add_option("--sweeps", bench.sweeps, "sweep budget for k-sweep");
    cmd_bench->add_option("--report", bench.report, "also write the table as CSV to this path");

    SweepArgs sweep;
    CLI::App* cmd_sweep = app.add_subcommand("sweep-study", "toeprint bytes fetched vs k and m");
    cmd_sweep->add_option("--index", sweep.index_dir, "index directory")->required();
    cmd_sweep->add_option("--trace", sweep.trace, "query trace file")->required();
    cmd_sweep->add_option("--k-grid", sweep.k_grid, "sweep budgets to test")->delimiter(',');
    cmd_sweep->add_option("--m-grid", sweep.m_grid, "intervals-per-tile bounds to test")->delimiter(',');

    try {
        std::reverse(args.begin(), args.end());  // CLI11's vector overload wants reversed args
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (cmd_gen->parsed()) {
            SyntheticGenerator generator(gen.spec);
            SyntheticFiles files = generator.write_all(gen.out_dir, gen.trace);
            out << files.corpus.string() << '\n'
                << files.gazetteer.string() << '\n'
                << files.trace.string() << '\n';
        } else if (cmd_build->parsed()) {
            build.options.store_positions = !build.no_positions;
            if (!build.global_scores.empty()) {
                build.options.global_scores = build.global_scores;
            }
            IndexManifest man = build_all(build.options);
            out << "wrote " << (man.dir / "manifest").string() << " (" << man.files().size()
                << " files)\n";
        } else if (cmd_query->parsed()) {
            IndexManifest man = IndexManifest::load(query.index_dir);
            EngineOptions options;
            options.weights = query.weights;
            options.geo_kind =
                query.volume_score ? GeoScoreKind::intersection_volume : GeoScoreKind::inner_product;
            QueryEngine engine = QueryEngine::open(man, options);
            QueryReport report = engine.run(*algo_from_name(query.algo), make_query(query));
            print_hits(report.hits, out);
        } else if (cmd_bench->parsed()) {
            IndexManifest man = IndexManifest::load(bench.index_dir);
            QueryEngine engine = QueryEngine::open(man);
            std::vector<Query> queries = load_trace(bench.trace, bench.k, bench.sweeps);
            std::vector<Algo> algos = parse_algos(bench.algos);
            CostModel model;
            model.seek_cost = bench.seek_cost;
            TraceResult result = run_trace(engine, queries, algos, model);
            out << format_table(result);
            if (!bench.report.empty()) {
                write_csv(result, bench.report);
            }
        } else if (cmd_sweep->parsed()) {
            IndexManifest man = IndexManifest::load(sweep.index_dir);
            QueryEngine engine = QueryEngine::open(man);
            std::vector<Query> queries = load_trace(sweep.trace, sweep.k, 0);
            for (Query& q : queries) {
                q.k_sweeps = *std::max_element(sweep.k_grid.begin(), sweep.k_grid.end());
            }
            std::vector<SweepStudyRow> rows = sweep_study(engine, queries, sweep.k_grid, sweep.m_grid);
            out << format_sweep_table(rows);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace geosearch
