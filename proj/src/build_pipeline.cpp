#include "geosearch/build_pipeline.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

#include "geosearch/corpus.hpp"
#include "geosearch/footprint_store.hpp"
#include "geosearch/inverted_index.hpp"
#include "geosearch/ranking.hpp"
#include "geosearch/tile_grid.hpp"
#include "geosearch/toeprints.hpp"

namespace geosearch {

namespace {

template <typename F>
auto run_stage(const char* stage, F&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("build stage '") + stage + "': " + e.what());
    }
}

void copy_text_file(const std::filesystem::path& from, const std::filesystem::path& to) {
    std::ifstream in(from, std::ios::binary);
    if (!in) {
        throw std::runtime_error(from.string() + ": cannot open");
    }
    std::ofstream out(to, std::ios::binary);
    out << in.rdbuf();
    if (!out) {
        throw std::runtime_error(to.string() + ": write failed");
    }
}

}  // namespace

IndexManifest build_all(const BuildOptions& options) {
    if (!std::filesystem::exists(options.corpus)) {
        throw std::runtime_error("--corpus: " + options.corpus.string() + " does not exist");
    }
    if (!std::filesystem::exists(options.gazetteer)) {
        throw std::runtime_error("--gazetteer: " + options.gazetteer.string() + " does not exist");
    }
    std::filesystem::create_directories(options.out_dir);

    IndexManifest man;
    man.dir = options.out_dir;
    man.grid_bits = options.grid_bits;
    man.m = options.m;
    man.gap_bytes = options.gap_kib * 1024;
    man.lexicon = options.out_dir / "lexicon.bin";
    man.postings = options.out_dir / "postings.bin";
    man.doclens = options.out_dir / "doclens.bin";
    man.footprints = options.out_dir / "footprints.bin";
    man.footprints_idx = options.out_dir / "footprints.idx";
    man.toeprints = options.out_dir / "toeprints.bin";
    man.grid = options.out_dir / "grid.bin";
    if (options.global_scores) {
        man.global_scores = options.out_dir / "global_scores.tsv";
    }

    try {
        Collection coll = run_stage("ingest", [&] { return ingest(options.corpus); });
        Gazetteer gaz = run_stage("gazetteer", [&] { return Gazetteer::load(options.gazetteer); });
        std::vector<std::optional<Footprint>> footprints = run_stage("geocode", [&] {
            return geocode_collection(coll, gaz, options.geocoder);
        });
        run_stage("index", [&] {
            return build_index(coll, man.index_paths(), options.store_positions);
        });
        run_stage("footprint_store", [&] {
            write_footprint_store(footprints, man.footprints, man.footprints_idx);
            return 0;
        });
        std::vector<Toeprint> toeprints = run_stage("toeprints", [&] {
            auto t = assign_toeprints(footprints, options.grid_bits);
            write_toeprints(t, man.toeprints);
            return t;
        });
        run_stage("grid", [&] {
            TileGrid::build(toeprints, options.grid_bits, options.m).save(man.grid);
            return 0;
        });
        if (options.global_scores) {
            run_stage("global_scores", [&] {
                GlobalScoreTable::load(*options.global_scores);  // validate before copying
                copy_text_file(*options.global_scores, *man.global_scores);
                return 0;
            });
        }
        man.save();
    } catch (...) {
        // No partial indexes: remove everything written so far, manifest last.
        std::error_code ec;
        for (const std::filesystem::path& p : man.files()) {
            std::filesystem::remove(p, ec);
        }
        std::filesystem::remove(options.out_dir / "manifest", ec);
        throw;
    }
    return man;
}

}  // namespace geosearch
