#pragma once

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "geosearch/build_pipeline.hpp"
#include "geosearch/corpus.hpp"
#include "geosearch/synthetic.hpp"

namespace geosearch::testfx {

inline std::filesystem::path temp_root() {
    static std::filesystem::path root = [] {
        std::filesystem::path p = std::filesystem::temp_directory_path() /
                                  ("geosearch_tests_" + std::to_string(::getpid()));
        std::filesystem::create_directories(p);
        return p;
    }();
    return root;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
    std::filesystem::path dir = temp_root() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

inline SyntheticSpec small_spec() {
    SyntheticSpec spec;
    spec.n_docs = 1200;
    spec.vocab_size = 600;
    spec.zipf_s = 1.0;
    spec.n_clusters = 8;
    spec.seed = 1234;
    return spec;
}

struct BuiltFixture {
    SyntheticFiles files;
    IndexManifest manifest;
};

// Small synthetic index shared across test cases; built once per process.
inline const BuiltFixture& small_fixture() {
    static BuiltFixture fixture = [] {
        std::filesystem::path dir = fresh_dir("small");
        SyntheticGenerator gen(small_spec());
        TraceSpec trace;
        trace.n_queries = 40;
        BuiltFixture f;
        f.files = gen.write_all(dir / "data", trace);
        BuildOptions options;
        options.corpus = f.files.corpus;
        options.gazetteer = f.files.gazetteer;
        options.out_dir = dir / "idx";
        f.manifest = build_all(options);
        return f;
    }();
    return fixture;
}

inline const Collection& small_collection() {
    static Collection coll = ingest(small_fixture().files.corpus);
    return coll;
}

}  // namespace geosearch::testfx
