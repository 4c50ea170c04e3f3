#include <doctest.h>

#include <fstream>
#include <sstream>

#include "geosearch/cli.hpp"
#include "geosearch/manifest.hpp"
#include "support/fixtures.hpp"

using namespace geosearch;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Five tiny documents around one place; enough for a full build.
std::filesystem::path tiny_inputs() {
    static std::filesystem::path dir = [] {
        auto d = testfx::fresh_dir("cli_tiny");
        testfx::write_file(d / "corpus.tsv",
                           "s0\tyoga classes in riverton today\n"
                           "s0\tcheap yoga riverton lessons\n"
                           "s0\triverton news and weather\n"
                           "s0\tgeneral text without places\n"
                           "\tanother plain document yoga\n");
        testfx::write_file(d / "gaz.tsv", "riverton\t0.40 0.40 0.46 0.45\tcity\n");
        return d;
    }();
    return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("build writes a seven-file manifest") {
    auto dir = tiny_inputs();
    auto out = testfx::fresh_dir("cli_idx");
    CliResult r = cli({"build", "--corpus", (dir / "corpus.tsv").string(), "--gazetteer",
                       (dir / "gaz.tsv").string(), "--out", out.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("7 files") != std::string::npos);

    IndexManifest man = IndexManifest::load(out);
    man.validate();
    CHECK(man.files().size() == 7);
    for (const auto& file : man.files()) {
        CHECK(std::filesystem::exists(file));
    }
}

TEST_CASE("build fails cleanly when an input is missing") {
    auto out = testfx::fresh_dir("cli_missing");
    CliResult r = cli({"build", "--corpus", (tiny_inputs() / "corpus.tsv").string(), "--gazetteer",
                       (out / "nope.tsv").string(), "--out", (out / "idx").string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("--gazetteer") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(out / "idx" / "manifest"));
}

TEST_CASE("build failure removes partial outputs") {
    auto dir = testfx::fresh_dir("cli_partial");
    testfx::write_file(dir / "corpus.tsv", "s0\tfine\nbroken line without tab\n");
    testfx::write_file(dir / "gaz.tsv", "riverton\t0.4 0.4 0.46 0.45\tcity\n");
    CliResult r = cli({"build", "--corpus", (dir / "corpus.tsv").string(), "--gazetteer",
                       (dir / "gaz.tsv").string(), "--out", (dir / "idx").string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("ingest") != std::string::npos);  // failing stage is named
    CHECK_FALSE(std::filesystem::exists(dir / "idx" / "manifest"));
    CHECK_FALSE(std::filesystem::exists(dir / "idx" / "lexicon.bin"));
}

TEST_CASE("rebuilds from identical inputs are byte-identical") {
    auto dir = tiny_inputs();
    auto a = testfx::fresh_dir("cli_det_a");
    auto b = testfx::fresh_dir("cli_det_b");
    for (const auto& out : {a, b}) {
        CliResult r = cli({"build", "--corpus", (dir / "corpus.tsv").string(), "--gazetteer",
                           (dir / "gaz.tsv").string(), "--out", out.string()});
        REQUIRE(r.code == 0);
    }
    for (const char* name : {"lexicon.bin", "postings.bin", "doclens.bin", "footprints.bin",
                             "footprints.idx", "toeprints.bin", "grid.bin", "manifest"}) {
        CHECK(slurp(a / name) == slurp(b / name));
    }
}

TEST_CASE("query prints one line per hit and agrees across algorithms") {
    auto out = testfx::fresh_dir("cli_q_idx");
    auto dir = tiny_inputs();
    REQUIRE(cli({"build", "--corpus", (dir / "corpus.tsv").string(), "--gazetteer",
                 (dir / "gaz.tsv").string(), "--out", out.string()})
                .code == 0);

    std::vector<std::string> base = {"query",  "--index", out.string(),          "--terms", "yoga",
                                     "--rect", "0.3 0.3 0.6 0.6"};
    auto with_algo = [&](const std::string& algo) {
        auto args = base;
        args.push_back("--algo");
        args.push_back(algo);
        return cli(args);
    };

    CliResult oracle = with_algo("oracle");
    CHECK(oracle.code == 0);
    // Docs 0 and 1 contain "yoga" and sit on the geocoded site; doc 4 has
    // "yoga" but no footprint and must not appear.
    CHECK(std::count(oracle.out.begin(), oracle.out.end(), '\n') >= 2);
    CHECK(oracle.out.find("\t4\t") == std::string::npos);

    for (const std::string algo : {"text-first", "geo-first", "k-sweep"}) {
        CliResult r = with_algo(algo);
        CHECK(r.code == 0);
        CHECK(r.out == oracle.out);  // identical stdout, scores included
    }
}

TEST_CASE("query flag validation") {
    auto dir = tiny_inputs();
    auto out = testfx::fresh_dir("cli_q_val");
    REQUIRE(cli({"build", "--corpus", (dir / "corpus.tsv").string(), "--gazetteer",
                 (dir / "gaz.tsv").string(), "--out", out.string()})
                .code == 0);

    CliResult unknown = cli({"query", "--index", out.string(), "--algo", "fastest", "--terms",
                             "yoga", "--rect", "0 0 1 1"});
    CHECK(unknown.code != 0);

    CliResult bad_rect = cli({"query", "--index", out.string(), "--terms", "yoga", "--rect",
                              "0 0 2 1"});
    CHECK(bad_rect.code != 0);
    CHECK(bad_rect.err.find("--rect") != std::string::npos);

    CliResult k1 = cli({"query", "--index", out.string(), "--terms", "yoga riverton", "--rect",
                        "0.3 0.3 0.6 0.6", "--k", "1"});
    CHECK(k1.code == 0);
    CHECK(std::count(k1.out.begin(), k1.out.end(), '\n') == 1);

    CliResult empty = cli({"query", "--index", out.string(), "--terms", "absentterm", "--rect",
                           "0.3 0.3 0.6 0.6"});
    CHECK(empty.code == 0);  // empty result is still a success
    CHECK(empty.out.empty());
}

TEST_CASE("gen then bench runs end to end") {
    auto dir = testfx::fresh_dir("cli_bench");
    CliResult gen = cli({"gen", "--out", (dir / "data").string(), "--docs", "400", "--vocab",
                         "300", "--clusters", "4", "--seed", "9", "--queries", "12"});
    REQUIRE(gen.code == 0);
    REQUIRE(cli({"build", "--corpus", (dir / "data" / "corpus.tsv").string(), "--gazetteer",
                 (dir / "data" / "gazetteer.tsv").string(), "--out", (dir / "idx").string()})
                .code == 0);

    CliResult bench = cli({"bench", "--index", (dir / "idx").string(), "--trace",
                           (dir / "data" / "trace.tsv").string(), "--algos", "k-sweep",
                           "--report", (dir / "report.csv").string()});
    CHECK(bench.code == 0);
    CHECK(bench.out.find("k-sweep") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "report.csv"));

    CliResult study = cli({"sweep-study", "--index", (dir / "idx").string(), "--trace",
                           (dir / "data" / "trace.tsv").string(), "--k-grid", "2,4", "--m-grid",
                           "2"});
    CHECK(study.code == 0);
    CHECK(study.out.find("ratio") != std::string::npos);

    CliResult corrupt = [&] {
        testfx::write_file(dir / "bad_trace.tsv", "ok\t0 0 1 1\nbroken rect\t0 0\n");
        return cli({"bench", "--index", (dir / "idx").string(), "--trace",
                    (dir / "bad_trace.tsv").string()});
    }();
    CHECK(corrupt.code != 0);
    CHECK(corrupt.err.find("line 2") != std::string::npos);
}

TEST_CASE("unknown subcommands and empty invocations fail") {
    CHECK(cli({}).code != 0);
    CHECK(cli({"frobnicate"}).code != 0);
}

TEST_CASE("manifest validation rejects tampered index files") {
    auto dir = tiny_inputs();
    auto out = testfx::fresh_dir("cli_tamper");
    REQUIRE(cli({"build", "--corpus", (dir / "corpus.tsv").string(), "--gazetteer",
                 (dir / "gaz.tsv").string(), "--out", out.string()})
                .code == 0);
    {
        std::fstream f(out / "toeprints.bin", std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.put('X');  // clobber the magic
    }
    IndexManifest man = IndexManifest::load(out);
    CHECK_THROWS_WITH_AS(man.validate(), doctest::Contains("bad magic"), std::runtime_error);
    CliResult r = cli({"query", "--index", out.string(), "--terms", "yoga", "--rect",
                       "0.3 0.3 0.6 0.6"});
    CHECK(r.code != 0);
}

TEST_CASE("an index cannot be built from a corpus with no tokens") {
    auto dir = testfx::fresh_dir("cli_notokens");
    testfx::write_file(dir / "corpus.tsv", "s0\t\ns1\t...\n");
    testfx::write_file(dir / "gaz.tsv", "riverton\t0.4 0.4 0.46 0.45\tcity\n");
    CliResult r = cli({"build", "--corpus", (dir / "corpus.tsv").string(), "--gazetteer",
                       (dir / "gaz.tsv").string(), "--out", (dir / "idx").string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("index") != std::string::npos);  // the failing stage
    CHECK_FALSE(std::filesystem::exists(dir / "idx" / "manifest"));
}

}  // TEST_SUITE
