#include "geosearch/manifest.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

#include "geosearch/io.hpp"

namespace geosearch {

namespace {

constexpr const char* kManifestName = "manifest";

void check_magic(const std::filesystem::path& path, const char magic[4]) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error(path.string() + ": missing index file");
    }
    char header[kFileHeaderSize];
    if (!in.read(header, sizeof(header))) {
        throw std::runtime_error(path.string() + ": missing file header");
    }
    if (std::memcmp(header, magic, 4) != 0) {
        throw std::runtime_error(path.string() + ": bad magic (expected " + std::string(magic, 4) + ")");
    }
    uint32_t version;
    std::memcpy(&version, header + 4, 4);
    if (version != kFormatVersion) {
        throw std::runtime_error(path.string() + ": format version " + std::to_string(version) +
                                 " does not match " + std::to_string(kFormatVersion));
    }
}

}  // namespace

IndexManifest IndexManifest::load(const std::filesystem::path& index_dir) {
    std::filesystem::path file = index_dir / kManifestName;
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw std::runtime_error(file.string() + ": cannot open manifest");
    }
    std::map<std::string, std::string> kv;
    std::string line;
    uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(file.string() + " line " + std::to_string(line_no) +
                                     ": expected key=value");
        }
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }

    auto need = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) {
            throw std::runtime_error(file.string() + ": missing key '" + key + "'");
        }
        return it->second;
    };

    IndexManifest man;
    man.dir = index_dir;
    man.format_version = static_cast<uint32_t>(std::stoul(need("format_version")));
    if (man.format_version != kFormatVersion) {
        throw std::runtime_error(file.string() + ": unsupported manifest version " +
                                 std::to_string(man.format_version));
    }
    man.grid_bits = static_cast<unsigned>(std::stoul(need("grid_bits")));
    man.m = static_cast<uint32_t>(std::stoul(need("m")));
    man.gap_bytes = std::stoull(need("gap_bytes"));
    man.lexicon = index_dir / need("lexicon");
    man.postings = index_dir / need("postings");
    man.doclens = index_dir / need("doclens");
    man.footprints = index_dir / need("footprints");
    man.footprints_idx = index_dir / need("footprints_idx");
    man.toeprints = index_dir / need("toeprints");
    man.grid = index_dir / need("grid");
    if (auto it = kv.find("global_scores"); it != kv.end()) {
        man.global_scores = index_dir / it->second;
    }
    return man;
}

void IndexManifest::save() const {
    std::filesystem::path file = dir / kManifestName;
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw std::runtime_error(file.string() + ": cannot write manifest");
    }
    auto rel = [&](const std::filesystem::path& p) {
        return std::filesystem::relative(p, dir).string();
    };
    out << "format_version=" << format_version << '\n'
        << "grid_bits=" << grid_bits << '\n'
        << "m=" << m << '\n'
        << "gap_bytes=" << gap_bytes << '\n'
        << "lexicon=" << rel(lexicon) << '\n'
        << "postings=" << rel(postings) << '\n'
        << "doclens=" << rel(doclens) << '\n'
        << "footprints=" << rel(footprints) << '\n'
        << "footprints_idx=" << rel(footprints_idx) << '\n'
        << "toeprints=" << rel(toeprints) << '\n'
        << "grid=" << rel(grid) << '\n';
    if (global_scores) {
        out << "global_scores=" << rel(*global_scores) << '\n';
    }
    if (!out) {
        throw std::runtime_error(file.string() + ": write failed");
    }
}

void IndexManifest::validate() const {
    check_magic(lexicon, "GSLX");
    check_magic(postings, "GSPS");
    check_magic(doclens, "GSDL");
    check_magic(footprints, "GSFB");
    check_magic(footprints_idx, "GSFX");
    check_magic(toeprints, "GSTP");
    check_magic(grid, "GSGR");
    if (global_scores && !std::filesystem::exists(*global_scores)) {
        throw std::runtime_error(global_scores->string() + ": missing global score file");
    }
}

std::vector<std::filesystem::path> IndexManifest::files() const {
    std::vector<std::filesystem::path> out = {lexicon,   postings,  doclens, footprints,
                                              footprints_idx, toeprints, grid};
    if (global_scores) {
        out.push_back(*global_scores);
    }
    return out;
}

}  // namespace geosearch
