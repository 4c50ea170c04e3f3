#include "geosearch/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include "geosearch/geometry.hpp"

namespace geosearch {

namespace {

// Distribution helpers are hand-rolled on top of mt19937_64 so generated
// files are stable across standard library implementations.
double u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

uint64_t uniform_below(std::mt19937_64& rng, uint64_t n) {
    return rng() % n;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::exp(std::log(lo) + u01(rng) * (std::log(hi) - std::log(lo)));
}

std::string format_rect(const Rect& r) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %.6f", r.xmin, r.ymin, r.xmax, r.ymax);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error(path.string() + ": cannot open for writing");
    }
    return out;
}

constexpr const char* kKinds[3] = {"city", "district", "landmark"};
constexpr double kPi = 3.14159265358979323846;

}  // namespace

std::string SyntheticGenerator::term_for_rank(uint64_t rank) {
    static constexpr char cons[] = "bcdfghjklmnprstvz";
    static constexpr char vows[] = "aeiou";
    std::string w;
    uint64_t v = rank;
    do {
        w += cons[v % 17];
        w += vows[(v / 17) % 5];
        v /= 85;
    } while (v > 0);
    return w;
}

SyntheticGenerator::SyntheticGenerator(const SyntheticSpec& spec) : spec_(spec) {
    if (spec_.n_docs < 1 || spec_.vocab_size < 1 || spec_.n_clusters < 1) {
        throw std::invalid_argument("synthetic: all counts must be >= 1");
    }
    if (!(spec_.zipf_s > 0.0)) {
        throw std::invalid_argument("synthetic: zipf_s must be > 0");
    }

    zipf_cdf_.resize(spec_.vocab_size);
    double acc = 0.0;
    for (uint32_t r = 0; r < spec_.vocab_size; ++r) {
        acc += std::pow(static_cast<double>(r + 1), -spec_.zipf_s);
        zipf_cdf_[r] = acc;
    }
    for (double& v : zipf_cdf_) {
        v /= acc;
    }

    std::mt19937_64 rng(spec_.seed ^ 0xC1A5u);
    cluster_x_.resize(spec_.n_clusters);
    cluster_y_.resize(spec_.n_clusters);
    cluster_r_.resize(spec_.n_clusters);
    for (uint32_t c = 0; c < spec_.n_clusters; ++c) {
        cluster_x_[c] = 0.12 + 0.76 * u01(rng);
        cluster_y_[c] = 0.12 + 0.76 * u01(rng);
        cluster_r_[c] = 0.04 + 0.05 * u01(rng);
    }

    auto sample_rect = [&](uint32_t c) {
        double ang = 2.0 * kPi * u01(rng);
        double rad = cluster_r_[c] * std::sqrt(u01(rng));
        double cx = std::clamp(cluster_x_[c] + rad * std::cos(ang), 0.03, 0.97);
        double cy = std::clamp(cluster_y_[c] + rad * std::sin(ang), 0.03, 0.97);
        double hx = 0.002 + 0.006 * u01(rng);
        double hy = 0.002 + 0.006 * u01(rng);
        return Rect{cx - hx, cy - hy, cx + hx, cy + hy};
    };
    auto add_line = [&](const std::string& name, const Rect& r, uint32_t j) {
        gazetteer_lines_.push_back(name + "\t" + format_rect(r) + "\t" + kKinds[j % 3]);
    };

    // A few names get a longer two-token variant (exercises longest-match
    // extraction) and a few are duplicated in a second cluster (ambiguity).
    const uint32_t n_places = std::max<uint32_t>(24, 8 * spec_.n_clusters);
    cluster_places_.resize(spec_.n_clusters);
    for (uint32_t j = 0; j < n_places; ++j) {
        uint32_t cluster = j % spec_.n_clusters;
        std::string primary = term_for_rank(spec_.vocab_size + 1000 + 3ull * j);
        add_line(primary, sample_rect(cluster), j);
        cluster_places_[cluster].push_back(static_cast<uint32_t>(embeds_.size()));
        embeds_.push_back(Embed{primary, cluster, 1});
        if (j % 7 == 3) {
            std::string longer = primary + " " + term_for_rank(spec_.vocab_size + 1000 + 3ull * j + 1);
            add_line(longer, sample_rect(cluster), j);
            cluster_places_[cluster].push_back(static_cast<uint32_t>(embeds_.size()));
            embeds_.push_back(Embed{longer, cluster, 2});
        }
        if (j % 13 == 5) {
            uint32_t other = (j + 1 + spec_.n_clusters / 2) % spec_.n_clusters;
            add_line(primary, sample_rect(other), j);
        }
    }
}

void SyntheticGenerator::write_corpus(const std::filesystem::path& path) const {
    std::ofstream out = open_out(path);
    std::mt19937_64 rng(spec_.seed ^ 0xD0C5u);
    auto zipf_rank = [&]() {
        double u = u01(rng);
        auto it = std::lower_bound(zipf_cdf_.begin(), zipf_cdf_.end(), u);
        if (it == zipf_cdf_.end()) {
            --it;
        }
        return static_cast<uint64_t>(it - zipf_cdf_.begin());
    };

    std::vector<std::string> tokens;
    for (uint32_t i = 0; i < spec_.n_docs; ++i) {
        tokens.clear();
        uint32_t length = 40 + static_cast<uint32_t>(uniform_below(rng, 121));
        for (uint32_t t = 0; t < length; ++t) {
            tokens.push_back(term_for_rank(zipf_rank()));
        }

        uint32_t site_id = i / 12;
        uint32_t home = site_id % spec_.n_clusters;
        double u = u01(rng);
        uint32_t n_embeds = u < 0.25 ? 0 : u < 0.65 ? 1 : u < 0.90 ? 2 : 3;
        for (uint32_t e = 0; e < n_embeds; ++e) {
            uint32_t cluster =
                u01(rng) < 0.8 ? home : static_cast<uint32_t>(uniform_below(rng, spec_.n_clusters));
            const auto& pool = cluster_places_[cluster];
            const Embed& embed = embeds_[pool[uniform_below(rng, pool.size())]];
            uint32_t repeats = u01(rng) < 0.15 ? 2 : 1;
            for (uint32_t rep = 0; rep < repeats; ++rep) {
                std::size_t pos = uniform_below(rng, tokens.size() + 1);
                tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos), embed.text);
            }
        }

        std::string site_key = u01(rng) < 0.10 ? std::string() : "s" + std::to_string(site_id);
        out << site_key << '\t';
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            if (t > 0) {
                out << ' ';
            }
            out << tokens[t];
        }
        out << '\n';
    }
    if (!out) {
        throw std::runtime_error(path.string() + ": write failed");
    }
}

void SyntheticGenerator::write_gazetteer(const std::filesystem::path& path) const {
    std::ofstream out = open_out(path);
    for (const std::string& line : gazetteer_lines_) {
        out << line << '\n';
    }
    if (!out) {
        throw std::runtime_error(path.string() + ": write failed");
    }
}

void SyntheticGenerator::write_trace(const std::filesystem::path& path, const TraceSpec& trace) const {
    if (trace.n_queries < 1) {
        throw std::invalid_argument("trace: n_queries must be >= 1");
    }
    if (!(trace.min_area_frac > 0.0) || trace.min_area_frac > trace.max_area_frac ||
        trace.max_area_frac > 1.0) {
        throw std::invalid_argument("trace: need 0 < min_area_frac <= max_area_frac <= 1");
    }
    if (!(trace.term_rank_frac > 0.0) || trace.term_rank_frac > 1.0) {
        throw std::invalid_argument("trace: term_rank_frac must be in (0,1]");
    }

    std::ofstream out = open_out(path);
    std::mt19937_64 rng(spec_.seed ^ 0x7ACEu ^ (trace.salt * 0x9E3779B97F4A7C15ull));
    uint32_t rank_cap =
        std::max<uint32_t>(1, static_cast<uint32_t>(trace.term_rank_frac * spec_.vocab_size));

    for (uint32_t q = 0; q < trace.n_queries; ++q) {
        uint32_t n_terms = 1 + static_cast<uint32_t>(uniform_below(rng, 3));
        std::vector<std::string> terms;
        for (uint32_t t = 0; t < n_terms; ++t) {
            std::string term = term_for_rank(uniform_below(rng, rank_cap));
            if (std::find(terms.begin(), terms.end(), term) == terms.end()) {
                terms.push_back(term);
            }
        }

        double area = log_uniform(rng, trace.min_area_frac, trace.max_area_frac);
        double aspect = 0.5 * std::exp(u01(rng) * std::log(4.0));
        double w = std::sqrt(area * aspect);
        double h;
        if (w > 1.0) {
            w = 1.0;
            h = area;
        } else {
            h = area / w;
            if (h > 1.0) {
                h = 1.0;
                w = area;
            }
        }
        w = std::max(w, 2e-5);
        h = std::max(h, 2e-5);

        double cx, cy;
        if (u01(rng) < 0.7) {
            uint32_t c = static_cast<uint32_t>(uniform_below(rng, spec_.n_clusters));
            double ang = 2.0 * kPi * u01(rng);
            double rad = 1.5 * cluster_r_[c] * std::sqrt(u01(rng));
            cx = cluster_x_[c] + rad * std::cos(ang);
            cy = cluster_y_[c] + rad * std::sin(ang);
        } else {
            cx = u01(rng);
            cy = u01(rng);
        }
        cx = std::clamp(cx, w / 2.0, 1.0 - w / 2.0);
        cy = std::clamp(cy, h / 2.0, 1.0 - h / 2.0);

        for (std::size_t t = 0; t < terms.size(); ++t) {
            if (t > 0) {
                out << ' ';
            }
            out << terms[t];
        }
        out << '\t' << format_rect(Rect{cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0})
            << '\n';
    }
    if (!out) {
        throw std::runtime_error(path.string() + ": write failed");
    }
}

SyntheticFiles SyntheticGenerator::write_all(const std::filesystem::path& dir,
                                             const TraceSpec& trace) const {
    std::filesystem::create_directories(dir);
    SyntheticFiles files{dir / "corpus.tsv", dir / "gazetteer.tsv", dir / "trace.tsv"};
    write_corpus(files.corpus);
    write_gazetteer(files.gazetteer);
    write_trace(files.trace, trace);
    return files;
}

}  // namespace geosearch
