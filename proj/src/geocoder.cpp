#include "geosearch/geocoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace geosearch {

namespace {

PlaceKind parse_kind(const std::string& s, const std::filesystem::path& path, uint64_t line_no) {
    if (s == "city") {
        return PlaceKind::city;
    }
    if (s == "district") {
        return PlaceKind::district;
    }
    if (s == "landmark") {
        return PlaceKind::landmark;
    }
    throw std::runtime_error(path.string() + " line " + std::to_string(line_no) +
                             ": unknown kind '" + s + "'");
}

}  // namespace

Gazetteer::Gazetteer(std::vector<GazetteerEntry> entries) : entries_(std::move(entries)) {
    for (uint32_t i = 0; i < entries_.size(); ++i) {
        const GazetteerEntry& e = entries_[i];
        if (e.name.empty()) {
            throw std::invalid_argument("gazetteer: entry with empty name");
        }
        if (!in_unit_domain(e.rect) || e.rect.area() <= 0.0) {
            throw std::invalid_argument("gazetteer: entry rect must be non-degenerate and inside [0,1]^2");
        }
        by_first_token_[e.name.front()].push_back(i);
    }
    // Longest names first so extraction can stop at the first full match.
    for (auto& [token, ids] : by_first_token_) {
        std::stable_sort(ids.begin(), ids.end(), [&](uint32_t a, uint32_t b) {
            return entries_[a].name.size() > entries_[b].name.size();
        });
    }
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error(path.string() + ": cannot open gazetteer file");
    }
    std::vector<GazetteerEntry> entries;
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
        std::size_t tab1 = line.find('\t');
        std::size_t tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) {
            throw std::runtime_error(path.string() + " line " + std::to_string(line_no) +
                                     ": expected name<TAB>rect<TAB>kind");
        }
        GazetteerEntry e;
        e.name = tokenize(line.substr(0, tab1));
        if (e.name.empty()) {
            throw std::runtime_error(path.string() + " line " + std::to_string(line_no) +
                                     ": name has no tokens");
        }
        std::istringstream coords(line.substr(tab1 + 1, tab2 - tab1 - 1));
        if (!(coords >> e.rect.xmin >> e.rect.ymin >> e.rect.xmax >> e.rect.ymax)) {
            throw std::runtime_error(path.string() + " line " + std::to_string(line_no) +
                                     ": malformed rectangle");
        }
        e.kind = parse_kind(line.substr(tab2 + 1), path, line_no);
        entries.push_back(std::move(e));
    }
    return Gazetteer(std::move(entries));
}

std::span<const uint32_t> Gazetteer::candidates(const std::string& first_token) const {
    auto it = by_first_token_.find(first_token);
    if (it == by_first_token_.end()) {
        return {};
    }
    return it->second;
}

std::vector<GeoMatch> extract(std::span<const std::string> tokens, const Gazetteer& gaz) {
    if (gaz.empty()) {
        throw std::invalid_argument("extract: gazetteer is empty");
    }
    std::vector<GeoMatch> matches;
    std::size_t i = 0;
    while (i < tokens.size()) {
        std::size_t best_len = 0;
        for (uint32_t id : gaz.candidates(tokens[i])) {
            const auto& name = gaz.entries()[id].name;
            if (best_len > 0 && name.size() < best_len) {
                break;  // candidates are ordered longest first
            }
            if (name.size() > tokens.size() - i) {
                continue;
            }
            bool full = std::equal(name.begin(), name.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i));
            if (full) {
                if (best_len == 0) {
                    best_len = name.size();
                    matches.push_back(GeoMatch{static_cast<uint32_t>(i),
                                               static_cast<uint32_t>(name.size()),
                                               {id}});
                } else {
                    matches.back().entry_ids.push_back(id);
                }
            }
        }
        i += best_len > 0 ? best_len : 1;
    }
    return matches;
}

std::vector<GeoMatch> extract(const DocumentRecord& doc, const Gazetteer& gaz) {
    std::vector<std::string> tokens = tokenize(doc.text);
    return extract(tokens, gaz);
}

std::optional<Footprint> resolve(std::span<const GeoMatch> matches, const Gazetteer& gaz,
                                 uint32_t doc_length, const GeocoderParams& params) {
    if (matches.empty()) {
        return std::nullopt;
    }

    // Matches of the same name share the same entry_ids vector, so it doubles
    // as the occurrence-count key.
    std::map<std::vector<uint32_t>, uint32_t> occurrences;
    for (const GeoMatch& m : matches) {
        ++occurrences[m.entry_ids];
    }
    auto certainty_of = [&](const GeoMatch& m) {
        bool early = static_cast<double>(m.position) < params.early_window * doc_length;
        bool repeated = occurrences[m.entry_ids] >= 2;
        return (early || repeated) ? params.anchored_certainty : params.base_certainty;
    };

    // Centroid of unambiguous matches anchors ambiguity resolution.
    double cx = 0.0, cy = 0.0;
    uint32_t n_unambiguous = 0;
    for (const GeoMatch& m : matches) {
        if (m.entry_ids.size() == 1) {
            const Rect& r = gaz.entries()[m.entry_ids.front()].rect;
            cx += (r.xmin + r.xmax) / 2.0;
            cy += (r.ymin + r.ymax) / 2.0;
            ++n_unambiguous;
        }
    }
    if (n_unambiguous > 0) {
        cx /= n_unambiguous;
        cy /= n_unambiguous;
    }

    Footprint fp;
    for (const GeoMatch& m : matches) {
        double certainty = certainty_of(m);
        if (m.entry_ids.size() == 1) {
            fp.regions.push_back({gaz.entries()[m.entry_ids.front()].rect, certainty});
        } else if (n_unambiguous > 0) {
            uint32_t best = m.entry_ids.front();
            double best_d2 = std::numeric_limits<double>::infinity();
            for (uint32_t id : m.entry_ids) {
                const Rect& r = gaz.entries()[id].rect;
                double dx = (r.xmin + r.xmax) / 2.0 - cx;
                double dy = (r.ymin + r.ymax) / 2.0 - cy;
                double d2 = dx * dx + dy * dy;
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = id;
                }
            }
            fp.regions.push_back({gaz.entries()[best].rect, certainty});
        } else {
            double split = certainty / static_cast<double>(m.entry_ids.size());
            for (uint32_t id : m.entry_ids) {
                fp.regions.push_back({gaz.entries()[id].rect, split});
            }
        }
    }
    normalize_footprint(fp);
    return fp;
}

void propagate(std::vector<std::optional<Footprint>>& footprints,
               std::span<const DocumentRecord> docs, const GeocoderParams& params) {
    if (footprints.size() != docs.size()) {
        throw std::invalid_argument("propagate: footprints and docs must be aligned");
    }

    std::map<std::string, std::vector<uint32_t>> sites;
    for (uint32_t i = 0; i < docs.size(); ++i) {
        if (!docs[i].site_key.empty()) {
            sites[docs[i].site_key].push_back(i);
        }
    }

    for (const auto& [site, members] : sites) {
        uint32_t geocoded = 0;
        for (uint32_t i : members) {
            geocoded += footprints[i].has_value() ? 1 : 0;
        }
        if (geocoded < params.site_threshold) {
            continue;
        }
        Footprint inherited;
        for (uint32_t i : members) {
            if (footprints[i]) {
                for (const FootprintRegion& r : footprints[i]->regions) {
                    inherited.regions.push_back({r.rect, r.certainty * params.inherit_factor});
                }
            }
        }
        normalize_footprint(inherited);
        for (uint32_t i : members) {
            if (!footprints[i]) {
                footprints[i] = inherited;
            }
        }
    }
}

std::vector<std::optional<Footprint>> geocode_collection(const Collection& coll,
                                                         const Gazetteer& gaz,
                                                         const GeocoderParams& params) {
    std::vector<std::optional<Footprint>> footprints(coll.docs.size());
    for (const DocumentRecord& doc : coll.docs) {
        std::vector<std::string> tokens = tokenize(doc.text);
        std::vector<GeoMatch> matches = extract(tokens, gaz);
        footprints[doc.doc_id] = resolve(matches, gaz, doc.length, params);
    }
    propagate(footprints, coll.docs, params);
    return footprints;
}

}  // namespace geosearch
