#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "geosearch/corpus.hpp"
#include "geosearch/geometry.hpp"

namespace geosearch {

enum class PlaceKind { city, district, landmark };

struct GazetteerEntry {
    std::vector<std::string> name;  // lowercase token sequence, non-empty
    Rect rect;                      // non-degenerate, inside the unit domain
    PlaceKind kind = PlaceKind::city;
};

// Place-name dictionary. Multiple entries may share a name; that ambiguity is
// resolved later against the document's unambiguous matches.
class Gazetteer {
  public:
    explicit Gazetteer(std::vector<GazetteerEntry> entries);

    // Loads `name<TAB>xmin ymin xmax ymax<TAB>kind` lines.
    static Gazetteer load(const std::filesystem::path& path);

    const std::vector<GazetteerEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    // Entry indices whose name starts with `first_token`, longest names first.
    std::span<const uint32_t> candidates(const std::string& first_token) const;

  private:
    std::vector<GazetteerEntry> entries_;
    std::unordered_map<std::string, std::vector<uint32_t>> by_first_token_;
};

// One maximal place-name occurrence in a token stream. `entry_ids` lists all
// gazetteer entries sharing the matched name; more than one means ambiguity.
struct GeoMatch {
    uint32_t position = 0;  // token offset of the first matched token
    uint32_t length = 1;    // matched tokens
    std::vector<uint32_t> entry_ids;
};

// Tunables for certainty assignment and site propagation. Values are artifact
// choices; tests pin the defaults.
struct GeocoderParams {
    double base_certainty = 0.6;
    double anchored_certainty = 0.9;  // early position or repeated name
    double early_window = 0.10;       // leading fraction of tokens counting as "top of page"
    double inherit_factor = 0.5;      // certainty multiplier for site propagation
    uint32_t site_threshold = 3;      // geocoded docs required before a site propagates
};

// Scans tokens left to right, taking the longest gazetteer name at each
// position; matched spans never overlap.
std::vector<GeoMatch> extract(std::span<const std::string> tokens, const Gazetteer& gaz);
std::vector<GeoMatch> extract(const DocumentRecord& doc, const Gazetteer& gaz);

// Turns matches into a footprint. Ambiguous names resolve to the candidate
// nearest the centroid of the document's unambiguous matches; with no such
// anchor all candidates are kept at certainty/k. Returns nothing when there
// are no matches.
std::optional<Footprint> resolve(std::span<const GeoMatch> matches, const Gazetteer& gaz,
                                 uint32_t doc_length, const GeocoderParams& params = {});

// Site propagation: a document with no footprint inherits the union of its
// site's regions at reduced certainty, when at least `site_threshold`
// documents of that site have footprints. Idempotent.
void propagate(std::vector<std::optional<Footprint>>& footprints,
               std::span<const DocumentRecord> docs, const GeocoderParams& params = {});

// extract + resolve per document, then one propagate pass.
std::vector<std::optional<Footprint>> geocode_collection(const Collection& coll,
                                                         const Gazetteer& gaz,
                                                         const GeocoderParams& params = {});

}  // namespace geosearch
