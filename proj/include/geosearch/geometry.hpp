#pragma once

#include <algorithm>
#include <cstddef>
#include <tuple>
#include <vector>

namespace geosearch {

// Axis-aligned rectangle in the normalized [0,1]x[0,1] domain.
struct Rect {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 0.0;
    double ymax = 0.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }

    // Closed intersection test: touching edges count.
    bool intersects(const Rect& o) const {
        return xmin <= o.xmax && o.xmin <= xmax && ymin <= o.ymax && o.ymin <= ymax;
    }

    bool contains(const Rect& o) const {
        return xmin <= o.xmin && o.xmax <= xmax && ymin <= o.ymin && o.ymax <= ymax;
    }

    Rect merged(const Rect& o) const {
        return {std::min(xmin, o.xmin), std::min(ymin, o.ymin),
                std::max(xmax, o.xmax), std::max(ymax, o.ymax)};
    }

    bool operator==(const Rect&) const = default;
};

inline double intersection_area(const Rect& a, const Rect& b) {
    double w = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
    double h = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
    if (w <= 0.0 || h <= 0.0) {
        return 0.0;
    }
    return w * h;
}

inline bool in_unit_domain(const Rect& r) {
    return r.xmin >= 0.0 && r.ymin >= 0.0 && r.xmax <= 1.0 && r.ymax <= 1.0 &&
           r.xmin <= r.xmax && r.ymin <= r.ymax;
}

// One weighted region of a document footprint.
struct FootprintRegion {
    Rect rect;
    double certainty = 1.0;  // in (0,1]

    bool operator==(const FootprintRegion&) const = default;
};

inline bool region_less(const FootprintRegion& a, const FootprintRegion& b) {
    auto key = [](const FootprintRegion& r) {
        return std::tuple{r.rect.xmin, r.rect.ymin, r.rect.xmax, r.rect.ymax, r.certainty};
    };
    return key(a) < key(b);
}

// A document's (or query's) area of geographic relevance: weighted rectangles,
// possibly disjoint.
struct Footprint {
    std::vector<FootprintRegion> regions;

    bool empty() const { return regions.empty(); }

    // Tight bounding box over all regions; meaningless for empty footprints.
    Rect bounds() const {
        Rect b = regions.front().rect;
        for (std::size_t i = 1; i < regions.size(); ++i) {
            b = b.merged(regions[i].rect);
        }
        return b;
    }

    bool operator==(const Footprint&) const = default;
};

inline Footprint single_rect_footprint(const Rect& r, double certainty = 1.0) {
    return Footprint{{FootprintRegion{r, certainty}}};
}

// Sorts regions into the canonical order and merges identical rectangles,
// keeping the maximum certainty. Every footprint producer runs this, so a
// footprint reassembled from its toeprints sums region contributions in the
// same order as one read from the footprint store.
inline void normalize_footprint(Footprint& fp) {
    std::sort(fp.regions.begin(), fp.regions.end(), region_less);
    std::vector<FootprintRegion> merged;
    for (const FootprintRegion& r : fp.regions) {
        if (!merged.empty() && merged.back().rect == r.rect) {
            merged.back().certainty = std::max(merged.back().certainty, r.certainty);
        } else {
            merged.push_back(r);
        }
    }
    fp.regions = std::move(merged);
}

inline bool valid_footprint(const Footprint& fp) {
    if (fp.empty()) {
        return false;
    }
    for (const FootprintRegion& r : fp.regions) {
        if (!in_unit_domain(r.rect) || r.rect.area() <= 0.0) {
            return false;
        }
        if (!(r.certainty > 0.0) || r.certainty > 1.0) {
            return false;
        }
    }
    return true;
}

}  // namespace geosearch
