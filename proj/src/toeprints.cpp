#include "geosearch/toeprints.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

#include "geosearch/morton.hpp"

namespace geosearch {

namespace {

constexpr char kToeprintMagic[4] = {'G', 'S', 'T', 'P'};

Toeprint parse_toeprint(ByteCursor& cur) {
    Toeprint t;
    t.id = cur.u32();
    t.doc_id = cur.u32();
    t.rect.xmin = cur.f64();
    t.rect.ymin = cur.f64();
    t.rect.xmax = cur.f64();
    t.rect.ymax = cur.f64();
    t.certainty = cur.f64();
    return t;
}

}  // namespace

std::vector<Toeprint> assign_toeprints(std::span<const std::optional<Footprint>> footprints,
                                       unsigned grid_bits) {
    std::vector<Toeprint> toeprints;
    for (uint32_t doc = 0; doc < footprints.size(); ++doc) {
        if (!footprints[doc]) {
            continue;
        }
        for (const FootprintRegion& r : footprints[doc]->regions) {
            toeprints.push_back(Toeprint{0, doc, r.rect, r.certainty});
        }
    }

    std::vector<uint32_t> codes(toeprints.size());
    std::vector<uint32_t> order(toeprints.size());
    for (std::size_t i = 0; i < toeprints.size(); ++i) {
        const Rect& r = toeprints[i].rect;
        uint32_t tx = tile_coord((r.xmin + r.xmax) / 2.0, grid_bits);
        uint32_t ty = tile_coord((r.ymin + r.ymax) / 2.0, grid_bits);
        codes[i] = morton_encode(tx, ty, grid_bits);
        order[i] = static_cast<uint32_t>(i);
    }
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        const Toeprint& ta = toeprints[a];
        const Toeprint& tb = toeprints[b];
        return std::tuple{codes[a], ta.doc_id, ta.rect.xmin, ta.rect.ymin,
                          ta.rect.xmax, ta.rect.ymax, ta.certainty} <
               std::tuple{codes[b], tb.doc_id, tb.rect.xmin, tb.rect.ymin,
                          tb.rect.xmax, tb.rect.ymax, tb.certainty};
    });

    std::vector<Toeprint> out;
    out.reserve(toeprints.size());
    for (uint32_t rank = 0; rank < order.size(); ++rank) {
        Toeprint t = toeprints[order[rank]];
        t.id = rank;
        out.push_back(t);
    }
    return out;
}

void write_toeprints(std::span<const Toeprint> toeprints, const std::filesystem::path& path) {
    FileWriter out(path, kToeprintMagic);
    for (const Toeprint& t : toeprints) {
        out.put_u32(t.id);
        out.put_u32(t.doc_id);
        out.put_f64(t.rect.xmin);
        out.put_f64(t.rect.ymin);
        out.put_f64(t.rect.xmax);
        out.put_f64(t.rect.ymax);
        out.put_f64(t.certainty);
    }
    out.close();
}

ToeprintStore ToeprintStore::open(const std::filesystem::path& path) {
    ToeprintStore store;
    store.file_ = RandomAccessFile(path, kToeprintMagic);
    uint64_t payload = store.file_.size() - kFileHeaderSize;
    if (payload % kRecordSize != 0) {
        throw std::runtime_error(path.string() + ": toeprint file size is not a whole record count");
    }
    store.count_ = static_cast<uint32_t>(payload / kRecordSize);
    return store;
}

std::vector<Toeprint> ToeprintStore::fetch_sweep(uint32_t lo, uint32_t hi, IoMeter& meter) const {
    if (lo > hi || hi >= count_) {
        throw std::invalid_argument("fetch_sweep: id range [" + std::to_string(lo) + "," +
                                    std::to_string(hi) + "] out of bounds");
    }
    uint64_t offset = kFileHeaderSize + kRecordSize * lo;
    uint64_t length = kRecordSize * (static_cast<uint64_t>(hi) - lo + 1);
    std::vector<uint8_t> buf = file_.read(offset, length);
    meter.toeprint_bytes += length;
    meter.seek_count += 1;

    std::vector<Toeprint> out;
    out.reserve(hi - lo + 1);
    ByteCursor cur(buf.data(), buf.data() + buf.size(), file_.path().string());
    while (!cur.at_end()) {
        out.push_back(parse_toeprint(cur));
    }
    return out;
}

std::vector<Toeprint> ToeprintStore::read_all() const {
    if (count_ == 0) {
        return {};
    }
    IoMeter scratch;
    return fetch_sweep(0, count_ - 1, scratch);
}

}  // namespace geosearch
