#include "geosearch/footprint_store.hpp"

#include <algorithm>
#include <stdexcept>

namespace geosearch {

namespace {

constexpr char kBinMagic[4] = {'G', 'S', 'F', 'B'};
constexpr char kIdxMagic[4] = {'G', 'S', 'F', 'X'};

Footprint parse_record(ByteCursor& cur, uint32_t expected_doc) {
    uint32_t doc = cur.u32();
    if (doc != expected_doc) {
        throw std::runtime_error("footprint store: record doc_id mismatch (expected " +
                                 std::to_string(expected_doc) + ", found " + std::to_string(doc) + ")");
    }
    uint16_t count = cur.u16();
    Footprint fp;
    fp.regions.resize(count);
    for (FootprintRegion& r : fp.regions) {
        r.rect.xmin = cur.f64();
        r.rect.ymin = cur.f64();
        r.rect.xmax = cur.f64();
        r.rect.ymax = cur.f64();
        r.certainty = cur.f64();
    }
    return fp;
}

}  // namespace

FetchPlan plan_fetch(std::span<const FootprintOffsetEntry> table, std::span<const uint32_t> doc_ids,
                     uint64_t gap_threshold_bytes) {
    FetchPlan plan;
    plan.doc_ids.assign(doc_ids.begin(), doc_ids.end());
    uint64_t prev_end = 0;
    uint32_t prev_doc = 0;
    for (std::size_t i = 0; i < doc_ids.size(); ++i) {
        if (i > 0 && doc_ids[i] <= prev_doc) {
            throw std::invalid_argument("plan_fetch: doc_ids must be strictly ascending");
        }
        prev_doc = doc_ids[i];
        auto it = std::lower_bound(table.begin(), table.end(), doc_ids[i],
                                   [](const FootprintOffsetEntry& e, uint32_t d) { return e.doc_id < d; });
        if (it == table.end() || it->doc_id != doc_ids[i]) {
            throw std::runtime_error("plan_fetch: doc " + std::to_string(doc_ids[i]) +
                                     " has no footprint record");
        }
        uint64_t begin = it->offset;
        uint64_t end = it->offset + it->length;
        if (!plan.runs.empty() && begin - prev_end <= gap_threshold_bytes) {
            plan.runs.back().end = end;
        } else {
            plan.runs.push_back({begin, end});
        }
        prev_end = end;
    }
    return plan;
}

void write_footprint_store(std::span<const std::optional<Footprint>> footprints,
                           const std::filesystem::path& bin_path,
                           const std::filesystem::path& idx_path) {
    FileWriter bin(bin_path, kBinMagic);
    std::vector<FootprintOffsetEntry> entries;
    for (uint32_t doc = 0; doc < footprints.size(); ++doc) {
        if (!footprints[doc]) {
            continue;
        }
        const Footprint& fp = *footprints[doc];
        if (fp.regions.size() > UINT16_MAX) {
            throw std::invalid_argument("footprint store: more than 65535 regions in one footprint");
        }
        FootprintOffsetEntry e;
        e.doc_id = doc;
        e.offset = bin.offset();
        e.mbr = fp.bounds();
        bin.put_u32(doc);
        bin.put_u16(static_cast<uint16_t>(fp.regions.size()));
        for (const FootprintRegion& r : fp.regions) {
            bin.put_f64(r.rect.xmin);
            bin.put_f64(r.rect.ymin);
            bin.put_f64(r.rect.xmax);
            bin.put_f64(r.rect.ymax);
            bin.put_f64(r.certainty);
        }
        e.length = static_cast<uint32_t>(bin.offset() - e.offset);
        entries.push_back(e);
    }
    bin.close();

    FileWriter idx(idx_path, kIdxMagic);
    idx.put_u32(static_cast<uint32_t>(entries.size()));
    for (const FootprintOffsetEntry& e : entries) {
        idx.put_u32(e.doc_id);
        idx.put_u64(e.offset);
        idx.put_u32(e.length);
        idx.put_f64(e.mbr.xmin);
        idx.put_f64(e.mbr.ymin);
        idx.put_f64(e.mbr.xmax);
        idx.put_f64(e.mbr.ymax);
    }
    idx.close();
}

FootprintStore FootprintStore::open(const std::filesystem::path& bin_path,
                                    const std::filesystem::path& idx_path) {
    FootprintStore store;
    std::vector<uint8_t> idx = read_payload(idx_path, kIdxMagic);
    ByteCursor cur(idx.data(), idx.data() + idx.size(), idx_path.string());
    store.entries_.resize(cur.u32());
    for (FootprintOffsetEntry& e : store.entries_) {
        e.doc_id = cur.u32();
        e.offset = cur.u64();
        e.length = cur.u32();
        e.mbr.xmin = cur.f64();
        e.mbr.ymin = cur.f64();
        e.mbr.xmax = cur.f64();
        e.mbr.ymax = cur.f64();
    }
    if (!cur.at_end()) {
        throw std::runtime_error(idx_path.string() + ": trailing bytes after offset table");
    }
    store.bin_ = RandomAccessFile(bin_path, kBinMagic);
    return store;
}

const FootprintOffsetEntry* FootprintStore::lookup(uint32_t doc_id) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), doc_id,
                               [](const FootprintOffsetEntry& e, uint32_t d) { return e.doc_id < d; });
    if (it == entries_.end() || it->doc_id != doc_id) {
        return nullptr;
    }
    return &*it;
}

std::vector<FootprintRecord> FootprintStore::fetch(const FetchPlan& plan, IoMeter& meter) const {
    std::vector<FootprintRecord> out;
    out.reserve(plan.doc_ids.size());
    std::size_t next_doc = 0;
    for (const FetchPlan::Run& run : plan.runs) {
        if (run.end < run.begin) {
            throw std::invalid_argument("fetch: malformed run");
        }
        std::vector<uint8_t> buf = bin_.read(run.begin, run.end - run.begin);
        meter.footprint_bytes += run.end - run.begin;
        meter.seek_count += 1;
        while (next_doc < plan.doc_ids.size()) {
            const FootprintOffsetEntry* e = lookup(plan.doc_ids[next_doc]);
            if (e == nullptr) {
                throw std::runtime_error("fetch: doc " + std::to_string(plan.doc_ids[next_doc]) +
                                         " has no footprint record");
            }
            if (e->offset < run.begin || e->offset + e->length > run.end) {
                break;  // belongs to a later run
            }
            ByteCursor cur(buf.data() + (e->offset - run.begin),
                           buf.data() + (e->offset - run.begin) + e->length, bin_.path().string());
            out.push_back({e->doc_id, parse_record(cur, e->doc_id)});
            ++next_doc;
        }
    }
    if (next_doc != plan.doc_ids.size()) {
        throw std::runtime_error("fetch: plan does not cover every requested record");
    }
    return out;
}

std::vector<FootprintRecord> FootprintStore::read_all() const {
    std::vector<FootprintRecord> out;
    out.reserve(entries_.size());
    for (const FootprintOffsetEntry& e : entries_) {
        std::vector<uint8_t> buf = bin_.read(e.offset, e.length);
        ByteCursor cur(buf.data(), buf.data() + buf.size(), bin_.path().string());
        out.push_back({e.doc_id, parse_record(cur, e.doc_id)});
    }
    return out;
}

}  // namespace geosearch
