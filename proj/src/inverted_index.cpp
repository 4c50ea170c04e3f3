#include "geosearch/inverted_index.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "geosearch/varint.hpp"

namespace geosearch {

namespace {

constexpr char kLexiconMagic[4] = {'G', 'S', 'L', 'X'};
constexpr char kPostingsMagic[4] = {'G', 'S', 'P', 'S'};
constexpr char kDoclensMagic[4] = {'G', 'S', 'D', 'L'};

void append_posting(std::vector<uint8_t>& out, uint32_t prev_doc, bool first, const Posting& p,
                    bool with_positions) {
    if (!first && p.doc_id <= prev_doc) {
        throw std::invalid_argument("encode_postings: doc_ids must be strictly increasing");
    }
    if (p.freq < 1) {
        throw std::invalid_argument("encode_postings: freq must be >= 1");
    }
    put_varint(out, first ? p.doc_id : p.doc_id - prev_doc);
    put_varint(out, p.freq);
    if (with_positions) {
        if (p.positions.size() != p.freq) {
            throw std::invalid_argument("encode_postings: positions count must equal freq");
        }
        uint32_t prev = 0;
        for (std::size_t i = 0; i < p.positions.size(); ++i) {
            if (i > 0 && p.positions[i] <= prev) {
                throw std::invalid_argument("encode_postings: positions must be strictly increasing");
            }
            put_varint(out, i == 0 ? p.positions[0] : p.positions[i] - prev);
            prev = p.positions[i];
        }
    }
}

}  // namespace

std::vector<uint8_t> encode_postings(std::span<const Posting> postings, bool with_positions) {
    std::vector<uint8_t> out;
    uint32_t prev = 0;
    bool first = true;
    for (const Posting& p : postings) {
        append_posting(out, prev, first, p, with_positions);
        prev = p.doc_id;
        first = false;
    }
    return out;
}

std::vector<Posting> decode_postings(std::span<const uint8_t> bytes, bool with_positions) {
    std::vector<Posting> out;
    const uint8_t* p = bytes.data();
    const uint8_t* end = p + bytes.size();
    uint32_t doc = 0;
    bool first = true;
    while (p != end) {
        Posting posting;
        uint32_t gap = get_varint32(p, end);
        doc = first ? gap : doc + gap;
        first = false;
        posting.doc_id = doc;
        posting.freq = get_varint32(p, end);
        if (with_positions) {
            posting.positions.resize(posting.freq);
            uint32_t pos = 0;
            for (uint32_t i = 0; i < posting.freq; ++i) {
                pos = i == 0 ? get_varint32(p, end) : pos + get_varint32(p, end);
                posting.positions[i] = pos;
            }
        }
        out.push_back(std::move(posting));
    }
    return out;
}

CollectionStats build_index(const Collection& coll, const IndexPaths& paths, bool store_positions) {
    if (coll.docs.empty()) {
        throw std::invalid_argument("build_index: collection is empty");
    }

    struct TermAccum {
        uint32_t doc_freq = 0;
        uint32_t last_doc = 0;
        bool any = false;
        std::vector<uint8_t> bytes;
    };
    std::unordered_map<std::string, TermAccum> accum;

    uint64_t total_tokens = 0;
    std::unordered_map<std::string, Posting> doc_terms;
    for (const DocumentRecord& doc : coll.docs) {
        doc_terms.clear();
        uint32_t position = 0;
        for_each_token(doc.text, [&](std::string_view tok) {
            Posting& p = doc_terms[std::string(tok)];
            p.freq += 1;
            if (store_positions) {
                p.positions.push_back(position);
            }
            ++position;
        });
        total_tokens += position;
        if (position != doc.length) {
            throw std::invalid_argument("build_index: document length does not match its token count");
        }
        for (auto& [term, posting] : doc_terms) {
            posting.doc_id = doc.doc_id;
            TermAccum& a = accum[term];
            append_posting(a.bytes, a.last_doc, !a.any, posting, store_positions);
            a.last_doc = doc.doc_id;
            a.any = true;
            a.doc_freq += 1;
        }
    }

    if (accum.empty()) {
        throw std::invalid_argument("build_index: collection has no tokens");
    }
    std::vector<std::string> terms;
    terms.reserve(accum.size());
    for (const auto& [term, a] : accum) {
        terms.push_back(term);
    }
    std::sort(terms.begin(), terms.end());

    CollectionStats stats;
    stats.n = static_cast<uint32_t>(coll.docs.size());
    stats.vocab_size = static_cast<uint32_t>(terms.size());
    stats.total_tokens = total_tokens;

    {
        FileWriter postings(paths.postings, kPostingsMagic);
        FileWriter lexicon(paths.lexicon, kLexiconMagic);
        lexicon.put_u8(store_positions ? 1 : 0);
        lexicon.put_u32(stats.n);
        lexicon.put_u64(stats.total_tokens);
        lexicon.put_u32(stats.vocab_size);
        for (const std::string& term : terms) {
            const TermAccum& a = accum[term];
            if (term.size() > UINT16_MAX) {
                throw std::invalid_argument("build_index: term longer than 65535 bytes");
            }
            lexicon.put_u16(static_cast<uint16_t>(term.size()));
            lexicon.put_bytes(term.data(), term.size());
            lexicon.put_u32(a.doc_freq);
            lexicon.put_u64(postings.offset());
            lexicon.put_u64(a.bytes.size());
            postings.put_bytes(a.bytes.data(), a.bytes.size());
        }
        postings.close();
        lexicon.close();
    }
    {
        FileWriter doclens(paths.doclens, kDoclensMagic);
        for (const DocumentRecord& doc : coll.docs) {
            doclens.put_u32(doc.length);
        }
        doclens.close();
    }
    return stats;
}

PostingsCursor::PostingsCursor(std::vector<uint8_t> bytes, bool has_positions)
    : bytes_(std::move(bytes)), has_positions_(has_positions) {
    p_ = bytes_.data();
    end_ = p_ + bytes_.size();
    at_end_ = false;
    next();
}

void PostingsCursor::next() {
    if (p_ == end_) {
        at_end_ = true;
        return;
    }
    uint32_t gap = get_varint32(p_, end_);
    doc_id_ = first_ ? gap : doc_id_ + gap;
    first_ = false;
    freq_ = get_varint32(p_, end_);
    if (has_positions_) {
        for (uint32_t i = 0; i < freq_; ++i) {
            get_varint(p_, end_);  // positions are not needed for ranking
        }
    }
}

bool PostingsCursor::advance_to(uint32_t target) {
    while (!at_end_ && doc_id_ < target) {
        next();
    }
    return !at_end_;
}

ConjunctiveStream::ConjunctiveStream(const InvertedIndex& index,
                                     std::span<const std::string> terms, IoMeter* meter) {
    if (terms.empty()) {
        throw std::invalid_argument("daat_stream: term set is empty");
    }
    cursors_.reserve(terms.size());
    freqs_.resize(terms.size(), 0);
    for (const std::string& term : terms) {
        const LexiconEntry* entry = index.find(term);
        if (entry == nullptr) {
            exhausted_ = true;  // a term absent from the lexicon empties the stream
            return;
        }
        cursors_.emplace_back(index.read_run(*entry, meter), index.has_positions());
        if (cursors_.back().at_end()) {
            exhausted_ = true;
            return;
        }
    }
}

bool ConjunctiveStream::next() {
    if (exhausted_) {
        return false;
    }
    if (started_) {
        cursors_.front().next();
        if (cursors_.front().at_end()) {
            exhausted_ = true;
            return false;
        }
    }
    started_ = true;

    uint32_t candidate = 0;
    for (const PostingsCursor& c : cursors_) {
        candidate = std::max(candidate, c.doc_id());
    }
    for (;;) {
        bool aligned = true;
        for (PostingsCursor& c : cursors_) {
            if (!c.advance_to(candidate)) {
                exhausted_ = true;
                return false;
            }
            if (c.doc_id() != candidate) {
                candidate = c.doc_id();
                aligned = false;
                break;
            }
        }
        if (aligned) {
            doc_id_ = candidate;
            for (std::size_t i = 0; i < cursors_.size(); ++i) {
                freqs_[i] = cursors_[i].freq();
            }
            return true;
        }
    }
}

InvertedIndex InvertedIndex::open(const IndexPaths& paths) {
    InvertedIndex idx;

    std::vector<uint8_t> lex = read_payload(paths.lexicon, kLexiconMagic);
    ByteCursor cur(lex.data(), lex.data() + lex.size(), paths.lexicon.string());
    idx.has_positions_ = cur.u8() != 0;
    idx.stats_.n = cur.u32();
    idx.stats_.total_tokens = cur.u64();
    idx.stats_.vocab_size = cur.u32();
    idx.lexicon_.resize(idx.stats_.vocab_size);
    for (LexiconEntry& e : idx.lexicon_) {
        e.term = cur.str(cur.u16());
        e.doc_freq = cur.u32();
        e.byte_offset = cur.u64();
        e.byte_length = cur.u64();
    }
    if (!cur.at_end()) {
        throw std::runtime_error(paths.lexicon.string() + ": trailing bytes after lexicon");
    }

    std::vector<uint8_t> lens = read_payload(paths.doclens, kDoclensMagic);
    if (lens.size() != static_cast<std::size_t>(idx.stats_.n) * 4) {
        throw std::runtime_error(paths.doclens.string() + ": doc length table size mismatch");
    }
    idx.doc_lengths_.resize(idx.stats_.n);
    std::memcpy(idx.doc_lengths_.data(), lens.data(), lens.size());

    idx.postings_ = RandomAccessFile(paths.postings, kPostingsMagic);
    return idx;
}

const LexiconEntry* InvertedIndex::find(std::string_view term) const {
    auto it = std::lower_bound(lexicon_.begin(), lexicon_.end(), term,
                               [](const LexiconEntry& e, std::string_view t) { return e.term < t; });
    if (it == lexicon_.end() || it->term != term) {
        return nullptr;
    }
    return &*it;
}

std::vector<uint8_t> InvertedIndex::read_run(const LexiconEntry& entry, IoMeter* meter) const {
    if (!postings_.is_open()) {
        throw std::logic_error("inverted index is not open");
    }
    if (meter != nullptr) {
        meter->postings_bytes += entry.byte_length;
        meter->seek_count += 1;
    }
    return postings_.read(entry.byte_offset, entry.byte_length);
}

DaatResult InvertedIndex::daat_stream(std::span<const std::string> terms, IoMeter* meter) const {
    DaatResult result;
    result.n_terms = static_cast<uint32_t>(terms.size());
    ConjunctiveStream stream(*this, terms, meter);
    while (stream.next()) {
        result.doc_ids.push_back(stream.doc_id());
        result.freqs.insert(result.freqs.end(), stream.freqs().begin(), stream.freqs().end());
    }
    return result;
}

DaatResult InvertedIndex::filter_docids_scored(std::span<const uint32_t> candidates,
                                               std::span<const std::string> terms,
                                               IoMeter* meter) const {
    if (terms.empty()) {
        throw std::invalid_argument("filter_docids: term set is empty");
    }
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        if (candidates[i] <= candidates[i - 1]) {
            throw std::invalid_argument("filter_docids: candidates must be strictly ascending");
        }
    }

    DaatResult result;
    result.n_terms = static_cast<uint32_t>(terms.size());

    std::vector<uint32_t> survivors(candidates.begin(), candidates.end());
    std::vector<std::vector<uint32_t>> freq_cols(terms.size());

    // Rarest list first tends to empty the survivor set soonest; runs of the
    // remaining terms are then never fetched.
    std::vector<std::size_t> order(terms.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::vector<const LexiconEntry*> entries(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        entries[i] = find(terms[i]);
        if (entries[i] == nullptr) {
            return result;  // unknown term: nothing can survive, nothing is read
        }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return entries[a]->doc_freq < entries[b]->doc_freq;
    });

    std::vector<std::vector<uint32_t>> kept_freqs(terms.size());
    for (std::size_t oi = 0; oi < order.size() && !survivors.empty(); ++oi) {
        std::size_t t = order[oi];
        PostingsCursor cursor(read_run(*entries[t], meter), has_positions_);
        std::vector<uint32_t> next_survivors;
        std::vector<uint32_t> freqs;
        next_survivors.reserve(survivors.size());
        freqs.reserve(survivors.size());
        for (uint32_t doc : survivors) {
            if (!cursor.advance_to(doc)) {
                break;
            }
            if (cursor.doc_id() == doc) {
                next_survivors.push_back(doc);
                freqs.push_back(cursor.freq());
            }
        }
        // Earlier terms kept freqs for docs that may have dropped out; prune.
        for (std::size_t pi = 0; pi < oi; ++pi) {
            std::size_t pt = order[pi];
            std::vector<uint32_t> pruned;
            pruned.reserve(next_survivors.size());
            std::size_t k = 0;
            for (std::size_t s = 0; s < survivors.size(); ++s) {
                if (k < next_survivors.size() && survivors[s] == next_survivors[k]) {
                    pruned.push_back(kept_freqs[pt][s]);
                    ++k;
                }
            }
            kept_freqs[pt] = std::move(pruned);
        }
        kept_freqs[t] = std::move(freqs);
        survivors = std::move(next_survivors);
    }

    result.doc_ids = std::move(survivors);
    result.freqs.resize(result.doc_ids.size() * terms.size());
    for (std::size_t row = 0; row < result.doc_ids.size(); ++row) {
        for (std::size_t t = 0; t < terms.size(); ++t) {
            result.freqs[row * terms.size() + t] = kept_freqs[t][row];
        }
    }
    return result;
}

std::vector<uint32_t> InvertedIndex::filter_docids(std::span<const uint32_t> candidates,
                                                   std::span<const std::string> terms,
                                                   IoMeter* meter) const {
    return filter_docids_scored(candidates, terms, meter).doc_ids;
}

}  // namespace geosearch
