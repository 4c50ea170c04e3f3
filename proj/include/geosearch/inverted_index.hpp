#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geosearch/corpus.hpp"
#include "geosearch/io.hpp"
#include "geosearch/io_meter.hpp"

namespace geosearch {

struct Posting {
    uint32_t doc_id = 0;
    uint32_t freq = 0;                // per-document term frequency, >= 1
    std::vector<uint32_t> positions;  // optional; strictly increasing, size == freq
};

struct LexiconEntry {
    std::string term;
    uint32_t doc_freq = 0;    // number of documents containing the term
    uint64_t byte_offset = 0; // absolute offset of the postings run
    uint64_t byte_length = 0;
};

struct IndexPaths {
    std::filesystem::path lexicon;
    std::filesystem::path postings;
    std::filesystem::path doclens;
};

// Wire format of one postings run: doc IDs delta-encoded (first absolute),
// every integer a varint, the frequency following each gap. When positions
// are embedded they follow the frequency as `freq` delta-encoded varints.
std::vector<uint8_t> encode_postings(std::span<const Posting> postings, bool with_positions = false);
std::vector<Posting> decode_postings(std::span<const uint8_t> bytes, bool with_positions = false);

// Builds the three on-disk index files. Returns the collection stats that
// were embedded in the lexicon header.
CollectionStats build_index(const Collection& coll, const IndexPaths& paths,
                            bool store_positions = false);

class InvertedIndex;

// Sequential decoder over one postings run.
class PostingsCursor {
  public:
    PostingsCursor() = default;
    PostingsCursor(std::vector<uint8_t> bytes, bool has_positions);

    bool at_end() const { return at_end_; }
    uint32_t doc_id() const { return doc_id_; }
    uint32_t freq() const { return freq_; }
    void next();
    // Advances until doc_id() >= target; returns false when the run ends first.
    bool advance_to(uint32_t target);

  private:
    std::vector<uint8_t> bytes_;
    const uint8_t* p_ = nullptr;
    const uint8_t* end_ = nullptr;
    uint32_t doc_id_ = 0;
    uint32_t freq_ = 0;
    bool first_ = true;
    bool at_end_ = true;
    bool has_positions_ = false;
};

// Document-at-a-time conjunction over a set of terms: emits exactly the
// documents containing every term, in ascending doc ID order.
class ConjunctiveStream {
  public:
    ConjunctiveStream(const InvertedIndex& index, std::span<const std::string> terms, IoMeter* meter);

    // Advances to the next matching document; false when exhausted.
    bool next();
    uint32_t doc_id() const { return doc_id_; }
    // Per-term frequencies for the current document, aligned with the input terms.
    std::span<const uint32_t> freqs() const { return freqs_; }

  private:
    std::vector<PostingsCursor> cursors_;
    std::vector<uint32_t> freqs_;
    uint32_t doc_id_ = 0;
    bool exhausted_ = false;
    bool started_ = false;
};

// Materialized conjunctive result; `freqs` is doc-major with `n_terms`
// entries per document, aligned with the query's term order.
struct DaatResult {
    std::vector<uint32_t> doc_ids;
    std::vector<uint32_t> freqs;
    uint32_t n_terms = 0;

    std::span<const uint32_t> freqs_of(std::size_t row) const {
        return {freqs.data() + row * n_terms, n_terms};
    }
};

class InvertedIndex {
  public:
    static InvertedIndex open(const IndexPaths& paths);

    const CollectionStats& stats() const { return stats_; }
    bool has_positions() const { return has_positions_; }
    const std::vector<LexiconEntry>& lexicon() const { return lexicon_; }
    uint32_t doc_length(uint32_t doc_id) const { return doc_lengths_.at(doc_id); }
    const std::vector<uint32_t>& doc_lengths() const { return doc_lengths_; }

    // nullptr when the term is absent from the collection.
    const LexiconEntry* find(std::string_view term) const;

    // Reads one postings run, charging `meter` for the bytes and one seek.
    std::vector<uint8_t> read_run(const LexiconEntry& entry, IoMeter* meter) const;

    // Materialized conjunctive traversal (ConjunctiveStream underneath).
    DaatResult daat_stream(std::span<const std::string> terms, IoMeter* meter = nullptr) const;

    // Keeps only candidates containing all terms. Candidates must be strictly
    // ascending. Postings runs are decoded forward without materializing the
    // full lists; a term's run is not even read once no candidate survives.
    std::vector<uint32_t> filter_docids(std::span<const uint32_t> candidates,
                                        std::span<const std::string> terms,
                                        IoMeter* meter = nullptr) const;
    // Same traversal, keeping per-term frequencies for the survivors.
    DaatResult filter_docids_scored(std::span<const uint32_t> candidates,
                                    std::span<const std::string> terms,
                                    IoMeter* meter = nullptr) const;

  private:
    friend class ConjunctiveStream;

    CollectionStats stats_;
    bool has_positions_ = false;
    std::vector<LexiconEntry> lexicon_;
    std::vector<uint32_t> doc_lengths_;
    RandomAccessFile postings_;
};

}  // namespace geosearch
