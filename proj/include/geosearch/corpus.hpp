#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace geosearch {

struct DocumentRecord {
    uint32_t doc_id = 0;   // dense ordinal, assigned in file order
    std::string text;      // UTF-8
    std::string site_key;  // hostname-like grouping key, may be empty
    uint32_t length = 0;   // token count
};

struct CollectionStats {
    uint32_t n = 0;
    uint32_t vocab_size = 0;
    uint64_t total_tokens = 0;
};

struct Collection {
    std::vector<DocumentRecord> docs;
    CollectionStats stats;
};

bool valid_utf8(std::string_view s);

// Terms are maximal runs of alphanumeric code points, lowercased with the
// simple (one-to-one) Unicode mapping. Everything else separates tokens.
std::vector<std::string> tokenize(std::string_view text);

// Streaming variant; avoids materializing the token vector.
void for_each_token(std::string_view text, const std::function<void(std::string_view)>& fn);

// Loads a `site_key<TAB>text` corpus file. Doc IDs are assigned in file
// order starting at zero. Malformed lines and invalid UTF-8 are reported
// with their line number.
Collection ingest(const std::filesystem::path& corpus_file);

}  // namespace geosearch
