#include "geosearch/corpus.hpp"

#include <fstream>
#include <stdexcept>
#include <unordered_set>

namespace geosearch {

namespace {

constexpr uint32_t kReplacementChar = 0xFFFD;

// Decodes the code point starting at s[i] and advances i past it. Returns
// U+FFFD and advances one byte on malformed input; ingest() validates the
// whole record first, so tokenize itself can stay lenient.
uint32_t decode_utf8(std::string_view s, std::size_t& i) {
    uint8_t b0 = static_cast<uint8_t>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    uint32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return kReplacementChar;
    }
    if (i + len > s.size()) {
        ++i;
        return kReplacementChar;
    }
    for (int k = 1; k < len; ++k) {
        uint8_t b = static_cast<uint8_t>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return kReplacementChar;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    // Overlong encodings and surrogates are invalid.
    static constexpr uint32_t kMinByLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinByLen[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++i;
        return kReplacementChar;
    }
    i += len;
    return cp;
}

void append_utf8(std::string& out, uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Token constituents: ASCII alphanumerics plus any non-ASCII code point that
// is not a known whitespace or punctuation character. Unlisted scripts are
// treated as word material, which errs on the side of keeping text.
bool is_token_codepoint(uint32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    if (cp == 0x85 || (cp >= 0xA0 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7) {
        return false;  // Latin-1 punctuation, NBSP, multiplication/division signs
    }
    if (cp >= 0x2000 && cp <= 0x206F) {
        return false;  // general punctuation block
    }
    if (cp >= 0x3000 && cp <= 0x303F) {
        return false;  // CJK symbols and punctuation
    }
    if (cp == kReplacementChar) {
        return false;
    }
    return true;
}

// Simple one-to-one lowercase covering ASCII, Latin-1, Latin Extended-A,
// Greek and Cyrillic. Other scripts pass through unchanged.
uint32_t simple_lowercase(uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') {
        return cp + 0x20;
    }
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
        return cp + 0x20;
    }
    if (cp == 0x130) {
        return 'i';  // dotted capital I
    }
    if (cp == 0x178) {
        return 0xFF;
    }
    if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) {
        return (cp % 2 == 0) ? cp + 1 : cp;
    }
    if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
        return (cp % 2 == 1) ? cp + 1 : cp;
    }
    if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) {
        return cp + 0x20;
    }
    if (cp >= 0x410 && cp <= 0x42F) {
        return cp + 0x20;
    }
    if (cp >= 0x400 && cp <= 0x40F) {
        return cp + 0x50;
    }
    return cp;
}

}  // namespace

bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t before = i;
        uint32_t cp = decode_utf8(s, i);
        if (cp == kReplacementChar && (i - before) != 3) {
            return false;  // a real U+FFFD decodes from three bytes
        }
    }
    return true;
}

void for_each_token(std::string_view text, const std::function<void(std::string_view)>& fn) {
    std::string token;
    std::size_t i = 0;
    while (i < text.size()) {
        uint32_t cp = decode_utf8(text, i);
        if (is_token_codepoint(cp)) {
            append_utf8(token, simple_lowercase(cp));
        } else if (!token.empty()) {
            fn(token);
            token.clear();
        }
    }
    if (!token.empty()) {
        fn(token);
    }
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    for_each_token(text, [&](std::string_view t) { tokens.emplace_back(t); });
    return tokens;
}

Collection ingest(const std::filesystem::path& corpus_file) {
    std::ifstream in(corpus_file, std::ios::binary);
    if (!in) {
        throw std::runtime_error(corpus_file.string() + ": cannot open corpus file");
    }
    Collection coll;
    std::unordered_set<std::string> vocab;
    std::string line;
    uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!valid_utf8(line)) {
            throw std::runtime_error(corpus_file.string() + " line " + std::to_string(line_no) +
                                     ": invalid UTF-8");
        }
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error(corpus_file.string() + " line " + std::to_string(line_no) +
                                     ": expected site_key<TAB>text");
        }
        DocumentRecord rec;
        rec.doc_id = static_cast<uint32_t>(coll.docs.size());
        rec.site_key = line.substr(0, tab);
        rec.text = line.substr(tab + 1);
        uint32_t count = 0;
        for_each_token(rec.text, [&](std::string_view t) {
            ++count;
            vocab.emplace(t);
        });
        rec.length = count;
        coll.stats.total_tokens += count;
        coll.docs.push_back(std::move(rec));
    }
    coll.stats.n = static_cast<uint32_t>(coll.docs.size());
    coll.stats.vocab_size = static_cast<uint32_t>(vocab.size());
    return coll;
}

}  // namespace geosearch
