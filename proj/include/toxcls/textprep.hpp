#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "toxcls/error.hpp"
#include "toxcls/rng.hpp"

namespace toxcls {

namespace unicode {

// Compact classification tables instead of a full Unicode database: the
// major alphabetic blocks are covered and everything else acts as a
// separator. Input is assumed to be composed (NFC) text; the Kaggle export
// is. Classification never consults the C locale, so tokenization is
// identical on every platform.

inline bool is_alphabetic(std::uint32_t cp) {
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
    if (cp >= 0xC0 && cp <= 0xFF) return cp != 0xD7 && cp != 0xF7; // Latin-1 letters
    if (cp >= 0x100 && cp <= 0x24F) return true;                   // Latin Extended-A/B
    if (cp >= 0x370 && cp <= 0x3FF)                                // Greek
        return cp != 0x374 && cp != 0x375 && cp != 0x37E && cp != 0x384 && cp != 0x385 &&
               cp != 0x387;
    if (cp >= 0x400 && cp <= 0x4FF) return true;   // Cyrillic
    if (cp >= 0x531 && cp <= 0x586) return true;   // Armenian
    if (cp >= 0x5D0 && cp <= 0x5EA) return true;   // Hebrew
    if (cp >= 0x620 && cp <= 0x64A) return true;   // Arabic
    if (cp >= 0x900 && cp <= 0x97F) return true;   // Devanagari
    if (cp >= 0x3040 && cp <= 0x30FF) return true; // Hiragana, Katakana
    if (cp >= 0x4E00 && cp <= 0x9FFF) return true; // CJK unified
    if (cp >= 0xAC00 && cp <= 0xD7A3) return true; // Hangul syllables
    return false;
}

inline std::uint32_t to_lower(std::uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32; // Latin-1
    if (cp >= 0x100 && cp <= 0x137) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x14A && cp <= 0x177) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp == 0x178) return 0xFF;
    if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 32; // Greek capitals
    if (cp >= 0x410 && cp <= 0x42F) return cp + 32;                // Cyrillic capitals
    if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
    return cp;
}

/// Decodes the UTF-8 sequence at `i`; advances `i`. Invalid bytes decode to
/// U+FFFD (which is not alphabetic, so they separate tokens).
inline std::uint32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<std::uint8_t>(s[k]); };
    const std::uint8_t b0 = byte(i);
    if (b0 < 0x80) {
        i += 1;
        return b0;
    }
    auto is_cont = [&](std::size_t k) { return k < s.size() && (byte(k) & 0xC0) == 0x80; };
    if ((b0 & 0xE0) == 0xC0 && is_cont(i + 1)) {
        const std::uint32_t cp = ((b0 & 0x1Fu) << 6) | (byte(i + 1) & 0x3Fu);
        i += 2;
        return cp >= 0x80 ? cp : 0xFFFD;
    }
    if ((b0 & 0xF0) == 0xE0 && is_cont(i + 1) && is_cont(i + 2)) {
        const std::uint32_t cp =
            ((b0 & 0x0Fu) << 12) | ((byte(i + 1) & 0x3Fu) << 6) | (byte(i + 2) & 0x3Fu);
        i += 3;
        return cp >= 0x800 ? cp : 0xFFFD;
    }
    if ((b0 & 0xF8) == 0xF0 && is_cont(i + 1) && is_cont(i + 2) && is_cont(i + 3)) {
        const std::uint32_t cp = ((b0 & 0x07u) << 18) | ((byte(i + 1) & 0x3Fu) << 12) |
                                 ((byte(i + 2) & 0x3Fu) << 6) | (byte(i + 3) & 0x3Fu);
        i += 4;
        return cp >= 0x10000 && cp <= 0x10FFFF ? cp : 0xFFFD;
    }
    i += 1;
    return 0xFFFD;
}

inline void encode_utf8(std::uint32_t cp, std::string& out) {
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

} // namespace unicode

/// Lowercased maximal runs of alphabetic characters. Punctuation, digits and
/// anything unclassified separate tokens. Shared by the CNN and the BoW
/// pipeline.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        const std::uint32_t cp = unicode::decode_utf8(text, i);
        if (unicode::is_alphabetic(cp)) {
            unicode::encode_utf8(unicode::to_lower(cp), current);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

/// Word -> integer index map. Index 0 is reserved for padding and maps to no
/// word; indices 1..V are assigned in first-occurrence order over the
/// training documents. Immutable once built.
class Vocabulary {
public:
    Vocabulary() { index_to_word_.push_back(""); }

    static Vocabulary build(const std::vector<std::vector<std::string>>& token_lists) {
        Vocabulary vocab;
        for (const auto& tokens : token_lists)
            for (const auto& tok : tokens) {
                if (vocab.word_to_index_.contains(tok)) continue;
                const int idx = static_cast<int>(vocab.index_to_word_.size());
                vocab.word_to_index_.emplace(tok, idx);
                vocab.index_to_word_.push_back(tok);
            }
        if (vocab.size() == 0)
            throw ArgumentError("build_vocabulary: all documents are empty");
        return vocab;
    }

    /// Index of a token, 0 when absent.
    int index_of(const std::string& token) const {
        const auto it = word_to_index_.find(token);
        return it == word_to_index_.end() ? 0 : it->second;
    }

    const std::string& word(int index) const {
        if (index <= 0 || index >= static_cast<int>(index_to_word_.size()))
            throw ArgumentError("vocabulary index " + std::to_string(index) + " out of range");
        return index_to_word_[static_cast<std::size_t>(index)];
    }

    int size() const { return static_cast<int>(index_to_word_.size()) - 1; }

    /// FNV-1a over "index\tword\n" lines; stored in model manifests so a
    /// model cannot silently be used with a different vocabulary.
    std::uint64_t hash() const {
        std::uint64_t h = 0xCBF29CE484222325ull;
        auto feed = [&](std::string_view s) {
            for (const char c : s) {
                h ^= static_cast<unsigned char>(c);
                h *= 0x100000001B3ull;
            }
        };
        for (int i = 1; i <= size(); ++i) {
            feed(std::to_string(i));
            feed("\t");
            feed(index_to_word_[static_cast<std::size_t>(i)]);
            feed("\n");
        }
        return h;
    }

    void save(std::ostream& os) const {
        for (int i = 1; i <= size(); ++i)
            os << i << '\t' << index_to_word_[static_cast<std::size_t>(i)] << '\n';
    }

    static Vocabulary load(std::istream& is) {
        Vocabulary vocab;
        std::string line;
        int expected = 1;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw FormatError("vocabulary line " + std::to_string(expected) + ": missing tab");
            const int idx = std::stoi(line.substr(0, tab));
            if (idx != expected)
                throw FormatError("vocabulary: expected index " + std::to_string(expected) +
                                  ", got " + std::to_string(idx));
            const std::string word = line.substr(tab + 1);
            vocab.word_to_index_.emplace(word, idx);
            vocab.index_to_word_.push_back(word);
            ++expected;
        }
        return vocab;
    }

    static Vocabulary from_words(const std::vector<std::string>& words) {
        Vocabulary vocab;
        for (const auto& w : words) {
            const int idx = static_cast<int>(vocab.index_to_word_.size());
            if (!vocab.word_to_index_.emplace(w, idx).second)
                throw ArgumentError("vocabulary: duplicate word '" + w + "'");
            vocab.index_to_word_.push_back(w);
        }
        return vocab;
    }

    const std::vector<std::string>& words_by_index() const { return index_to_word_; }

private:
    std::unordered_map<std::string, int> word_to_index_;
    std::vector<std::string> index_to_word_; // slot 0 is the padding placeholder
};

/// Fixed-length index sequence for the CNN. Entries past true_length are 0;
/// out-of-vocabulary tokens also map to 0, whose embedding row stays zero.
struct EncodedDocument {
    std::vector<int> indices;
    int true_length = 0;
};

inline EncodedDocument encode_and_pad(const std::vector<std::string>& tokens,
                                      const Vocabulary& vocab, int l_max) {
    if (l_max < 1) throw ArgumentError("encode_and_pad: L_max must be >= 1");
    EncodedDocument doc;
    doc.indices.assign(static_cast<std::size_t>(l_max), 0);
    const std::size_t n = std::min(tokens.size(), static_cast<std::size_t>(l_max));
    for (std::size_t i = 0; i < n; ++i) doc.indices[i] = vocab.index_of(tokens[i]);
    doc.true_length = static_cast<int>(n);
    return doc;
}

} // namespace toxcls
