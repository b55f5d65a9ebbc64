#pragma once

#include <array>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "toxcls/error.hpp"
#include "toxcls/textprep.hpp"

namespace toxcls {

/// The standard 174-word English stop word list (the one shipped by the
/// usual text mining packages). Also available as data/stopwords_english.txt.
inline constexpr std::array<std::string_view, 174> kEnglishStopwords = {
    "i",         "me",        "my",      "myself",  "we",         "our",     "ours",
    "ourselves", "you",       "your",    "yours",   "yourself",   "yourselves", "he",
    "him",       "his",       "himself", "she",     "her",        "hers",    "herself",
    "it",        "its",       "itself",  "they",    "them",       "their",   "theirs",
    "themselves", "what",     "which",   "who",     "whom",       "this",    "that",
    "these",     "those",     "am",      "is",      "are",        "was",     "were",
    "be",        "been",      "being",   "have",    "has",        "had",     "having",
    "do",        "does",      "did",     "doing",   "would",      "should",  "could",
    "ought",     "i'm",       "you're",  "he's",    "she's",      "it's",    "we're",
    "they're",   "i've",      "you've",  "we've",   "they've",    "i'd",     "you'd",
    "he'd",      "she'd",     "we'd",    "they'd",  "i'll",       "you'll",  "he'll",
    "she'll",    "we'll",     "they'll", "isn't",   "aren't",     "wasn't",  "weren't",
    "hasn't",    "haven't",   "hadn't",  "doesn't", "don't",      "didn't",  "won't",
    "wouldn't",  "shan't",    "shouldn't", "can't", "cannot",     "couldn't", "mustn't",
    "let's",     "that's",    "who's",   "what's",  "here's",     "there's", "when's",
    "where's",   "why's",     "how's",   "a",       "an",         "the",     "and",
    "but",       "if",        "or",      "because", "as",         "until",   "while",
    "of",        "at",        "by",      "for",     "with",       "about",   "against",
    "between",   "into",      "through", "during",  "before",     "after",   "above",
    "below",     "to",        "from",    "up",      "down",       "in",      "out",
    "on",        "off",       "over",    "under",   "again",      "further", "then",
    "once",      "here",      "there",   "when",    "where",      "why",     "how",
    "all",       "any",       "both",    "each",    "few",        "more",    "most",
    "other",     "some",      "such",    "no",      "nor",        "not",     "only",
    "own",       "same",      "so",      "than",    "too",        "very"};

/// Set of tokens excluded from the Document-Term-Matrix. Entries are run
/// through the tokenizer on insertion, so the stored set is closed under the
/// tokenizer's normalization (contractions like "don't" contribute the
/// tokens they split into).
class StopwordList {
public:
    static StopwordList none() { return StopwordList{}; }

    static StopwordList english() {
        std::vector<std::string> words(kEnglishStopwords.begin(), kEnglishStopwords.end());
        return from_words(words);
    }

    static StopwordList from_words(const std::vector<std::string>& entries) {
        StopwordList list;
        for (const auto& entry : entries)
            for (auto& tok : tokenize(entry)) list.words_.insert(std::move(tok));
        return list;
    }

    /// One token per line, UTF-8. Blank lines are skipped.
    static StopwordList load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open stopword file '" + path + "'");
        std::vector<std::string> entries;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) entries.push_back(line);
        }
        return from_words(entries);
    }

    bool contains(const std::string& token) const { return words_.contains(token); }
    std::size_t size() const { return words_.size(); }
    const std::unordered_set<std::string>& words() const { return words_; }

private:
    std::unordered_set<std::string> words_;
};

} // namespace toxcls
