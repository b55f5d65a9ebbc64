#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "toxcls/csv.hpp"
#include "toxcls/error.hpp"
#include "toxcls/rng.hpp"

namespace toxcls {

enum class Label : int { non_toxic = 0, toxic = 1 };

inline const char* label_name(Label l) { return l == Label::toxic ? "toxic" : "non_toxic"; }

/// One comment together with its six raw toxicity flags. A document counts
/// as toxic when any flag is set. The text is kept byte-exact.
struct LabeledDocument {
    std::string id;
    std::string text;
    std::array<int, 6> raw_labels{}; // toxic, severe_toxic, obscene, threat, insult, identity_hate
    Label binary_label = Label::non_toxic;

    bool operator==(const LabeledDocument&) const = default;
};

struct CorpusSchema {
    std::string id_column = "id";
    std::string text_column = "comment_text";
    std::array<std::string, 6> label_columns = {"toxic",  "severe_toxic", "obscene",
                                                "threat", "insult",       "identity_hate"};
};

/// Parses the labeled comment CSV. Binarization happens here: any raw flag
/// set to 1 makes the document toxic.
inline std::vector<LabeledDocument> parse_corpus(std::string_view csv_text,
                                                 const CorpusSchema& schema = CorpusSchema{}) {
    const CsvTable table = parse_csv(csv_text);

    auto column_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < table.header.size(); ++i)
            if (table.header[i] == name) return i;
        throw SchemaError("corpus CSV is missing column '" + name + "'");
    };

    const std::size_t id_col = column_of(schema.id_column);
    const std::size_t text_col = column_of(schema.text_column);
    std::array<std::size_t, 6> label_cols{};
    for (std::size_t i = 0; i < 6; ++i) label_cols[i] = column_of(schema.label_columns[i]);

    std::vector<LabeledDocument> docs;
    docs.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != table.header.size())
            throw ParseError("row " + std::to_string(r + 1) + ": expected " +
                             std::to_string(table.header.size()) + " fields, got " +
                             std::to_string(row.size()));
        LabeledDocument doc;
        doc.id = row[id_col];
        doc.text = row[text_col];
        bool any = false;
        for (std::size_t i = 0; i < 6; ++i) {
            const std::string& v = row[label_cols[i]];
            if (v == "0") {
                doc.raw_labels[i] = 0;
            } else if (v == "1") {
                doc.raw_labels[i] = 1;
                any = true;
            } else {
                throw ParseError("row " + std::to_string(r + 1) + ": label column '" +
                                 schema.label_columns[i] + "' must be 0 or 1, got '" + v + "'");
            }
        }
        doc.binary_label = any ? Label::toxic : Label::non_toxic;
        docs.push_back(std::move(doc));
    }
    return docs;
}

/// Writes documents back out in the input schema (round-trip safe).
inline void write_corpus_csv(std::ostream& os, const std::vector<LabeledDocument>& docs,
                             const CorpusSchema& schema = CorpusSchema{}) {
    std::vector<std::string> header = {schema.id_column, schema.text_column};
    for (const auto& c : schema.label_columns) header.push_back(c);
    write_csv_row(os, header);
    for (const auto& doc : docs) {
        std::vector<std::string> row = {doc.id, doc.text};
        for (const int flag : doc.raw_labels) row.push_back(flag ? "1" : "0");
        write_csv_row(os, row);
    }
}

/// All toxic documents plus an equal-size seeded sample of the non-toxic
/// ones, in a seeded shuffle order. When toxic documents outnumber non-toxic
/// ones the call fails unless `allow_toxic_downsample` flips the direction.
inline std::vector<LabeledDocument> balanced_subsample(const std::vector<LabeledDocument>& docs,
                                                       std::uint64_t seed,
                                                       bool allow_toxic_downsample = false) {
    std::vector<const LabeledDocument*> toxic;
    std::vector<const LabeledDocument*> non_toxic;
    for (const auto& d : docs)
        (d.binary_label == Label::toxic ? toxic : non_toxic).push_back(&d);

    if (toxic.empty()) throw BalanceError("balanced_subsample: no toxic documents");
    if (toxic.size() > non_toxic.size() && !allow_toxic_downsample)
        throw BalanceError("balanced_subsample: toxic count " + std::to_string(toxic.size()) +
                           " exceeds non-toxic count " + std::to_string(non_toxic.size()) +
                           " (pass allow_toxic_downsample to sample toxic down instead)");

    auto* majority = &non_toxic;
    auto* minority = &toxic;
    if (toxic.size() > non_toxic.size()) {
        if (non_toxic.empty()) throw BalanceError("balanced_subsample: no non-toxic documents");
        majority = &toxic;
        minority = &non_toxic;
    }

    SeededRng rng(seed);
    SeededRng sample_rng = rng.split(fnv1a64("sample"));
    SeededRng order_rng = rng.split(fnv1a64("order"));

    sample_rng.shuffle(*majority);
    std::vector<const LabeledDocument*> picked(minority->begin(), minority->end());
    picked.insert(picked.end(), majority->begin(), majority->begin() + minority->size());
    order_rng.shuffle(picked);

    std::vector<LabeledDocument> out;
    out.reserve(picked.size());
    for (const auto* p : picked) out.push_back(*p);
    return out;
}

/// Seeded shuffle followed by a prefix/suffix cut at floor(fraction * N).
struct CorpusSplit {
    std::vector<LabeledDocument> train;
    std::vector<LabeledDocument> test;
    std::uint64_t seed = 0;
    double train_fraction = 0.0;
};

inline CorpusSplit split(const std::vector<LabeledDocument>& docs, double train_fraction,
                         std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ArgumentError("split: train_fraction must be in (0,1), got " +
                            std::to_string(train_fraction));
    if (docs.size() < 2) throw ArgumentError("split: need at least 2 documents");

    std::vector<std::size_t> order(docs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    SeededRng rng(seed);
    rng.shuffle(order);

    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(docs.size())));

    CorpusSplit out;
    out.seed = seed;
    out.train_fraction = train_fraction;
    out.train.reserve(n_train);
    out.test.reserve(docs.size() - n_train);
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < n_train ? out.train : out.test).push_back(docs[order[i]]);
    return out;
}

} // namespace toxcls
