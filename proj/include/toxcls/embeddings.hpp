#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "toxcls/error.hpp"
#include "toxcls/matrix.hpp"
#include "toxcls/rng.hpp"
#include "toxcls/textprep.hpp"

namespace toxcls {

/// Word-vector table of shape (V+1) x d. Row 0 is the padding row: all zero
/// and never touched by training. `oov_rows` lists the rows that had to be
/// randomly initialized when loading pretrained vectors; for fixed tables
/// those rows are frozen along with everything else.
struct EmbeddingTable {
    Matrix vectors{0, 0};
    bool trainable = true;
    std::set<std::size_t> oov_rows;

    std::size_t dim() const { return vectors.cols(); }
    std::size_t rows() const { return vectors.rows(); }
    const double* row(std::size_t i) const { return vectors.row(i); }
    double* row(std::size_t i) { return vectors.row(i); }
};

/// Trainable table for the randomized variant: rows 1..V i.i.d. uniform on
/// [-0.25, 0.25], row 0 zero.
inline EmbeddingTable random_table(const Vocabulary& vocab, std::size_t d, SeededRng& rng) {
    if (d < 1) throw ArgumentError("embedding dimension must be at least 1");
    const std::size_t v = static_cast<std::size_t>(vocab.size());
    EmbeddingTable table;
    table.vectors = Matrix(v + 1, d, 0.0);
    table.trainable = true;
    for (std::size_t r = 1; r <= v; ++r) {
        double* row = table.vectors.row(r);
        for (std::size_t j = 0; j < d; ++j) row[j] = rng.uniform(-0.25, 0.25);
    }
    return table;
}

/// Parsed word-vector text file: `word v1 v2 ... vd` per line, optional
/// `count dim` header. Duplicate words keep the first occurrence.
struct PretrainedVectors {
    std::vector<std::string> words;
    Matrix vectors{0, 0};
    std::vector<std::string> warnings;
    std::size_t dim = 0;

    int index_of(const std::string& word) const {
        const auto it = index_.find(word);
        return it == index_.end() ? -1 : it->second;
    }

    std::unordered_map<std::string, int> index_;
};

inline PretrainedVectors parse_vector_file(std::istream& is) {
    PretrainedVectors pv;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        std::vector<double> values;
        double v;
        while (ls >> v) values.push_back(v);

        if (first) {
            first = false;
            // header form: "<count> <dim>", both plain nonnegative integers
            if (values.size() == 1 && values[0] >= 1.0 &&
                values[0] == std::floor(values[0]) && !word.empty() &&
                word.find_first_not_of("0123456789") == std::string::npos)
                continue;
        }
        if (values.empty())
            throw FormatError("word vectors: line " + std::to_string(line_no) +
                              " has no numeric values");
        if (pv.dim == 0) {
            pv.dim = values.size();
        } else if (values.size() != pv.dim) {
            throw FormatError("word vectors: line " + std::to_string(line_no) + " has " +
                              std::to_string(values.size()) + " values, expected " +
                              std::to_string(pv.dim));
        }
        if (pv.index_.contains(word)) {
            pv.warnings.push_back("duplicate vector for '" + word + "' at line " +
                                  std::to_string(line_no) + "; keeping the first");
            continue;
        }
        pv.index_.emplace(word, static_cast<int>(pv.words.size()));
        pv.words.push_back(word);
        rows.push_back(std::move(values));
    }
    if (pv.words.empty()) throw FormatError("word vectors: no vector lines found");
    pv.vectors = Matrix(rows.size(), pv.dim, 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t j = 0; j < pv.dim; ++j) pv.vectors(r, j) = rows[r][j];
    return pv;
}

/// Fixed table for the pretrained variant. Vocabulary words found in the
/// file keep their file vectors; missing words get rows drawn from the same
/// uniform [-0.25, 0.25] distribution as random_table and are recorded in
/// oov_rows. Rows are filled in vocabulary index order so the result is
/// seed-deterministic.
inline EmbeddingTable table_from_pretrained(const PretrainedVectors& pv, const Vocabulary& vocab,
                                            SeededRng& rng, std::size_t expected_dim = 0) {
    if (expected_dim != 0 && pv.dim != expected_dim)
        throw DimensionError("word vectors have dimension " + std::to_string(pv.dim) +
                             ", expected " + std::to_string(expected_dim));
    const std::size_t v = static_cast<std::size_t>(vocab.size());
    EmbeddingTable table;
    table.vectors = Matrix(v + 1, pv.dim, 0.0);
    table.trainable = false;
    for (std::size_t r = 1; r <= v; ++r) {
        double* row = table.vectors.row(r);
        const int src = pv.index_of(vocab.word(static_cast<int>(r)));
        if (src >= 0) {
            const double* v = pv.vectors.row(static_cast<std::size_t>(src));
            std::copy(v, v + pv.dim, row);
        } else {
            for (std::size_t j = 0; j < pv.dim; ++j) row[j] = rng.uniform(-0.25, 0.25);
            table.oov_rows.insert(r);
        }
    }
    return table;
}

inline EmbeddingTable load_pretrained(std::istream& is, const Vocabulary& vocab, SeededRng& rng,
                                      std::size_t expected_dim = 0,
                                      std::vector<std::string>* warnings = nullptr) {
    const PretrainedVectors pv = parse_vector_file(is);
    if (warnings) *warnings = pv.warnings;
    return table_from_pretrained(pv, vocab, rng, expected_dim);
}

} // namespace toxcls
