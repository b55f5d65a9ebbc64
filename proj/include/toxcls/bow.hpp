#pragma once

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "toxcls/error.hpp"
#include "toxcls/matrix.hpp"
#include "toxcls/stopwords.hpp"

namespace toxcls {

/// Sparse documents-by-terms matrix. Rows hold (term index, weight) pairs
/// sorted by term index, with no explicit zeros. `doc_freq` is the number of
/// documents containing each term, fixed at construction from the raw counts
/// and carried through reweighting so pruning always sees true document
/// frequencies.
struct DocumentTermMatrix {
    std::vector<std::string> terms; // column order = first occurrence over the corpus
    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<int> doc_freq;
    int n_docs = 0;
};

/// Raw term counts per document; stop words never enter the term list.
inline DocumentTermMatrix build_dtm(const std::vector<std::vector<std::string>>& token_lists,
                                    const StopwordList& stopwords) {
    DocumentTermMatrix dtm;
    dtm.n_docs = static_cast<int>(token_lists.size());
    std::unordered_map<std::string, int> term_index;

    for (const auto& tokens : token_lists) {
        std::unordered_map<int, int> counts;
        for (const auto& tok : tokens) {
            if (stopwords.contains(tok)) continue;
            auto it = term_index.find(tok);
            if (it == term_index.end()) {
                const int idx = static_cast<int>(dtm.terms.size());
                it = term_index.emplace(tok, idx).first;
                dtm.terms.push_back(tok);
                dtm.doc_freq.push_back(0);
            }
            ++counts[it->second];
        }
        std::vector<std::pair<int, double>> row;
        row.reserve(counts.size());
        for (const auto& [idx, count] : counts) row.emplace_back(idx, static_cast<double>(count));
        std::sort(row.begin(), row.end());
        for (const auto& [idx, count] : row) ++dtm.doc_freq[static_cast<std::size_t>(idx)];
        dtm.rows.push_back(std::move(row));
    }
    return dtm;
}

/// idf(t) = ln(n_docs / df(t)). Retained terms always have df >= 1.
inline std::vector<double> idf_vector(const DocumentTermMatrix& dtm) {
    std::vector<double> idf(dtm.terms.size());
    for (std::size_t t = 0; t < dtm.terms.size(); ++t) {
        if (dtm.doc_freq[t] < 1)
            throw NumericError("idf: term '" + dtm.terms[t] + "' has zero document frequency");
        idf[t] = std::log(static_cast<double>(dtm.n_docs) / static_cast<double>(dtm.doc_freq[t]));
    }
    return idf;
}

/// weight(d,t) = tf(d,t) * ln(n_docs / df(t)). Terms present in every
/// document get idf 0; their entries become zero and are dropped from the
/// sparse rows (document frequencies are kept in `doc_freq`).
inline DocumentTermMatrix apply_tfidf(const DocumentTermMatrix& dtm) {
    if (dtm.n_docs < 1) throw ArgumentError("apply_tfidf: empty matrix");
    const std::vector<double> idf = idf_vector(dtm);
    DocumentTermMatrix out;
    out.terms = dtm.terms;
    out.doc_freq = dtm.doc_freq;
    out.n_docs = dtm.n_docs;
    out.rows.reserve(dtm.rows.size());
    for (const auto& row : dtm.rows) {
        std::vector<std::pair<int, double>> weighted;
        weighted.reserve(row.size());
        for (const auto& [idx, tf] : row) {
            const double w = tf * idf[static_cast<std::size_t>(idx)];
            if (w != 0.0) weighted.emplace_back(idx, w);
        }
        out.rows.push_back(std::move(weighted));
    }
    return out;
}

/// Drops term t iff its sparsity 1 - df(t)/n_docs is strictly greater than
/// `max_sparsity`. Surviving columns keep their order and weights.
inline DocumentTermMatrix prune_sparse_terms(const DocumentTermMatrix& dtm, double max_sparsity) {
    if (!(max_sparsity > 0.0 && max_sparsity < 1.0))
        throw ArgumentError("prune_sparse_terms: max_sparsity must be in (0,1)");

    std::vector<int> remap(dtm.terms.size(), -1);
    DocumentTermMatrix out;
    out.n_docs = dtm.n_docs;
    for (std::size_t t = 0; t < dtm.terms.size(); ++t) {
        const double sparsity =
            1.0 - static_cast<double>(dtm.doc_freq[t]) / static_cast<double>(dtm.n_docs);
        if (sparsity > max_sparsity) continue;
        remap[t] = static_cast<int>(out.terms.size());
        out.terms.push_back(dtm.terms[t]);
        out.doc_freq.push_back(dtm.doc_freq[t]);
    }
    if (!dtm.terms.empty() && out.terms.empty())
        throw ArgumentError("prune_sparse_terms: threshold " + std::to_string(max_sparsity) +
                            " removed every term");

    out.rows.reserve(dtm.rows.size());
    for (const auto& row : dtm.rows) {
        std::vector<std::pair<int, double>> kept;
        for (const auto& [idx, w] : row) {
            const int nidx = remap[static_cast<std::size_t>(idx)];
            if (nidx >= 0) kept.emplace_back(nidx, w);
        }
        out.rows.push_back(std::move(kept));
    }
    return out;
}

/// Projects new documents onto an existing term space with fixed idf
/// weights: weight = count(term) * idf(term). Unknown tokens are ignored, so
/// test-set vocabulary can never widen the feature space.
inline std::vector<std::vector<std::pair<int, double>>> vectorize_with(
    const std::vector<std::vector<std::string>>& token_lists,
    const std::vector<std::string>& terms, const std::vector<double>& idf) {
    if (terms.size() != idf.size())
        throw DimensionError("vectorize_with: terms and idf lengths differ");
    std::unordered_map<std::string, int> term_index;
    for (std::size_t t = 0; t < terms.size(); ++t)
        term_index.emplace(terms[t], static_cast<int>(t));

    std::vector<std::vector<std::pair<int, double>>> rows;
    rows.reserve(token_lists.size());
    for (const auto& tokens : token_lists) {
        std::unordered_map<int, int> counts;
        for (const auto& tok : tokens) {
            const auto it = term_index.find(tok);
            if (it != term_index.end()) ++counts[it->second];
        }
        std::vector<std::pair<int, double>> row;
        row.reserve(counts.size());
        for (const auto& [idx, count] : counts) {
            const double w = static_cast<double>(count) * idf[static_cast<std::size_t>(idx)];
            if (w != 0.0) row.emplace_back(idx, w);
        }
        std::sort(row.begin(), row.end());
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Dense materialization (used for classifier input after pruning).
inline Matrix to_dense(const std::vector<std::vector<std::pair<int, double>>>& rows,
                       std::size_t n_terms) {
    Matrix x(rows.size(), n_terms, 0.0);
    for (std::size_t d = 0; d < rows.size(); ++d)
        for (const auto& [idx, w] : rows[d]) x(d, static_cast<std::size_t>(idx)) = w;
    return x;
}

inline Matrix to_dense(const DocumentTermMatrix& dtm) { return to_dense(dtm.rows, dtm.terms.size()); }

/// MatrixMarket coordinate text export (1-based indices).
inline void write_matrix_market(std::ostream& os, const DocumentTermMatrix& dtm) {
    std::size_t nnz = 0;
    for (const auto& row : dtm.rows) nnz += row.size();
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << "% document-term matrix: rows are documents, columns are terms\n";
    os << dtm.n_docs << ' ' << dtm.terms.size() << ' ' << nnz << '\n';
    char buf[64];
    for (std::size_t d = 0; d < dtm.rows.size(); ++d)
        for (const auto& [idx, w] : dtm.rows[d]) {
            std::snprintf(buf, sizeof buf, "%zu %d %.17g\n", d + 1, idx + 1, w);
            os << buf;
        }
}

/// Reads a MatrixMarket coordinate file into a dense matrix.
inline Matrix read_matrix_market(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0)
        throw FormatError("MatrixMarket: missing %%MatrixMarket banner");
    if (line.find("coordinate") == std::string::npos)
        throw FormatError("MatrixMarket: only coordinate format is supported");
    do {
        if (!std::getline(is, line)) throw FormatError("MatrixMarket: missing size line");
    } while (!line.empty() && line[0] == '%');
    std::istringstream size_line(line);
    std::size_t rows = 0, cols = 0, nnz = 0;
    if (!(size_line >> rows >> cols >> nnz)) throw FormatError("MatrixMarket: bad size line");
    Matrix m(rows, cols, 0.0);
    for (std::size_t k = 0; k < nnz; ++k) {
        std::size_t i = 0, j = 0;
        double v = 0.0;
        if (!(is >> i >> j >> v)) throw FormatError("MatrixMarket: truncated entry list");
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw FormatError("MatrixMarket: entry index out of range");
        m(i - 1, j - 1) = v;
    }
    return m;
}

} // namespace toxcls
