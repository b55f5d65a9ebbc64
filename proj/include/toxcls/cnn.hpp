#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "toxcls/embeddings.hpp"
#include "toxcls/error.hpp"
#include "toxcls/matrix.hpp"
#include "toxcls/numerics.hpp"
#include "toxcls/rng.hpp"
#include "toxcls/textprep.hpp"

namespace toxcls {

enum class LossKind { squared_error, cross_entropy };

/// One convolution bank: F filters of height `height` spanning the full
/// embedding width. Filter f is row f of `weights`, laid out row-major as
/// weight[i * d + j] for word offset i and embedding coordinate j.
struct ConvFilterBank {
    int height = 0;
    Matrix weights{0, 0};
    std::vector<double> biases;

    std::size_t filters() const { return weights.rows(); }
};

struct NetworkParams {
    EmbeddingTable embedding;
    std::vector<ConvFilterBank> banks;
    Matrix dense_w{0, 0}; // (total filters) x classes
    std::vector<double> dense_b;
    std::size_t l_max = 0;

    std::size_t total_filters() const {
        std::size_t n = 0;
        for (const auto& bank : banks) n += bank.filters();
        return n;
    }
    std::size_t classes() const { return dense_b.size(); }
};

struct TrainingConfig {
    std::size_t batch_size = 64;
    double learning_rate = 0.005;
    int epochs = 10;
    std::uint64_t seed = 0;
    LossKind loss = LossKind::squared_error;
};

/// Everything backward() needs from the forward pass of one document.
struct ForwardCache {
    Matrix embedded{0, 0};
    std::vector<Matrix> pre;              // per bank: (L - h + 1) x F pre-activations
    std::vector<Matrix> act;              // same shape, after ReLU
    std::vector<std::vector<int>> argmax; // per bank: pooled time step per filter
    std::vector<double> features;         // concatenated pooled maxima
    std::vector<double> logits;
    std::vector<double> probs;
};

struct Gradients {
    std::vector<Matrix> bank_weights;
    std::vector<std::vector<double>> bank_biases;
    Matrix dense_w{0, 0};
    std::vector<double> dense_b;
    std::map<std::size_t, std::vector<double>> embedding; // touched rows only

    void reset() {
        for (auto& w : bank_weights) std::fill(w.data().begin(), w.data().end(), 0.0);
        for (auto& b : bank_biases) std::fill(b.begin(), b.end(), 0.0);
        std::fill(dense_w.data().begin(), dense_w.data().end(), 0.0);
        std::fill(dense_b.begin(), dense_b.end(), 0.0);
        embedding.clear();
    }
};

inline Gradients zero_gradients(const NetworkParams& p) {
    Gradients g;
    for (const auto& bank : p.banks) {
        g.bank_weights.emplace_back(bank.weights.rows(), bank.weights.cols(), 0.0);
        g.bank_biases.emplace_back(bank.filters(), 0.0);
    }
    g.dense_w = Matrix(p.dense_w.rows(), p.dense_w.cols(), 0.0);
    g.dense_b.assign(p.dense_b.size(), 0.0);
    return g;
}

/// Row t of the result is the embedding of token t; padding index 0 yields a
/// zero row.
inline Matrix embed(const EncodedDocument& doc, const EmbeddingTable& table) {
    Matrix x(doc.indices.size(), table.dim(), 0.0);
    for (std::size_t t = 0; t < doc.indices.size(); ++t) {
        const int idx = doc.indices[t];
        if (idx < 0 || static_cast<std::size_t>(idx) >= table.rows())
            throw ArgumentError("embed: encoded index " + std::to_string(idx) +
                                " is outside the table (" + std::to_string(table.rows()) +
                                " rows); encoding and table disagree");
        const double* src = table.row(static_cast<std::size_t>(idx));
        std::copy(src, src + table.dim(), x.row(t));
    }
    return x;
}

namespace detail {
inline void conv_maps(const Matrix& x, const ConvFilterBank& bank, Matrix& pre, Matrix& act) {
    const std::size_t h = static_cast<std::size_t>(bank.height);
    const std::size_t d = x.cols();
    if (x.rows() < h)
        throw ConfigError("convolution: document length " + std::to_string(x.rows()) +
                          " is shorter than filter height " + std::to_string(bank.height));
    if (bank.weights.cols() != h * d)
        throw DimensionError("convolution: filter width does not match embedding dimension");
    const std::size_t steps = x.rows() - h + 1;
    pre = Matrix(steps, bank.filters());
    act = Matrix(steps, bank.filters());
    for (std::size_t t = 0; t < steps; ++t)
        for (std::size_t f = 0; f < bank.filters(); ++f) {
            double sum = bank.biases[f];
            const double* w = bank.weights.row(f);
            for (std::size_t i = 0; i < h; ++i) sum += dot(x.row(t + i), w + i * d, d);
            pre(t, f) = sum;
            act(t, f) = sum > 0.0 ? sum : 0.0;
        }
}
} // namespace detail

/// ReLU( x (*) bank ) over the valid extent: (L - h + 1) time steps.
inline Matrix conv_forward(const Matrix& x, const ConvFilterBank& bank) {
    Matrix pre(0, 0), act(0, 0);
    detail::conv_maps(x, bank, pre, act);
    return act;
}

/// Column-wise maxima with first-wins tie handling; the argmax positions
/// route gradients back to the winning time steps.
inline std::pair<std::vector<double>, std::vector<int>> max_over_time(const Matrix& map) {
    if (map.rows() == 0 || map.cols() == 0) throw ArgumentError("max_over_time: empty feature map");
    std::vector<double> out(map.cols());
    std::vector<int> arg(map.cols(), 0);
    for (std::size_t f = 0; f < map.cols(); ++f) {
        double best = map(0, f);
        int best_t = 0;
        for (std::size_t t = 1; t < map.rows(); ++t)
            if (map(t, f) > best) {
                best = map(t, f);
                best_t = static_cast<int>(t);
            }
        out[f] = best;
        arg[f] = best_t;
    }
    return {std::move(out), std::move(arg)};
}

inline std::vector<double> dense_softmax(const std::vector<double>& features, const Matrix& w,
                                         const std::vector<double>& bias) {
    if (features.size() != w.rows() || bias.size() != w.cols())
        throw DimensionError("dense layer: feature length does not match weight shape");
    std::vector<double> logits(bias);
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double fi = features[i];
        if (fi == 0.0) continue;
        const double* wr = w.row(i);
        for (std::size_t k = 0; k < logits.size(); ++k) logits[k] += fi * wr[k];
    }
    return softmax(logits);
}

/// Mean loss over a batch of output rows against one-hot target rows:
/// squared error (1/P) sum_p sum_j (o - y)^2, or cross-entropy
/// -(1/P) sum_p ln o at the target class.
inline double batch_loss(const Matrix& outputs, const Matrix& targets, LossKind kind) {
    if (outputs.rows() != targets.rows() || outputs.cols() != targets.cols())
        throw DimensionError("loss: output and target shapes differ");
    if (outputs.rows() == 0) throw ArgumentError("loss: empty batch");
    const double inv_p = 1.0 / static_cast<double>(outputs.rows());
    double e = 0.0;
    for (std::size_t p = 0; p < outputs.rows(); ++p)
        for (std::size_t j = 0; j < outputs.cols(); ++j) {
            if (kind == LossKind::squared_error) {
                const double d = outputs(p, j) - targets(p, j);
                e += d * d;
            } else if (targets(p, j) != 0.0) {
                if (outputs(p, j) <= 0.0)
                    throw NumericError("cross-entropy needs positive predicted probabilities");
                e -= std::log(outputs(p, j));
            }
        }
    return e * inv_p;
}

inline ForwardCache forward(const NetworkParams& p, const EncodedDocument& doc) {
    if (doc.indices.size() != p.l_max)
        throw DimensionError("forward: document length " + std::to_string(doc.indices.size()) +
                             " does not match the trained padding length " +
                             std::to_string(p.l_max));
    ForwardCache cache;
    cache.embedded = embed(doc, p.embedding);
    cache.pre.resize(p.banks.size(), Matrix(0, 0));
    cache.act.resize(p.banks.size(), Matrix(0, 0));
    cache.argmax.resize(p.banks.size());
    cache.features.reserve(p.total_filters());
    for (std::size_t b = 0; b < p.banks.size(); ++b) {
        detail::conv_maps(cache.embedded, p.banks[b], cache.pre[b], cache.act[b]);
        auto [pooled, arg] = max_over_time(cache.act[b]);
        cache.argmax[b] = std::move(arg);
        cache.features.insert(cache.features.end(), pooled.begin(), pooled.end());
    }
    if (cache.features.size() != p.dense_w.rows() || p.dense_b.size() != p.dense_w.cols())
        throw DimensionError("dense layer: feature length does not match weight shape");
    cache.logits.assign(p.dense_b.begin(), p.dense_b.end());
    for (std::size_t i = 0; i < cache.features.size(); ++i)
        for (std::size_t k = 0; k < cache.logits.size(); ++k)
            cache.logits[k] += cache.features[i] * p.dense_w(i, k);
    cache.probs = softmax(cache.logits);
    return cache;
}

/// Gradient of the configured batch-mean loss w.r.t. the softmax input, for
/// one pattern already carrying the 1/P normalizer.
inline std::vector<double> loss_logit_gradient(const std::vector<double>& probs, int label,
                                               LossKind kind, double inv_p) {
    std::vector<double> dz(probs.size(), 0.0);
    if (kind == LossKind::cross_entropy) {
        for (std::size_t k = 0; k < probs.size(); ++k)
            dz[k] = (probs[k] - (static_cast<int>(k) == label ? 1.0 : 0.0)) * inv_p;
        return dz;
    }
    // E = (1/P) sum_j (o_j - y_j)^2 through o = softmax(z):
    // dE/dz_k = (2/P) o_k ((o_k - y_k) - sum_j (o_j - y_j) o_j)
    double s = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j)
        s += (probs[j] - (static_cast<int>(j) == label ? 1.0 : 0.0)) * probs[j];
    for (std::size_t k = 0; k < probs.size(); ++k) {
        const double diff = probs[k] - (static_cast<int>(k) == label ? 1.0 : 0.0);
        dz[k] = 2.0 * inv_p * probs[k] * (diff - s);
    }
    return dz;
}

/// Accumulates this pattern's share of the batch gradient. Gradients flow
/// only through the pooled argmax positions; ReLU blocks non-positive
/// pre-activations; embedding rows accumulate only for trainable tables and
/// never for the padding row.
inline void backward(const NetworkParams& p, const EncodedDocument& doc, const ForwardCache& cache,
                     int label, LossKind kind, double inv_p, Gradients& g) {
    const std::size_t d = p.embedding.dim();
    if (cache.embedded.rows() != p.l_max || cache.embedded.cols() != d ||
        cache.features.size() != p.total_filters() || cache.probs.size() != p.classes() ||
        cache.act.size() != p.banks.size())
        throw ArgumentError("backward: forward cache does not match the network");
    if (label != 0 && label != 1) throw ArgumentError("backward: labels must be 0 or 1");

    const std::vector<double> dz = loss_logit_gradient(cache.probs, label, kind, inv_p);

    std::vector<double> dfeat(cache.features.size(), 0.0);
    for (std::size_t i = 0; i < cache.features.size(); ++i) {
        const double* wr = p.dense_w.row(i);
        double acc = 0.0;
        for (std::size_t k = 0; k < dz.size(); ++k) {
            g.dense_w(i, k) += cache.features[i] * dz[k];
            acc += wr[k] * dz[k];
        }
        dfeat[i] = acc;
    }
    for (std::size_t k = 0; k < dz.size(); ++k) g.dense_b[k] += dz[k];

    std::size_t offset = 0;
    for (std::size_t b = 0; b < p.banks.size(); ++b) {
        const auto& bank = p.banks[b];
        const std::size_t h = static_cast<std::size_t>(bank.height);
        for (std::size_t f = 0; f < bank.filters(); ++f) {
            const int t_star = cache.argmax[b][f];
            if (cache.pre[b](static_cast<std::size_t>(t_star), f) <= 0.0) continue;
            const double dpre = dfeat[offset + f];
            if (dpre == 0.0) continue;
            g.bank_biases[b][f] += dpre;
            double* gw = g.bank_weights[b].row(f);
            const double* w = bank.weights.row(f);
            for (std::size_t i = 0; i < h; ++i) {
                const std::size_t t = static_cast<std::size_t>(t_star) + i;
                const double* xrow = cache.embedded.row(t);
                for (std::size_t j = 0; j < d; ++j) gw[i * d + j] += dpre * xrow[j];
                if (!p.embedding.trainable) continue;
                const int row = doc.indices[t];
                if (row == 0) continue;
                auto [it, inserted] =
                    g.embedding.try_emplace(static_cast<std::size_t>(row), d, 0.0);
                std::vector<double>& ge = it->second;
                for (std::size_t j = 0; j < d; ++j) ge[j] += dpre * w[i * d + j];
            }
        }
        offset += bank.filters();
    }
}

/// One forward/backward sweep over a batch; returns the mean loss. The
/// returned gradients are exactly the gradient of that mean.
inline double compute_batch_gradients(const NetworkParams& p,
                                      const std::vector<EncodedDocument>& docs,
                                      const std::vector<int>& labels, LossKind kind,
                                      Gradients& g) {
    if (docs.empty()) throw ArgumentError("gradient computation: empty batch");
    if (docs.size() != labels.size())
        throw DimensionError("gradient computation: documents and labels differ");
    const double inv_p = 1.0 / static_cast<double>(docs.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const ForwardCache cache = forward(p, docs[i]);
        if (kind == LossKind::squared_error) {
            for (std::size_t j = 0; j < cache.probs.size(); ++j) {
                const double diff =
                    cache.probs[j] - (static_cast<int>(j) == labels[i] ? 1.0 : 0.0);
                loss += diff * diff;
            }
        } else {
            const double o = cache.probs[static_cast<std::size_t>(labels[i])];
            if (o <= 0.0)
                throw NumericError("cross-entropy needs positive predicted probabilities");
            loss -= std::log(o);
        }
        backward(p, docs[i], cache, labels[i], kind, inv_p, g);
    }
    return loss * inv_p;
}

inline void apply_gradients(NetworkParams& p, const Gradients& g, double learning_rate) {
    for (std::size_t b = 0; b < p.banks.size(); ++b) {
        axpy(-learning_rate, g.bank_weights[b], p.banks[b].weights);
        axpy(-learning_rate, g.bank_biases[b], p.banks[b].biases);
    }
    axpy(-learning_rate, g.dense_w, p.dense_w);
    axpy(-learning_rate, g.dense_b, p.dense_b);
    if (!p.embedding.trainable) return;
    for (const auto& [row, grad] : g.embedding) {
        double* e = p.embedding.row(row);
        for (std::size_t j = 0; j < grad.size(); ++j) e[j] -= learning_rate * grad[j];
    }
}

/// Filter and dense weights drawn uniform on [-0.05, 0.05] from the given
/// stream; biases start at zero.
inline NetworkParams init_network(EmbeddingTable table, std::size_t l_max,
                                  const std::vector<int>& heights, std::size_t filters,
                                  SeededRng& rng, std::size_t classes = 2) {
    if (heights.empty()) throw ConfigError("network: at least one filter height required");
    if (filters < 1) throw ConfigError("network: filter count must be positive");
    int max_h = 0;
    for (int h : heights) {
        if (h < 1) throw ConfigError("network: filter heights must be positive");
        max_h = std::max(max_h, h);
    }
    if (l_max < static_cast<std::size_t>(max_h))
        throw ConfigError("network: padding length " + std::to_string(l_max) +
                          " is shorter than the largest filter height " + std::to_string(max_h));

    NetworkParams p;
    p.embedding = std::move(table);
    p.l_max = l_max;
    const std::size_t d = p.embedding.dim();
    for (int h : heights) {
        ConvFilterBank bank;
        bank.height = h;
        bank.weights = Matrix(filters, static_cast<std::size_t>(h) * d);
        for (double& w : bank.weights.data()) w = rng.uniform(-0.05, 0.05);
        bank.biases.assign(filters, 0.0);
        p.banks.push_back(std::move(bank));
    }
    p.dense_w = Matrix(p.total_filters(), classes);
    for (double& w : p.dense_w.data()) w = rng.uniform(-0.05, 0.05);
    p.dense_b.assign(classes, 0.0);
    return p;
}

struct TrainResult {
    NetworkParams params;
    std::vector<double> epoch_losses;
};

/// Mini-batch SGD: each epoch reshuffles the training order from the seeded
/// stream and applies one plain gradient step per batch. The recorded
/// per-epoch value is the mean per-example loss across the epoch's batches.
inline TrainResult train(const std::vector<EncodedDocument>& docs, const std::vector<int>& labels,
                         const TrainingConfig& config, EmbeddingTable table,
                         const std::vector<int>& heights = {3, 4, 5}, std::size_t filters = 128) {
    if (docs.empty()) throw ArgumentError("train: no training documents");
    if (docs.size() != labels.size()) throw DimensionError("train: documents and labels differ");
    if (config.batch_size < 1) throw ConfigError("train: batch size must be at least 1");
    if (!(config.learning_rate > 0.0)) throw ConfigError("train: learning rate must be positive");
    if (config.epochs < 1) throw ConfigError("train: epoch count must be at least 1");
    const std::size_t l_max = docs[0].indices.size();
    for (const auto& doc : docs)
        if (doc.indices.size() != l_max)
            throw DimensionError("train: documents are not padded to a common length");

    SeededRng root(config.seed);
    SeededRng init_rng = root.split(fnv1a64("init"));
    SeededRng shuffle_rng = root.split(fnv1a64("shuffle"));

    TrainResult result{init_network(std::move(table), l_max, heights, filters, init_rng), {}};
    NetworkParams& p = result.params;

    std::vector<std::size_t> order(docs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Gradients g = zero_gradients(p);
    std::vector<EncodedDocument> batch_docs;
    std::vector<int> batch_labels;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t start = 0, batch_no = 0; start < order.size();
             start += config.batch_size, ++batch_no) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            batch_docs.clear();
            batch_labels.clear();
            for (std::size_t i = start; i < end; ++i) {
                batch_docs.push_back(docs[order[i]]);
                batch_labels.push_back(labels[order[i]]);
            }
            g.reset();
            const double loss = compute_batch_gradients(p, batch_docs, batch_labels, config.loss, g);
            if (!std::isfinite(loss))
                throw NumericError("training diverged at epoch " + std::to_string(epoch + 1) +
                                   ", batch " + std::to_string(batch_no + 1));
            apply_gradients(p, g, config.learning_rate);
            loss_sum += loss * static_cast<double>(end - start);
        }
        result.epoch_losses.push_back(loss_sum / static_cast<double>(docs.size()));
    }
    return result;
}

/// Label plus class probabilities; ties resolve to the lower class index.
inline std::pair<int, std::vector<double>> predict(const NetworkParams& p,
                                                   const EncodedDocument& doc) {
    const ForwardCache cache = forward(p, doc);
    int best = 0;
    for (std::size_t k = 1; k < cache.probs.size(); ++k)
        if (cache.probs[k] > cache.probs[static_cast<std::size_t>(best)])
            best = static_cast<int>(k);
    return {best, cache.probs};
}

} // namespace toxcls
