#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toxcls/bow.hpp"
#include "toxcls/classifiers/knn.hpp"
#include "toxcls/classifiers/lda.hpp"
#include "toxcls/classifiers/naive_bayes.hpp"
#include "toxcls/classifiers/svm.hpp"
#include "toxcls/cnn.hpp"
#include "toxcls/corpus.hpp"
#include "toxcls/embeddings.hpp"
#include "toxcls/error.hpp"
#include "toxcls/rng.hpp"
#include "toxcls/stopwords.hpp"
#include "toxcls/textprep.hpp"

namespace toxcls {

struct ConfusionMatrix {
    long tp = 0;
    long fn = 0;
    long tn = 0;
    long fp = 0;

    long total() const { return tp + fn + tn + fp; }
};

/// Counts with `toxic` (1) as the positive class.
inline ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& truth) {
    if (preds.size() != truth.size())
        throw ArgumentError("confusion: prediction and truth lengths differ");
    if (preds.empty()) throw ArgumentError("confusion: empty label lists");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if ((preds[i] != 0 && preds[i] != 1) || (truth[i] != 0 && truth[i] != 1))
            throw ArgumentError("confusion: labels must be 0 or 1");
        if (truth[i] == 1)
            ++(preds[i] == 1 ? cm.tp : cm.fn);
        else
            ++(preds[i] == 1 ? cm.fp : cm.tn);
    }
    return cm;
}

/// Metrics with zero denominators carry no value and export as empty cells.
struct MetricsReport {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> specificity;
    std::optional<double> fdr;
};

inline constexpr std::array<const char*, 6> kMetricNames = {
    "accuracy", "precision", "recall", "f1", "specificity", "fdr"};

inline std::optional<double> metric_value(const MetricsReport& r, std::size_t metric_index) {
    switch (metric_index) {
        case 0: return r.accuracy;
        case 1: return r.precision;
        case 2: return r.recall;
        case 3: return r.f1;
        case 4: return r.specificity;
        case 5: return r.fdr;
        default: throw ArgumentError("metric index out of range");
    }
}

inline MetricsReport metrics(const ConfusionMatrix& cm) {
    if (cm.total() <= 0) throw ArgumentError("metrics: empty confusion matrix");
    if (cm.tp < 0 || cm.fn < 0 || cm.tn < 0 || cm.fp < 0)
        throw ArgumentError("metrics: negative confusion counts");
    const auto ratio = [](long num, long den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    MetricsReport r;
    r.accuracy = ratio(cm.tp + cm.tn, cm.total());
    r.precision = ratio(cm.tp, cm.tp + cm.fp);
    r.recall = ratio(cm.tp, cm.tp + cm.fn);
    r.specificity = ratio(cm.tn, cm.tn + cm.fp);
    r.fdr = ratio(cm.fp, cm.fp + cm.tp);
    if (r.precision && r.recall && *r.precision + *r.recall > 0.0)
        r.f1 = 2.0 * *r.precision * *r.recall / (*r.precision + *r.recall);
    return r;
}

enum class Method { cnn_rand, cnn_fix, svm, nb, knn, lda };

inline constexpr std::array<Method, 6> kAllMethods = {Method::cnn_rand, Method::cnn_fix,
                                                      Method::svm,      Method::nb,
                                                      Method::knn,      Method::lda};

inline std::string method_name(Method m) {
    switch (m) {
        case Method::cnn_rand: return "cnn_rand";
        case Method::cnn_fix: return "cnn_fix";
        case Method::svm: return "svm";
        case Method::nb: return "nb";
        case Method::knn: return "knn";
        case Method::lda: return "lda";
    }
    throw ArgumentError("unknown method");
}

inline Method parse_method(const std::string& name) {
    for (Method m : kAllMethods)
        if (method_name(m) == name) return m;
    throw ArgumentError("unknown method '" + name +
                        "' (expected one of cnn_rand, cnn_fix, svm, nb, knn, lda)");
}

/// Mean and sample standard deviation over the repetitions where the metric
/// was defined; absent when no (or too few) values exist.
struct MetricSummary {
    std::optional<double> mean;
    std::optional<double> stddev;
    int count = 0;
};

inline MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary s;
    s.count = static_cast<int>(values.size());
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return s;
    double sq = 0.0;
    for (double v : values) {
        const double d = v - *s.mean;
        sq += d * d;
    }
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
    return s;
}

struct ExperimentResult {
    std::string method;
    std::vector<MetricsReport> repetitions;
    std::array<MetricSummary, 6> summary;
};

inline std::array<MetricSummary, 6> summarize_repetitions(
    const std::vector<MetricsReport>& reps) {
    std::array<MetricSummary, 6> out;
    for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
        std::vector<double> defined;
        for (const auto& rep : reps)
            if (const auto v = metric_value(rep, m)) defined.push_back(*v);
        out[m] = summarize(defined);
    }
    return out;
}

struct ExperimentOptions {
    int repetitions = 20;
    std::uint64_t master_seed = 0;
    double train_fraction = 0.8;
    bool allow_toxic_downsample = false;

    StopwordList stopwords = StopwordList::english();
    double max_sparsity = 0.99;

    int knn_k = 7;
    KnnMetric knn_metric = KnnMetric::euclidean;
    SvmConfig svm;
    bool nb_multinomial = false;

    std::size_t max_len = 0; // 0 = longest training document
    std::size_t embed_dim = 300;
    std::vector<int> heights = {3, 4, 5};
    std::size_t filters = 128;
    std::size_t batch_size = 64;
    double learning_rate = 0.005;
    int epochs = 10;
    LossKind loss = LossKind::squared_error;
    const PretrainedVectors* pretrained = nullptr; // required for cnn_fix
};

/// Train-side TF-IDF pipeline state needed to featurize new documents.
struct BowPipeline {
    std::vector<std::string> terms;
    std::vector<double> idf; // all-ones when the features are raw counts
};

struct BowFeatures {
    BowPipeline pipeline;
    Matrix train{0, 0};
};

/// build_dtm -> tf-idf -> prune, on training documents only. With
/// `raw_counts` the tf-idf reweighting is skipped (multinomial NB input) but
/// the pruned term set is identical because pruning depends only on document
/// frequencies.
inline BowFeatures build_bow_features(const std::vector<std::vector<std::string>>& train_tokens,
                                      const StopwordList& stopwords, double max_sparsity,
                                      bool raw_counts = false) {
    const DocumentTermMatrix raw = build_dtm(train_tokens, stopwords);
    BowFeatures out;
    if (raw_counts) {
        const DocumentTermMatrix pruned = prune_sparse_terms(raw, max_sparsity);
        out.pipeline.terms = pruned.terms;
        out.pipeline.idf.assign(pruned.terms.size(), 1.0);
        out.train = to_dense(pruned);
    } else {
        const DocumentTermMatrix pruned = prune_sparse_terms(apply_tfidf(raw), max_sparsity);
        out.pipeline.terms = pruned.terms;
        out.pipeline.idf = idf_vector(pruned);
        out.train = to_dense(pruned);
    }
    return out;
}

inline Matrix bow_transform(const BowPipeline& pipeline,
                            const std::vector<std::vector<std::string>>& tokens) {
    return to_dense(vectorize_with(tokens, pipeline.terms, pipeline.idf), pipeline.terms.size());
}

namespace detail {

inline std::vector<std::vector<std::string>> tokenize_documents(
    const std::vector<LabeledDocument>& docs) {
    std::vector<std::vector<std::string>> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(tokenize(d.text));
    return out;
}

inline std::vector<int> labels_of(const std::vector<LabeledDocument>& docs) {
    std::vector<int> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(static_cast<int>(d.binary_label));
    return out;
}

inline MetricsReport run_single(Method m, const std::vector<LabeledDocument>& docs,
                                const ExperimentOptions& opt, std::uint64_t data_seed,
                                std::uint64_t method_seed) {
    const std::vector<LabeledDocument> balanced = balanced_subsample(
        docs, derive_seed(data_seed, fnv1a64("balance")), opt.allow_toxic_downsample);
    const CorpusSplit fold =
        split(balanced, opt.train_fraction, derive_seed(data_seed, fnv1a64("split")));

    const auto train_tokens = tokenize_documents(fold.train);
    const auto test_tokens = tokenize_documents(fold.test);
    const std::vector<int> y_train = labels_of(fold.train);
    const std::vector<int> y_test = labels_of(fold.test);

    std::vector<int> preds;
    if (m == Method::cnn_rand || m == Method::cnn_fix) {
        const Vocabulary vocab = Vocabulary::build(train_tokens);
        std::size_t l_max = opt.max_len;
        if (l_max == 0)
            for (const auto& toks : train_tokens) l_max = std::max(l_max, toks.size());
        int max_h = 1;
        for (int h : opt.heights) max_h = std::max(max_h, h);
        l_max = std::max(l_max, static_cast<std::size_t>(max_h));

        SeededRng method_root(method_seed);
        SeededRng embed_rng = method_root.split(fnv1a64("embed"));
        EmbeddingTable table;
        if (m == Method::cnn_fix) {
            if (!opt.pretrained)
                throw ArgumentError("cnn_fix requires pretrained word vectors");
            table = table_from_pretrained(*opt.pretrained, vocab, embed_rng);
        } else {
            table = random_table(vocab, opt.embed_dim, embed_rng);
        }

        std::vector<EncodedDocument> train_docs;
        train_docs.reserve(train_tokens.size());
        for (const auto& toks : train_tokens)
            train_docs.push_back(encode_and_pad(toks, vocab, static_cast<int>(l_max)));

        TrainingConfig cfg;
        cfg.batch_size = opt.batch_size;
        cfg.learning_rate = opt.learning_rate;
        cfg.epochs = opt.epochs;
        cfg.seed = method_seed;
        cfg.loss = opt.loss;
        const TrainResult trained =
            train(train_docs, y_train, cfg, std::move(table), opt.heights, opt.filters);

        preds.reserve(test_tokens.size());
        for (const auto& toks : test_tokens)
            preds.push_back(
                predict(trained.params, encode_and_pad(toks, vocab, static_cast<int>(l_max)))
                    .first);
    } else {
        const bool raw_counts = m == Method::nb && opt.nb_multinomial;
        const BowFeatures features =
            build_bow_features(train_tokens, opt.stopwords, opt.max_sparsity, raw_counts);
        const Matrix x_test = bow_transform(features.pipeline, test_tokens);

        switch (m) {
            case Method::nb:
                if (opt.nb_multinomial) {
                    MultinomialNaiveBayes nb;
                    nb.fit(features.train, y_train);
                    preds = nb.predict(x_test);
                } else {
                    GaussianNaiveBayes nb;
                    nb.fit(features.train, y_train);
                    preds = nb.predict(x_test);
                }
                break;
            case Method::knn: {
                KnnClassifier knn(opt.knn_k, opt.knn_metric);
                knn.fit(features.train, y_train);
                preds = knn.predict(x_test);
                break;
            }
            case Method::lda: {
                LinearDiscriminant lda;
                lda.fit(features.train, y_train);
                preds = lda.predict(x_test);
                break;
            }
            case Method::svm: {
                SvmClassifier svm(opt.svm);
                svm.fit(features.train, y_train);
                preds = svm.predict(x_test);
                break;
            }
            default: throw ArgumentError("unknown method");
        }
    }
    return metrics(confusion(preds, y_test));
}

} // namespace detail

/// The repeated-evaluation protocol: every repetition re-draws the balanced
/// subsample and the train/test split from a data seed shared by all methods
/// (so methods are compared on identical folds), while method-specific
/// randomness comes from a separate per-method stream.
inline ExperimentResult run_experiments(Method m, const std::vector<LabeledDocument>& docs,
                                        const ExperimentOptions& opt) {
    if (opt.repetitions < 1) throw ArgumentError("experiments: repetitions must be at least 1");
    ExperimentResult result;
    result.method = method_name(m);
    const std::uint64_t data_root = derive_seed(opt.master_seed, fnv1a64("data"));
    const std::uint64_t method_root =
        derive_seed(derive_seed(opt.master_seed, fnv1a64("method")), fnv1a64(result.method));
    for (int r = 0; r < opt.repetitions; ++r) {
        try {
            result.repetitions.push_back(
                detail::run_single(m, docs, opt, derive_seed(data_root, static_cast<std::uint64_t>(r)),
                                   derive_seed(method_root, static_cast<std::uint64_t>(r))));
        } catch (const Error& e) {
            throw Error(result.method + " repetition " + std::to_string(r + 1) + ": " + e.what());
        }
    }
    result.summary = summarize_repetitions(result.repetitions);
    return result;
}

/// Published reference results for the full-scale dataset, for side-by-side
/// comparison with locally produced summaries. Not an expected output at
/// desk scale.
struct ReferenceRow {
    const char* method;
    double accuracy_mean, accuracy_std;
    double specificity_mean, specificity_std;
    double fdr_mean, fdr_std;
};

inline const std::vector<ReferenceRow>& reference_results() {
    static const std::vector<ReferenceRow> rows = {
        {"cnn_fix", 0.912, 0.002, 0.917, 0.006, 0.083, 0.007},
        {"cnn_rand", 0.895, 0.003, 0.906, 0.015, 0.092, 0.017},
        {"knn", 0.697, 0.008, 0.590, 0.016, 0.335, 0.010},
        {"lda", 0.808, 0.005, 0.826, 0.010, 0.179, 0.009},
        {"nb", 0.719, 0.005, 0.776, 0.012, 0.250, 0.010},
        {"svm", 0.811, 0.007, 0.841, 0.012, 0.167, 0.012},
    };
    return rows;
}

} // namespace toxcls
