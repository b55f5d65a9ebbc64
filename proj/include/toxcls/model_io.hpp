#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "toxcls/classifiers/knn.hpp"
#include "toxcls/classifiers/lda.hpp"
#include "toxcls/classifiers/naive_bayes.hpp"
#include "toxcls/classifiers/svm.hpp"
#include "toxcls/cnn.hpp"
#include "toxcls/error.hpp"
#include "toxcls/eval.hpp"
#include "toxcls/textprep.hpp"

namespace toxcls {

namespace detail {

inline void write_u64_le(std::ostream& os, std::uint64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(bytes, 8);
}

inline std::uint64_t read_u64_le(std::istream& is) {
    unsigned char bytes[8];
    is.read(reinterpret_cast<char*>(bytes), 8);
    if (!is) throw FormatError("model file: truncated integer field");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return v;
}

inline void write_f64_array(std::ostream& os, const std::vector<double>& values) {
    for (const double d : values) write_u64_le(os, std::bit_cast<std::uint64_t>(d));
}

inline void read_f64_array(std::istream& is, std::vector<double>& values) {
    for (double& d : values) d = std::bit_cast<double>(read_u64_le(is));
}

} // namespace detail

inline constexpr char kCnnMagic[8] = {'T', 'X', 'C', 'N', 'N', '0', '0', '1'};

/// Binary container: 8-byte magic, little-endian u64 manifest length, JSON
/// manifest (shapes, hyperparameters, vocabulary), then the parameter arrays
/// as little-endian 64-bit floats in manifest order: embedding, each bank's
/// weights then biases, dense weights, dense biases.
inline void save_cnn_model(std::ostream& os, const NetworkParams& params, const Vocabulary& vocab,
                           const std::string& method, LossKind loss) {
    nlohmann::json manifest;
    manifest["format"] = "cnn-model";
    manifest["version"] = 1;
    manifest["method"] = method;
    manifest["loss"] = loss == LossKind::squared_error ? "mse" : "xent";
    manifest["embed_dim"] = params.embedding.dim();
    manifest["embed_rows"] = params.embedding.rows();
    manifest["trainable_embedding"] = params.embedding.trainable;
    manifest["oov_rows"] = std::vector<std::size_t>(params.embedding.oov_rows.begin(),
                                                    params.embedding.oov_rows.end());
    manifest["l_max"] = params.l_max;
    manifest["classes"] = params.classes();
    std::vector<int> heights;
    std::size_t filters = 0;
    for (const auto& bank : params.banks) {
        heights.push_back(bank.height);
        filters = bank.filters();
    }
    manifest["heights"] = heights;
    manifest["filters"] = filters;
    manifest["vocab_hash"] = vocab.hash();
    std::vector<std::string> words;
    for (int i = 1; i <= vocab.size(); ++i) words.push_back(vocab.word(i));
    manifest["vocab"] = words;

    const std::string text = manifest.dump();
    os.write(kCnnMagic, sizeof kCnnMagic);
    detail::write_u64_le(os, text.size());
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    detail::write_f64_array(os, params.embedding.vectors.data());
    for (const auto& bank : params.banks) {
        detail::write_f64_array(os, bank.weights.data());
        detail::write_f64_array(os, bank.biases);
    }
    detail::write_f64_array(os, params.dense_w.data());
    detail::write_f64_array(os, params.dense_b);
    if (!os) throw IoError("failed while writing the model container");
}

struct LoadedCnnModel {
    NetworkParams params;
    Vocabulary vocab;
    std::string method;
    LossKind loss = LossKind::squared_error;
};

inline LoadedCnnModel load_cnn_model(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kCnnMagic, 8) != 0)
        throw FormatError("model file: bad magic (not a cnn model container)");
    const std::uint64_t manifest_len = detail::read_u64_le(is);
    if (manifest_len > (1ull << 31)) throw FormatError("model file: implausible manifest length");
    std::string text(manifest_len, '\0');
    is.read(text.data(), static_cast<std::streamsize>(manifest_len));
    if (!is) throw FormatError("model file: truncated manifest");

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model file: manifest is not valid JSON: ") + e.what());
    }
    try {
        LoadedCnnModel model;
        if (manifest.at("format").get<std::string>() != "cnn-model" ||
            manifest.at("version").get<int>() != 1)
            throw FormatError("model file: unsupported container version");
        model.method = manifest.at("method").get<std::string>();
        model.loss = manifest.at("loss").get<std::string>() == "xent" ? LossKind::cross_entropy
                                                                      : LossKind::squared_error;
        const auto words = manifest.at("vocab").get<std::vector<std::string>>();
        model.vocab = Vocabulary::from_words(words);
        if (model.vocab.hash() != manifest.at("vocab_hash").get<std::uint64_t>())
            throw FormatError("model file: vocabulary hash mismatch");

        const std::size_t dim = manifest.at("embed_dim").get<std::size_t>();
        const std::size_t rows = manifest.at("embed_rows").get<std::size_t>();
        if (rows != words.size() + 1)
            throw FormatError("model file: embedding row count does not match vocabulary");
        model.params.embedding.vectors = Matrix(rows, dim);
        model.params.embedding.trainable = manifest.at("trainable_embedding").get<bool>();
        for (const auto& r : manifest.at("oov_rows"))
            model.params.embedding.oov_rows.insert(r.get<std::size_t>());
        model.params.l_max = manifest.at("l_max").get<std::size_t>();
        const std::size_t classes = manifest.at("classes").get<std::size_t>();
        const auto heights = manifest.at("heights").get<std::vector<int>>();
        const std::size_t filters = manifest.at("filters").get<std::size_t>();

        detail::read_f64_array(is, model.params.embedding.vectors.data());
        for (const int h : heights) {
            ConvFilterBank bank;
            bank.height = h;
            bank.weights = Matrix(filters, static_cast<std::size_t>(h) * dim);
            bank.biases.assign(filters, 0.0);
            detail::read_f64_array(is, bank.weights.data());
            detail::read_f64_array(is, bank.biases);
            model.params.banks.push_back(std::move(bank));
        }
        model.params.dense_w = Matrix(model.params.total_filters(), classes);
        model.params.dense_b.assign(classes, 0.0);
        detail::read_f64_array(is, model.params.dense_w.data());
        detail::read_f64_array(is, model.params.dense_b);
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model file: manifest field error: ") + e.what());
    }
}

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
    return Matrix::from_data(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                             j.at("data").get<std::vector<double>>());
}

} // namespace detail

/// Classical models serialize as versioned JSON. The pipeline block carries
/// the training-fold term list and idf weights, so prediction featurizes new
/// text exactly as training did.
struct ClassicalModel {
    std::string method; // nb, knn, lda, svm
    BowPipeline pipeline;
    bool nb_multinomial = false;
    nlohmann::json model;
};

inline void save_classical_model(std::ostream& os, const ClassicalModel& m) {
    nlohmann::json doc;
    doc["format"] = "bow-model";
    doc["version"] = 1;
    doc["method"] = m.method;
    doc["pipeline"] = {{"terms", m.pipeline.terms}, {"idf", m.pipeline.idf}};
    if (m.method == "nb") doc["nb_multinomial"] = m.nb_multinomial;
    doc["model"] = m.model;
    os << doc.dump(2) << '\n';
    if (!os) throw IoError("failed while writing the model file");
}

inline nlohmann::json gaussian_nb_to_json(const GaussianNaiveBayes& nb) {
    return {{"variant", "gaussian"},
            {"mean", {nb.mean(0), nb.mean(1)}},
            {"variance", {nb.variance(0), nb.variance(1)}},
            {"log_prior", {nb.log_prior(0), nb.log_prior(1)}}};
}

inline GaussianNaiveBayes gaussian_nb_from_json(const nlohmann::json& j) {
    return GaussianNaiveBayes::from_parameters(
        j.at("mean").at(0).get<std::vector<double>>(), j.at("mean").at(1).get<std::vector<double>>(),
        j.at("variance").at(0).get<std::vector<double>>(),
        j.at("variance").at(1).get<std::vector<double>>(), j.at("log_prior").at(0).get<double>(),
        j.at("log_prior").at(1).get<double>());
}

inline nlohmann::json multinomial_nb_to_json(const MultinomialNaiveBayes& nb) {
    return {{"variant", "multinomial"},
            {"log_probability", {nb.log_probability(0), nb.log_probability(1)}},
            {"log_prior", {nb.log_prior(0), nb.log_prior(1)}}};
}

inline MultinomialNaiveBayes multinomial_nb_from_json(const nlohmann::json& j) {
    return MultinomialNaiveBayes::from_parameters(
        j.at("log_probability").at(0).get<std::vector<double>>(),
        j.at("log_probability").at(1).get<std::vector<double>>(),
        j.at("log_prior").at(0).get<double>(), j.at("log_prior").at(1).get<double>());
}

inline nlohmann::json knn_to_json(const KnnClassifier& knn) {
    return {{"k", knn.k()},
            {"metric", knn.metric() == KnnMetric::cosine ? "cosine" : "euclidean"},
            {"train", detail::matrix_to_json(knn.training_data())},
            {"labels", knn.training_labels()}};
}

inline KnnClassifier knn_from_json(const nlohmann::json& j) {
    KnnClassifier knn(j.at("k").get<int>(), j.at("metric").get<std::string>() == "cosine"
                                                ? KnnMetric::cosine
                                                : KnnMetric::euclidean);
    knn.fit(detail::matrix_from_json(j.at("train")), j.at("labels").get<std::vector<int>>());
    return knn;
}

inline nlohmann::json lda_to_json(const LinearDiscriminant& lda) {
    return {{"mean", {lda.mean(0), lda.mean(1)}},
            {"precision", detail::matrix_to_json(lda.precision())},
            {"log_prior", {lda.log_prior(0), lda.log_prior(1)}},
            {"ridge", lda.ridge()}};
}

inline LinearDiscriminant lda_from_json(const nlohmann::json& j) {
    return LinearDiscriminant::from_parameters(
        j.at("mean").at(0).get<std::vector<double>>(), j.at("mean").at(1).get<std::vector<double>>(),
        detail::matrix_from_json(j.at("precision")), j.at("log_prior").at(0).get<double>(),
        j.at("log_prior").at(1).get<double>(), j.value("ridge", 0.0));
}

inline nlohmann::json svm_to_json(const SvmClassifier& svm) {
    return {{"c", svm.config().c},
            {"kernel", svm.config().kernel == SvmKernel::linear ? "linear" : "rbf"},
            {"gamma", svm.gamma()},
            {"support_vectors", detail::matrix_to_json(svm.support_vectors())},
            {"coefficients", svm.coefficients()},
            {"bias", svm.bias()},
            {"kkt_residual", svm.info().kkt_residual},
            {"dual_objective", svm.info().dual_objective}};
}

inline SvmClassifier svm_from_json(const nlohmann::json& j) {
    SvmConfig config;
    config.c = j.at("c").get<double>();
    config.kernel = j.at("kernel").get<std::string>() == "linear" ? SvmKernel::linear
                                                                  : SvmKernel::rbf;
    config.gamma = j.at("gamma").get<double>();
    SvmFitInfo info;
    info.kkt_residual = j.value("kkt_residual", 0.0);
    info.dual_objective = j.value("dual_objective", 0.0);
    return SvmClassifier::from_parameters(config, config.gamma,
                                          detail::matrix_from_json(j.at("support_vectors")),
                                          j.at("coefficients").get<std::vector<double>>(),
                                          j.at("bias").get<double>(), info);
}

inline ClassicalModel load_classical_model(std::istream& is) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model file: not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != "bow-model" ||
            doc.at("version").get<int>() != 1)
            throw FormatError("model file: unsupported model version");
        ClassicalModel m;
        m.method = doc.at("method").get<std::string>();
        m.pipeline.terms = doc.at("pipeline").at("terms").get<std::vector<std::string>>();
        m.pipeline.idf = doc.at("pipeline").at("idf").get<std::vector<double>>();
        if (m.pipeline.terms.size() != m.pipeline.idf.size())
            throw FormatError("model file: pipeline terms and idf lengths differ");
        m.nb_multinomial = doc.value("nb_multinomial", false);
        m.model = doc.at("model");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model file: field error: ") + e.what());
    }
}

/// Featurizes token lists through the stored pipeline and predicts with the
/// reconstructed classifier.
inline std::vector<int> predict_with_classical(
    const ClassicalModel& m, const std::vector<std::vector<std::string>>& tokens) {
    const Matrix x = bow_transform(m.pipeline, tokens);
    try {
        if (m.method == "nb")
            return m.nb_multinomial ? multinomial_nb_from_json(m.model).predict(x)
                                    : gaussian_nb_from_json(m.model).predict(x);
        if (m.method == "knn") return knn_from_json(m.model).predict(x);
        if (m.method == "lda") return lda_from_json(m.model).predict(x);
        if (m.method == "svm") return svm_from_json(m.model).predict(x);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("model file: parameter error: ") + e.what());
    }
    throw FormatError("model file: unknown method '" + m.method + "'");
}

} // namespace toxcls
