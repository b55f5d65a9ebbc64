// Command-line front end: data preparation, single-method training,
// prediction from saved models, the repeated benchmark protocol, and 2-D
// projections of the document-term matrix. Every run records its resolved
// configuration in <out>/manifest.json, and `rerun` replays such a manifest.

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "toxcls/toxcls.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace toxcls;

/// Post-parse validation failures: reported like flag errors, exit code 2.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

struct Settings {
    std::string subcommand;

    std::string data;
    std::string out = "./results";
    std::uint64_t seed = 42;
    double train_fraction = 0.8;
    bool allow_downsample = false;

    std::string stopwords = "english"; // english | none | path to a word list
    double max_sparsity = 0.99;

    std::string method;
    std::vector<std::string> methods; // empty = all
    int reps = 20;

    int knn_k = 7;
    bool knn_cosine = false;
    double svm_c = 1.0;
    std::string svm_kernel = "rbf";
    double svm_gamma = 0.0;
    bool nb_multinomial = false;

    std::size_t max_len = 0; // 0 = longest training document
    std::string embeddings;
    std::size_t embed_dim = 300;
    bool embed_dim_explicit = false;
    std::vector<int> heights = {3, 4, 5};
    std::size_t filters = 128;
    std::size_t batch = 64;
    double lr = 0.005;
    int epochs = 10;
    std::string loss = "mse"; // mse | xent

    std::string model;
    std::string input;
    std::string text_column = "comment_text";
    std::string id_column = "id";

    std::string input_dtm;
    double perplexity = 30.0;
    int iterations = 1000;
};

json settings_to_json(const Settings& s) {
    return {{"subcommand", s.subcommand},
            {"data", s.data},
            {"out", s.out},
            {"seed", s.seed},
            {"train_fraction", s.train_fraction},
            {"allow_downsample", s.allow_downsample},
            {"stopwords", s.stopwords},
            {"max_sparsity", s.max_sparsity},
            {"method", s.method},
            {"methods", s.methods},
            {"reps", s.reps},
            {"knn_k", s.knn_k},
            {"knn_cosine", s.knn_cosine},
            {"svm_c", s.svm_c},
            {"svm_kernel", s.svm_kernel},
            {"svm_gamma", s.svm_gamma},
            {"nb_multinomial", s.nb_multinomial},
            {"max_len", s.max_len},
            {"embeddings", s.embeddings},
            {"embed_dim", s.embed_dim},
            {"heights", s.heights},
            {"filters", s.filters},
            {"batch", s.batch},
            {"lr", s.lr},
            {"epochs", s.epochs},
            {"loss", s.loss},
            {"model", s.model},
            {"input", s.input},
            {"text_column", s.text_column},
            {"id_column", s.id_column},
            {"input_dtm", s.input_dtm},
            {"perplexity", s.perplexity},
            {"iterations", s.iterations}};
}

Settings settings_from_json(const json& j) {
    const Settings defaults;
    Settings s;
    s.subcommand = j.at("subcommand").get<std::string>();
    s.data = j.value("data", defaults.data);
    s.out = j.value("out", defaults.out);
    s.seed = j.value("seed", defaults.seed);
    s.train_fraction = j.value("train_fraction", defaults.train_fraction);
    s.allow_downsample = j.value("allow_downsample", defaults.allow_downsample);
    s.stopwords = j.value("stopwords", defaults.stopwords);
    s.max_sparsity = j.value("max_sparsity", defaults.max_sparsity);
    s.method = j.value("method", defaults.method);
    s.methods = j.value("methods", defaults.methods);
    s.reps = j.value("reps", defaults.reps);
    s.knn_k = j.value("knn_k", defaults.knn_k);
    s.knn_cosine = j.value("knn_cosine", defaults.knn_cosine);
    s.svm_c = j.value("svm_c", defaults.svm_c);
    s.svm_kernel = j.value("svm_kernel", defaults.svm_kernel);
    s.svm_gamma = j.value("svm_gamma", defaults.svm_gamma);
    s.nb_multinomial = j.value("nb_multinomial", defaults.nb_multinomial);
    s.max_len = j.value("max_len", defaults.max_len);
    s.embeddings = j.value("embeddings", defaults.embeddings);
    s.embed_dim = j.value("embed_dim", defaults.embed_dim);
    s.embed_dim_explicit = true; // manifest values are already resolved
    s.heights = j.value("heights", defaults.heights);
    s.filters = j.value("filters", defaults.filters);
    s.batch = j.value("batch", defaults.batch);
    s.lr = j.value("lr", defaults.lr);
    s.epochs = j.value("epochs", defaults.epochs);
    s.loss = j.value("loss", defaults.loss);
    s.model = j.value("model", defaults.model);
    s.input = j.value("input", defaults.input);
    s.text_column = j.value("text_column", defaults.text_column);
    s.id_column = j.value("id_column", defaults.id_column);
    s.input_dtm = j.value("input_dtm", defaults.input_dtm);
    s.perplexity = j.value("perplexity", defaults.perplexity);
    s.iterations = j.value("iterations", defaults.iterations);
    return s;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("failed while reading " + path);
    return buf.str();
}

void write_manifest(const Settings& s) {
    const fs::path path = fs::path(s.out) / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    const json doc = {{"tool", "toxcls"}, {"manifest_version", 1}, {"settings", settings_to_json(s)}};
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed while writing " + path.string());
}

StopwordList resolve_stopwords(const std::string& spec) {
    if (spec == "english") return StopwordList::english();
    if (spec == "none") return StopwordList::none();
    return StopwordList::load(spec);
}

LossKind loss_from_name(const std::string& name) {
    return name == "xent" ? LossKind::cross_entropy : LossKind::squared_error;
}

std::vector<std::vector<std::string>> tokenize_all(const std::vector<LabeledDocument>& docs) {
    std::vector<std::vector<std::string>> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(tokenize(d.text));
    return out;
}

std::vector<int> binary_labels(const std::vector<LabeledDocument>& docs) {
    std::vector<int> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(static_cast<int>(d.binary_label));
    return out;
}

/// Loads the word-vector file and reconciles --embed-dim with its contents:
/// an unset flag adopts the file's dimensionality, an explicit mismatch is an
/// error.
PretrainedVectors load_vectors(Settings& s) {
    std::ifstream in(s.embeddings, std::ios::binary);
    if (!in) throw IoError("cannot open word vector file " + s.embeddings);
    PretrainedVectors pv = parse_vector_file(in);
    for (const auto& w : pv.warnings) std::clog << "toxcls: warning: " << w << '\n';
    if (s.embed_dim_explicit && s.embed_dim != pv.dim)
        throw DimensionError("word vector file " + s.embeddings + " has dimension " +
                             std::to_string(pv.dim) + " but --embed-dim asks for " +
                             std::to_string(s.embed_dim));
    s.embed_dim = pv.dim;
    return pv;
}

ExperimentOptions options_from(const Settings& s, const PretrainedVectors* pv) {
    ExperimentOptions opt;
    opt.repetitions = s.reps;
    opt.master_seed = s.seed;
    opt.train_fraction = s.train_fraction;
    opt.allow_toxic_downsample = s.allow_downsample;
    opt.stopwords = resolve_stopwords(s.stopwords);
    opt.max_sparsity = s.max_sparsity;
    opt.knn_k = s.knn_k;
    opt.knn_metric = s.knn_cosine ? KnnMetric::cosine : KnnMetric::euclidean;
    opt.svm.c = s.svm_c;
    opt.svm.kernel = s.svm_kernel == "linear" ? SvmKernel::linear : SvmKernel::rbf;
    opt.svm.gamma = s.svm_gamma;
    opt.nb_multinomial = s.nb_multinomial;
    opt.max_len = s.max_len;
    opt.embed_dim = s.embed_dim;
    opt.heights = s.heights;
    opt.filters = s.filters;
    opt.batch_size = s.batch;
    opt.learning_rate = s.lr;
    opt.epochs = s.epochs;
    opt.loss = loss_from_name(s.loss);
    opt.pretrained = pv;
    return opt;
}

struct TraceRow {
    std::string quantity;
    int step;
    double value;
};

void write_trace(const fs::path& dir, const std::vector<TraceRow>& rows) {
    const fs::path path = dir / "training_trace.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "quantity,step,value\n";
    char buf[64];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.17g", row.value);
        out << row.quantity << ',' << row.step << ',' << buf << '\n';
    }
    if (!out) throw IoError("failed while writing " + path.string());
}

void run_prepare(Settings& s) {
    const auto docs = parse_corpus(slurp(s.data));
    const auto balanced =
        balanced_subsample(docs, derive_seed(s.seed, fnv1a64("balance")), s.allow_downsample);
    const CorpusSplit fold = split(balanced, s.train_fraction, derive_seed(s.seed, fnv1a64("split")));

    fs::create_directories(s.out);
    write_manifest(s);
    for (const auto& [name, part] : {std::pair<const char*, const std::vector<LabeledDocument>*>{
                                         "train.csv", &fold.train},
                                     {"test.csv", &fold.test}}) {
        const fs::path path = fs::path(s.out) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        write_corpus_csv(out, *part);
        if (!out) throw IoError("failed while writing " + path.string());
    }
    std::clog << "toxcls: prepared " << docs.size() << " documents -> " << balanced.size()
              << " balanced, " << fold.train.size() << " train / " << fold.test.size()
              << " test\n";
}

void run_train(Settings& s) {
    const auto docs = parse_corpus(slurp(s.data));
    const auto tokens = tokenize_all(docs);
    const std::vector<int> labels = binary_labels(docs);

    std::optional<PretrainedVectors> pv;
    if (!s.embeddings.empty()) pv = load_vectors(s);

    fs::create_directories(s.out);
    write_manifest(s);

    std::vector<TraceRow> trace;
    trace.push_back({"training_documents", 1, static_cast<double>(docs.size())});
    std::string model_file;

    if (s.method == "cnn_rand" || s.method == "cnn_fix") {
        const Vocabulary vocab = Vocabulary::build(tokens);
        std::size_t l_max = s.max_len;
        if (l_max == 0)
            for (const auto& toks : tokens) l_max = std::max(l_max, toks.size());
        for (int h : s.heights) l_max = std::max(l_max, static_cast<std::size_t>(h));

        SeededRng root(s.seed);
        SeededRng embed_rng = root.split(fnv1a64("embed"));
        EmbeddingTable table = s.method == "cnn_fix"
                                   ? table_from_pretrained(*pv, vocab, embed_rng)
                                   : random_table(vocab, s.embed_dim, embed_rng);

        std::vector<EncodedDocument> encoded;
        encoded.reserve(tokens.size());
        for (const auto& toks : tokens)
            encoded.push_back(encode_and_pad(toks, vocab, static_cast<int>(l_max)));

        TrainingConfig cfg;
        cfg.batch_size = s.batch;
        cfg.learning_rate = s.lr;
        cfg.epochs = s.epochs;
        cfg.seed = s.seed;
        cfg.loss = loss_from_name(s.loss);
        const TrainResult result = train(encoded, labels, cfg, std::move(table), s.heights, s.filters);

        for (std::size_t e = 0; e < result.epoch_losses.size(); ++e)
            trace.push_back({"epoch_loss", static_cast<int>(e + 1), result.epoch_losses[e]});
        std::size_t correct = 0;
        for (std::size_t i = 0; i < encoded.size(); ++i)
            if (predict(result.params, encoded[i]).first == labels[i]) ++correct;
        trace.push_back(
            {"train_accuracy", 1, static_cast<double>(correct) / static_cast<double>(docs.size())});

        model_file = "model.bin";
        std::ofstream out(fs::path(s.out) / model_file, std::ios::binary);
        if (!out) throw IoError("cannot write " + (fs::path(s.out) / model_file).string());
        save_cnn_model(out, result.params, vocab, s.method, cfg.loss);
    } else {
        const bool raw_counts = s.method == "nb" && s.nb_multinomial;
        const BowFeatures features =
            build_bow_features(tokens, resolve_stopwords(s.stopwords), s.max_sparsity, raw_counts);
        trace.push_back({"feature_count", 1, static_cast<double>(features.pipeline.terms.size())});

        ClassicalModel cm;
        cm.method = s.method;
        cm.pipeline = features.pipeline;
        cm.nb_multinomial = s.nb_multinomial;
        std::vector<int> train_preds;
        if (s.method == "nb") {
            if (s.nb_multinomial) {
                MultinomialNaiveBayes nb;
                nb.fit(features.train, labels);
                cm.model = multinomial_nb_to_json(nb);
                train_preds = nb.predict(features.train);
            } else {
                GaussianNaiveBayes nb;
                nb.fit(features.train, labels);
                cm.model = gaussian_nb_to_json(nb);
                train_preds = nb.predict(features.train);
            }
        } else if (s.method == "knn") {
            KnnClassifier knn(s.knn_k, s.knn_cosine ? KnnMetric::cosine : KnnMetric::euclidean);
            knn.fit(features.train, labels);
            cm.model = knn_to_json(knn);
            train_preds = knn.predict(features.train);
        } else if (s.method == "lda") {
            LinearDiscriminant lda;
            lda.fit(features.train, labels);
            cm.model = lda_to_json(lda);
            trace.push_back({"ridge", 1, lda.ridge()});
            train_preds = lda.predict(features.train);
        } else {
            SvmConfig config;
            config.c = s.svm_c;
            config.kernel = s.svm_kernel == "linear" ? SvmKernel::linear : SvmKernel::rbf;
            config.gamma = s.svm_gamma;
            SvmClassifier svm(config);
            svm.fit(features.train, labels);
            cm.model = svm_to_json(svm);
            trace.push_back({"sweeps", 1, static_cast<double>(svm.info().sweeps)});
            trace.push_back({"kkt_residual", 1, svm.info().kkt_residual});
            trace.push_back({"support_vectors", 1, static_cast<double>(svm.info().support_vectors)});
            trace.push_back({"dual_objective", 1, svm.info().dual_objective});
            train_preds = svm.predict(features.train);
        }
        std::size_t correct = 0;
        for (std::size_t i = 0; i < train_preds.size(); ++i)
            if (train_preds[i] == labels[i]) ++correct;
        trace.push_back(
            {"train_accuracy", 1, static_cast<double>(correct) / static_cast<double>(docs.size())});

        model_file = "model.json";
        std::ofstream out(fs::path(s.out) / model_file, std::ios::binary);
        if (!out) throw IoError("cannot write " + (fs::path(s.out) / model_file).string());
        save_classical_model(out, cm);
    }

    write_trace(s.out, trace);
    std::clog << "toxcls: trained " << s.method << " on " << docs.size() << " documents, wrote "
              << model_file << " and training_trace.csv\n";
}

void run_predict(Settings& s) {
    const CsvTable table = parse_csv(slurp(s.input));
    std::size_t text_col = table.header.size();
    std::size_t id_col = table.header.size();
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (table.header[i] == s.text_column) text_col = i;
        if (table.header[i] == s.id_column) id_col = i;
    }
    if (text_col == table.header.size())
        throw SchemaError("input CSV has no '" + s.text_column + "' column");

    std::vector<std::string> ids;
    std::vector<std::vector<std::string>> tokens;
    ids.reserve(table.rows.size());
    tokens.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (text_col >= row.size())
            throw ParseError("input row " + std::to_string(r + 1) + " has too few fields");
        ids.push_back(id_col < row.size() ? row[id_col] : std::to_string(r + 1));
        tokens.push_back(tokenize(row[text_col]));
    }

    std::ifstream model_in(s.model, std::ios::binary);
    if (!model_in) throw IoError("cannot open model file " + s.model);
    char head[8] = {};
    model_in.read(head, sizeof head);
    const bool is_cnn =
        model_in.gcount() == sizeof head && std::memcmp(head, kCnnMagic, sizeof head) == 0;
    model_in.clear();
    model_in.seekg(0);

    std::vector<int> labels;
    std::string method;
    if (is_cnn) {
        const LoadedCnnModel m = load_cnn_model(model_in);
        method = m.method;
        labels.reserve(tokens.size());
        for (const auto& toks : tokens)
            labels.push_back(
                predict(m.params, encode_and_pad(toks, m.vocab, static_cast<int>(m.params.l_max)))
                    .first);
    } else {
        const ClassicalModel m = load_classical_model(model_in);
        method = m.method;
        labels = predict_with_classical(m, tokens);
    }

    fs::create_directories(s.out);
    write_manifest(s);
    const fs::path path = fs::path(s.out) / "predictions.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_csv_row(out, {"id", "label"});
    for (std::size_t i = 0; i < ids.size(); ++i)
        write_csv_row(out, {ids[i], std::to_string(labels[i])});
    if (!out) throw IoError("failed while writing " + path.string());
    std::clog << "toxcls: predicted " << ids.size() << " documents with the " << method
              << " model\n";
}

void run_benchmark(Settings& s) {
    const auto docs = parse_corpus(slurp(s.data));

    std::optional<PretrainedVectors> pv;
    if (!s.embeddings.empty()) pv = load_vectors(s);

    fs::create_directories(s.out);
    write_manifest(s);

    const ExperimentOptions opt = options_from(s, pv ? &*pv : nullptr);
    std::vector<ExperimentResult> results;
    for (const auto& name : s.methods) {
        std::clog << "toxcls: benchmarking " << name << " (" << s.reps << " repetitions)\n";
        results.push_back(run_experiments(parse_method(name), docs, opt));
        const auto& acc = results.back().summary[0];
        std::clog << "toxcls: " << name << " accuracy mean " << (acc.mean ? *acc.mean : 0.0)
                  << " over " << acc.count << " defined repetitions\n";
    }
    export_results(s.out, results);
    std::clog << "toxcls: wrote summary.csv, runs.csv and box plot SVGs to " << s.out << '\n';
}

void run_viz(Settings& s) {
    Matrix x(0, 0);
    std::vector<int> labels;
    if (!s.data.empty()) {
        const auto docs = parse_corpus(slurp(s.data));
        const auto tokens = tokenize_all(docs);
        labels = binary_labels(docs);
        const DocumentTermMatrix pruned =
            prune_sparse_terms(apply_tfidf(build_dtm(tokens, resolve_stopwords(s.stopwords))),
                               s.max_sparsity);
        x = to_dense(pruned);
    } else {
        std::ifstream in(s.input_dtm, std::ios::binary);
        if (!in) throw IoError("cannot open " + s.input_dtm);
        x = read_matrix_market(in);
    }

    fs::create_directories(s.out);
    write_manifest(s);

    if (s.subcommand == "viz_pca") {
        const Projection2D proj = pca_2d(x, labels);
        emit_scatter(proj, (fs::path(s.out) / "pca").string());
        std::clog << "toxcls: wrote pca.csv and pca.svg for " << x.rows() << " documents\n";
    } else {
        SeededRng rng(s.seed);
        const TsneResult result = tsne_2d(x, labels, s.perplexity, s.iterations, rng);
        for (const auto& w : result.warnings) std::clog << "toxcls: warning: " << w << '\n';
        emit_scatter(result.projection, (fs::path(s.out) / "tsne").string());

        const fs::path kl_path = fs::path(s.out) / "tsne_kl.csv";
        std::ofstream kl(kl_path, std::ios::binary);
        if (!kl) throw IoError("cannot write " + kl_path.string());
        kl << "iteration,kl\n";
        char buf[64];
        for (std::size_t i = 0; i < result.kl_trace.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", result.kl_trace[i]);
            kl << (i + 1) << ',' << buf << '\n';
        }
        if (!kl) throw IoError("failed while writing " + kl_path.string());
        std::clog << "toxcls: wrote tsne.csv, tsne.svg and tsne_kl.csv for " << x.rows()
                  << " documents\n";
    }
}

void validate_common(const Settings& s) {
    if (!(s.train_fraction > 0.0 && s.train_fraction < 1.0))
        throw UsageError("--train-fraction must lie strictly between 0 and 1");
    if (!(s.max_sparsity > 0.0 && s.max_sparsity <= 1.0))
        throw UsageError("--max-sparsity must lie in (0, 1]");
    if (s.knn_k < 1 || s.knn_k % 2 == 0) throw UsageError("--knn-k must be a positive odd number");
    if (!(s.svm_c > 0.0)) throw UsageError("--svm-c must be positive");
    if (s.svm_gamma < 0.0) throw UsageError("--svm-gamma must be nonnegative (0 = 1/features)");
    if (s.epochs < 1) throw UsageError("--epochs must be at least 1");
    if (s.batch < 1) throw UsageError("--batch must be at least 1");
    if (!(s.lr > 0.0)) throw UsageError("--lr must be positive");
    if (s.filters < 1) throw UsageError("--filters must be at least 1");
    if (s.heights.empty()) throw UsageError("--heights must name at least one filter height");
    for (int h : s.heights)
        if (h < 1) throw UsageError("--heights entries must be positive");
    if (s.reps < 1) throw UsageError("--reps must be at least 1");
    if (!(s.perplexity > 0.0)) throw UsageError("--perplexity must be positive");
    if (s.iterations < 1) throw UsageError("--iters must be at least 1");
}

void validate_embeddings_flags(const Settings& s) {
    if (s.subcommand == "train") {
        if (s.method == "cnn_fix" && s.embeddings.empty())
            throw UsageError("train --method cnn_fix requires --embeddings");
        if (!s.embeddings.empty() && s.method != "cnn_fix")
            throw UsageError("--embeddings is only valid with method cnn_fix");
    } else if (s.subcommand == "benchmark") {
        bool has_fix = false;
        for (const auto& name : s.methods) has_fix = has_fix || name == "cnn_fix";
        if (has_fix && s.embeddings.empty())
            throw UsageError("benchmarking cnn_fix requires --embeddings");
        if (!s.embeddings.empty() && !has_fix)
            throw UsageError("--embeddings is pointless without cnn_fix in --methods");
    }
}

void dispatch(Settings& s) {
    validate_common(s);
    if (s.subcommand == "benchmark") {
        if (s.methods.empty())
            for (Method m : kAllMethods) s.methods.push_back(method_name(m));
        for (const auto& name : s.methods)
            try {
                parse_method(name);
            } catch (const Error& e) {
                throw UsageError(e.what());
            }
    }
    if (s.subcommand == "train") {
        try {
            parse_method(s.method);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
    validate_embeddings_flags(s);

    if (s.subcommand == "prepare")
        run_prepare(s);
    else if (s.subcommand == "train")
        run_train(s);
    else if (s.subcommand == "predict")
        run_predict(s);
    else if (s.subcommand == "benchmark")
        run_benchmark(s);
    else if (s.subcommand == "viz_pca" || s.subcommand == "viz_tsne")
        run_viz(s);
    else
        throw UsageError("unknown subcommand '" + s.subcommand + "'");
}

std::string single_line(std::string msg) {
    for (char& c : msg)
        if (c == '\n' || c == '\r') c = ' ';
    return msg;
}

void add_data_options(CLI::App* cmd, Settings& s, bool required) {
    auto* data = cmd->add_option("--data", s.data, "Labeled comment CSV");
    if (required) data->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", s.seed, "Master seed")->capture_default_str();
    cmd->add_option("--out,-o", s.out, "Output directory")->capture_default_str();
}

void add_bow_options(CLI::App* cmd, Settings& s) {
    cmd->add_option("--stopwords", s.stopwords, "english, none, or a word-list file")
        ->capture_default_str();
    cmd->add_option("--max-sparsity", s.max_sparsity, "Drop terms sparser than this")
        ->capture_default_str();
}

CLI::Option* add_method_options(CLI::App* cmd, Settings& s) {
    add_bow_options(cmd, s);
    cmd->add_option("--knn-k", s.knn_k, "Neighbour count (odd)")->capture_default_str();
    cmd->add_flag("--knn-cosine", s.knn_cosine, "Cosine distance instead of euclidean");
    cmd->add_option("--svm-c", s.svm_c, "Soft-margin penalty")->capture_default_str();
    cmd->add_option("--svm-kernel", s.svm_kernel, "Kernel")
        ->check(CLI::IsMember({"linear", "rbf"}))
        ->capture_default_str();
    cmd->add_option("--svm-gamma", s.svm_gamma, "rbf width (0 = 1/features)")
        ->capture_default_str();
    cmd->add_flag("--nb-multinomial", s.nb_multinomial,
                  "Multinomial naive Bayes on raw counts instead of gaussian on tf-idf");
    cmd->add_option("--max-len", s.max_len, "Padding length (0 = longest training document)")
        ->capture_default_str();
    cmd->add_option("--embeddings", s.embeddings, "Pretrained word vector file (cnn_fix)")
        ->check(CLI::ExistingFile);
    auto* embed_dim =
        cmd->add_option("--embed-dim", s.embed_dim, "Embedding dimension for cnn_rand")
            ->capture_default_str();
    cmd->add_option("--heights", s.heights, "Filter heights, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--filters", s.filters, "Filters per height")->capture_default_str();
    cmd->add_option("--batch", s.batch, "Mini-batch size")->capture_default_str();
    cmd->add_option("--lr", s.lr, "Learning rate")->capture_default_str();
    cmd->add_option("--epochs", s.epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--loss", s.loss, "Training loss")
        ->check(CLI::IsMember({"mse", "xent"}))
        ->capture_default_str();
    return embed_dim;
}

} // namespace

int main(int argc, char** argv) {
    Settings s;
    CLI::App app{"Toxic comment classification workbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "toxcls 1.0.0");

    auto* prepare = app.add_subcommand("prepare", "Parse, balance and split a labeled corpus");
    add_data_options(prepare, s, true);
    prepare->add_option("--train-fraction", s.train_fraction, "Training share of the split")
        ->capture_default_str();
    prepare->add_flag("--allow-downsample", s.allow_downsample,
                      "Sample the toxic class down when it is the majority");
    prepare->set_config("--config", "", "Key = value configuration file");

    auto* train_cmd = app.add_subcommand("train", "Train one method on a labeled corpus");
    add_data_options(train_cmd, s, true);
    train_cmd
        ->add_option("--method", s.method, "One of cnn_rand, cnn_fix, svm, nb, knn, lda")
        ->required();
    CLI::Option* train_embed_dim = add_method_options(train_cmd, s);
    train_cmd->set_config("--config", "", "Key = value configuration file");

    auto* predict_cmd = app.add_subcommand("predict", "Label texts with a saved model");
    predict_cmd->add_option("--model", s.model, "Model file from train")
        ->required()
        ->check(CLI::ExistingFile);
    predict_cmd->add_option("--input", s.input, "CSV with a text column")
        ->required()
        ->check(CLI::ExistingFile);
    predict_cmd->add_option("--text-column", s.text_column, "Text column name")
        ->capture_default_str();
    predict_cmd->add_option("--id-column", s.id_column, "Id column name (row number if absent)")
        ->capture_default_str();
    predict_cmd->add_option("--out,-o", s.out, "Output directory")->capture_default_str();
    predict_cmd->set_config("--config", "", "Key = value configuration file");

    auto* bench = app.add_subcommand("benchmark", "Repeated balanced-split evaluation");
    add_data_options(bench, s, true);
    bench->add_option("--methods", s.methods, "Comma-separated method list (default: all)")
        ->delimiter(',');
    bench->add_option("--reps", s.reps, "Repetitions per method")->capture_default_str();
    bench->add_option("--train-fraction", s.train_fraction, "Training share of each split")
        ->capture_default_str();
    bench->add_flag("--allow-downsample", s.allow_downsample,
                    "Sample the toxic class down when it is the majority");
    CLI::Option* bench_embed_dim = add_method_options(bench, s);
    bench->set_config("--config", "", "Key = value configuration file");

    auto* viz = app.add_subcommand("viz", "2-D projections of the document-term matrix");
    viz->require_subcommand(1);
    CLI::Option* viz_data = nullptr;
    CLI::Option* viz_dtm = nullptr;
    for (const auto& [name, help] :
         {std::pair<const char*, const char*>{"pca", "Principal component projection"},
          {"tsne", "t-SNE embedding"}}) {
        auto* sub = viz->add_subcommand(name, help);
        viz_data = sub->add_option("--data", s.data, "Labeled corpus to featurize")
                       ->check(CLI::ExistingFile);
        viz_dtm = sub->add_option("--input-dtm", s.input_dtm, "Prebuilt MatrixMarket DTM")
                      ->check(CLI::ExistingFile);
        viz_data->excludes(viz_dtm);
        viz_dtm->excludes(viz_data);
        add_bow_options(sub, s);
        sub->add_option("--out,-o", s.out, "Output directory")->capture_default_str();
        if (std::string(name) == "tsne") {
            sub->add_option("--perplexity", s.perplexity, "Target perplexity")
                ->capture_default_str();
            sub->add_option("--iters", s.iterations, "Gradient descent iterations")
                ->capture_default_str();
            sub->add_option("--seed", s.seed, "Layout seed")->capture_default_str();
        }
        sub->set_config("--config", "", "Key = value configuration file");
    }

    auto* rerun = app.add_subcommand("rerun", "Replay a run from its manifest.json");
    std::string manifest_path;
    std::string rerun_out;
    rerun->add_option("--manifest", manifest_path, "manifest.json from an earlier run")
        ->required()
        ->check(CLI::ExistingFile);
    CLI::Option* rerun_out_opt =
        rerun->add_option("--out,-o", rerun_out, "Override the recorded output directory");

    try {
        app.parse(argc, argv);

        if (app.got_subcommand(prepare)) {
            s.subcommand = "prepare";
        } else if (app.got_subcommand(train_cmd)) {
            s.subcommand = "train";
            s.embed_dim_explicit = train_embed_dim->count() > 0;
        } else if (app.got_subcommand(predict_cmd)) {
            s.subcommand = "predict";
        } else if (app.got_subcommand(bench)) {
            s.subcommand = "benchmark";
            s.embed_dim_explicit = bench_embed_dim->count() > 0;
        } else if (app.got_subcommand(viz)) {
            s.subcommand = viz->got_subcommand("pca") ? "viz_pca" : "viz_tsne";
            if (s.data.empty() && s.input_dtm.empty())
                throw UsageError("viz needs either --data or --input-dtm");
        } else if (app.got_subcommand(rerun)) {
            json doc;
            try {
                doc = json::parse(slurp(manifest_path));
                s = settings_from_json(doc.at("settings"));
            } catch (const json::exception& e) {
                throw FormatError("manifest " + manifest_path + " is not usable: " + e.what());
            }
            if (rerun_out_opt->count() > 0) s.out = rerun_out;
        }

        dispatch(s);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        std::cerr << "toxcls: usage error: " << single_line(e.what()) << '\n';
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "toxcls: usage error: " << single_line(e.what()) << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "toxcls: error: " << single_line(e.what()) << '\n';
        return 1;
    }
}
