#include <cmath>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "toxcls/error.hpp"
#include "toxcls/eval.hpp"
#include "toxcls/rng.hpp"

using toxcls::ConfusionMatrix;
using toxcls::ExperimentOptions;
using toxcls::Label;
using toxcls::LabeledDocument;
using toxcls::Method;
using toxcls::MetricsReport;

namespace {

// A 60-document corpus whose classes use disjoint content words. Texts are
// distinct so confusion with duplicate handling cannot mask anything.
std::vector<LabeledDocument> synthetic_corpus() {
    std::vector<LabeledDocument> docs;
    for (int i = 0; i < 30; ++i) {
        LabeledDocument d;
        d.id = "tox" + std::to_string(i);
        d.text = "awful garbage rant number " + std::to_string(i) + " stinks badly";
        d.raw_labels[0] = 1;
        d.binary_label = Label::toxic;
        docs.push_back(d);
    }
    for (int i = 0; i < 30; ++i) {
        LabeledDocument d;
        d.id = "ok" + std::to_string(i);
        d.text = "pleasant helpful reply number " + std::to_string(i) + " reads nicely";
        d.binary_label = Label::non_toxic;
        docs.push_back(d);
    }
    return docs;
}

ExperimentOptions light_options() {
    ExperimentOptions opt;
    opt.repetitions = 2;
    opt.master_seed = 11;
    opt.embed_dim = 8;
    opt.heights = {2, 3};
    opt.filters = 2;
    opt.batch_size = 16;
    opt.epochs = 1;
    return opt;
}

void require_same_report(const MetricsReport& a, const MetricsReport& b) {
    for (std::size_t m = 0; m < toxcls::kMetricNames.size(); ++m) {
        const auto va = toxcls::metric_value(a, m);
        const auto vb = toxcls::metric_value(b, m);
        INFO(toxcls::kMetricNames[m]);
        REQUIRE(va.has_value() == vb.has_value());
        if (va) REQUIRE(*va == *vb); // bit-for-bit
    }
}

} // namespace

TEST_CASE("confusion counts land in the right cells") {
    const ConfusionMatrix cm =
        toxcls::confusion({1, 1, 0, 0, 1, 0}, {1, 0, 1, 0, 1, 0});
    REQUIRE(cm.tp == 2);
    REQUIRE(cm.fp == 1);
    REQUIRE(cm.fn == 1);
    REQUIRE(cm.tn == 2);
    REQUIRE(cm.total() == 6);

    REQUIRE_THROWS_AS(toxcls::confusion({}, {}), toxcls::ArgumentError);
    REQUIRE_THROWS_AS(toxcls::confusion({1}, {1, 0}), toxcls::ArgumentError);
    REQUIRE_THROWS_AS(toxcls::confusion({2}, {1}), toxcls::ArgumentError);
}

TEST_CASE("metrics match hand-computed values for a known confusion matrix") {
    ConfusionMatrix cm;
    cm.tp = 45;
    cm.fp = 5;
    cm.fn = 10;
    cm.tn = 40;
    const MetricsReport r = toxcls::metrics(cm);
    REQUIRE(std::abs(*r.accuracy - 0.8500) < 5e-5);
    REQUIRE(std::abs(*r.precision - 0.9000) < 5e-5);
    REQUIRE(std::abs(*r.recall - 0.8182) < 5e-5);
    REQUIRE(std::abs(*r.f1 - 0.8571) < 5e-5);
    REQUIRE(std::abs(*r.specificity - 0.8889) < 5e-5);
    REQUIRE(std::abs(*r.fdr - 0.1000) < 5e-5);
}

TEST_CASE("zero denominators leave metrics undefined instead of dividing") {
    ConfusionMatrix cm;
    cm.tn = 10; // nothing predicted or labeled positive
    const MetricsReport r = toxcls::metrics(cm);
    REQUIRE(r.accuracy);
    REQUIRE(*r.accuracy == 1.0);
    REQUIRE_FALSE(r.precision);
    REQUIRE_FALSE(r.recall);
    REQUIRE_FALSE(r.f1);
    REQUIRE_FALSE(r.fdr);
    REQUIRE(r.specificity);

    ConfusionMatrix empty;
    REQUIRE_THROWS_AS(toxcls::metrics(empty), toxcls::ArgumentError);
}

TEST_CASE("metric identities hold over random confusion matrices") {
    toxcls::SeededRng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        ConfusionMatrix cm;
        cm.tp = static_cast<long>(rng.next_below(20));
        cm.fp = static_cast<long>(rng.next_below(20));
        cm.fn = static_cast<long>(rng.next_below(20));
        cm.tn = static_cast<long>(rng.next_below(20));
        if (cm.total() == 0) continue;
        const MetricsReport r = toxcls::metrics(cm);
        if (r.precision) {
            REQUIRE(r.fdr);
            REQUIRE(std::abs(*r.precision + *r.fdr - 1.0) < 1e-12);
        }
        for (std::size_t m = 0; m < 6; ++m)
            if (const auto v = toxcls::metric_value(r, m)) {
                REQUIRE(*v >= 0.0);
                REQUIRE(*v <= 1.0);
            }
        if (r.precision && r.recall && *r.precision + *r.recall > 0.0) {
            REQUIRE(r.f1);
            REQUIRE(std::abs(*r.f1 - 2.0 * *r.precision * *r.recall /
                                         (*r.precision + *r.recall)) < 1e-12);
        }
    }
}

TEST_CASE("summarize computes mean and sample standard deviation") {
    const auto s = toxcls::summarize({0.90, 0.91, 0.92});
    REQUIRE(s.count == 3);
    REQUIRE(std::abs(*s.mean - 0.91) < 1e-12);
    REQUIRE(std::abs(*s.stddev - 0.01) < 1e-12);

    const auto single = toxcls::summarize({0.5});
    REQUIRE(single.count == 1);
    REQUIRE(*single.mean == 0.5);
    REQUIRE_FALSE(single.stddev);

    const auto none = toxcls::summarize({});
    REQUIRE(none.count == 0);
    REQUIRE_FALSE(none.mean);
}

TEST_CASE("per-metric summaries skip undefined repetitions") {
    MetricsReport with;
    with.accuracy = 0.8;
    with.precision = 0.9;
    MetricsReport without;
    without.accuracy = 0.6; // precision undefined this repetition
    const auto sums = toxcls::summarize_repetitions({with, without});
    REQUIRE(sums[0].count == 2);
    REQUIRE(std::abs(*sums[0].mean - 0.7) < 1e-12);
    REQUIRE(sums[1].count == 1);
    REQUIRE(*sums[1].mean == 0.9);
}

TEST_CASE("bow feature pipeline: raw counts keep the tf-idf term set") {
    const std::vector<std::vector<std::string>> tokens = {
        {"aaa", "bbb"}, {"aaa", "ccc"}, {"aaa", "bbb", "ddd"}};
    const auto weighted =
        toxcls::build_bow_features(tokens, toxcls::StopwordList::none(), 0.99, false);
    const auto counts =
        toxcls::build_bow_features(tokens, toxcls::StopwordList::none(), 0.99, true);
    REQUIRE(weighted.pipeline.terms == counts.pipeline.terms);
    for (const double v : counts.pipeline.idf) REQUIRE(v == 1.0);
    // raw counts: row 2 has one bbb and one ddd and one aaa
    REQUIRE(counts.train(2, 0) == 1.0);

    const auto projected = toxcls::bow_transform(counts.pipeline, {{"bbb", "bbb", "novel"}});
    REQUIRE(projected.rows() == 1);
    REQUIRE(projected(0, 1) == 2.0);
}

TEST_CASE("run_experiments produces one report per repetition, deterministically") {
    const auto docs = synthetic_corpus();
    ExperimentOptions opt = light_options();
    const auto a = toxcls::run_experiments(Method::nb, docs, opt);
    REQUIRE(a.method == "nb");
    REQUIRE(a.repetitions.size() == 2);

    const auto b = toxcls::run_experiments(Method::nb, docs, opt);
    for (std::size_t r = 0; r < a.repetitions.size(); ++r)
        require_same_report(a.repetitions[r], b.repetitions[r]);
    for (std::size_t m = 0; m < 6; ++m) {
        REQUIRE(a.summary[m].count == b.summary[m].count);
        if (a.summary[m].mean) REQUIRE(*a.summary[m].mean == *b.summary[m].mean);
    }

    ExperimentOptions reseeded = opt;
    reseeded.master_seed = 12;
    const auto c = toxcls::run_experiments(Method::knn, docs, reseeded);
    REQUIRE(c.repetitions.size() == 2);

    REQUIRE_THROWS_AS(
        toxcls::run_experiments(Method::nb, docs, [] {
            ExperimentOptions bad;
            bad.repetitions = 0;
            return bad;
        }()),
        toxcls::ArgumentError);
}

TEST_CASE("repetition errors carry the method name and 1-based index") {
    const auto docs = synthetic_corpus();
    ExperimentOptions opt = light_options(); // no pretrained vectors configured
    try {
        toxcls::run_experiments(Method::cnn_fix, docs, opt);
        FAIL("expected an error");
    } catch (const toxcls::Error& e) {
        REQUIRE(std::string(e.what()).rfind("cnn_fix repetition 1:", 0) == 0);
    }
}

TEST_CASE("a unique token seen only in a test document changes nothing") {
    const auto docs = synthetic_corpus();
    ExperimentOptions opt = light_options();
    opt.repetitions = 1;

    // Reproduce the fold of repetition 0 to find a document that lands in the
    // test side; fold membership depends only on ids, labels and seeds.
    const std::uint64_t data_root = toxcls::derive_seed(opt.master_seed, toxcls::fnv1a64("data"));
    const std::uint64_t data_seed = toxcls::derive_seed(data_root, 0);
    const auto balanced = toxcls::balanced_subsample(
        docs, toxcls::derive_seed(data_seed, toxcls::fnv1a64("balance")));
    const auto fold = toxcls::split(balanced, opt.train_fraction,
                                    toxcls::derive_seed(data_seed, toxcls::fnv1a64("split")));
    REQUIRE_FALSE(fold.test.empty());
    const std::string target_id = fold.test.front().id;

    auto poisoned = docs;
    bool patched = false;
    for (auto& d : poisoned)
        if (d.id == target_id) {
            d.text += " zzzuniquetokenzzz";
            patched = true;
        }
    REQUIRE(patched);

    for (const Method m : {Method::nb, Method::knn, Method::cnn_rand}) {
        const auto clean = toxcls::run_experiments(m, docs, opt);
        const auto dirty = toxcls::run_experiments(m, poisoned, opt);
        INFO(toxcls::method_name(m));
        require_same_report(clean.repetitions[0], dirty.repetitions[0]);
    }
}

TEST_CASE("published reference table is available for comparison output") {
    const auto& rows = toxcls::reference_results();
    REQUIRE(rows.size() == 6);
    bool found = false;
    for (const auto& row : rows)
        if (std::string(row.method) == "cnn_fix") {
            found = true;
            REQUIRE(row.accuracy_mean == 0.912);
        }
    REQUIRE(found);
}
