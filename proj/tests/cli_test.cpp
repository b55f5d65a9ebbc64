#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "toxcls/corpus.hpp"
#include "toxcls/csv.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = TOXCLS_CLI_PATH;
const std::string kCorpus = std::string(TOXCLS_DATA_DIR) + "/micro_corpus.csv";
const std::string kVectors = std::string(TOXCLS_DATA_DIR) + "/micro_vectors.txt";

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir =
        fs::temp_directory_path() / ("toxcls_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> nonempty_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(line);
    return out;
}

// Runs the CLI with output captured into <dir>/cli_log.txt and asserts on the
// exit status, echoing the log when the assertion fails.
void require_cli(const std::string& args, int expected, const fs::path& dir) {
    const fs::path log = dir / "cli_log.txt";
    const std::string cmd = kCli + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    INFO("command: " << cmd);
    INFO("output: " << read_file(log));
    REQUIRE(code == expected);
}

std::size_t corpus_size() { return toxcls::parse_corpus(read_file(kCorpus)).size(); }

} // namespace

TEST_CASE("usage problems exit with status 2 before touching the output directory") {
    const fs::path dir = fresh_dir("usage");
    const std::string out = " --out " + (dir / "never").string();

    require_cli("train --data " + kCorpus + " --method cnn_fix" + out, 2, dir);
    require_cli("train --data " + kCorpus + " --method cnn_rand --embeddings " + kVectors + out, 2,
                dir);
    require_cli("train --data " + kCorpus + " --method forest" + out, 2, dir);
    require_cli("train --data " + (dir / "missing.csv").string() + " --method nb" + out, 2, dir);
    require_cli("benchmark --data " + kCorpus + " --methods nb --embeddings " + kVectors + out, 2,
                dir);
    require_cli("benchmark --data " + kCorpus + " --methods knn --knn-k 4" + out, 2, dir);
    require_cli("benchmark --data " + kCorpus + " --methods nb --reps 0" + out, 2, dir);
    require_cli("viz pca" + out, 2, dir);
    require_cli("frobnicate", 2, dir);
    REQUIRE_FALSE(fs::exists(dir / "never"));

    require_cli("--version", 0, dir);
    fs::remove_all(dir);
}

TEST_CASE("benchmark writes summary, runs, manifest, and box plots") {
    const fs::path dir = fresh_dir("bench");
    require_cli("benchmark --data " + kCorpus + " --methods nb --reps 2 --seed 7 --out " +
                    dir.string(),
                0, dir);

    const auto summary = nonempty_lines(read_file(dir / "summary.csv"));
    REQUIRE(summary.size() == 2);
    REQUIRE(summary[0] ==
            "method,accuracy_mean,accuracy_std,precision_mean,precision_std,recall_mean,"
            "recall_std,f1_mean,f1_std,specificity_mean,specificity_std,fdr_mean,fdr_std");
    REQUIRE(summary[1].rfind("nb,", 0) == 0);

    const auto runs = nonempty_lines(read_file(dir / "runs.csv"));
    REQUIRE(runs.size() == 1 + 2 * 6);
    REQUIRE(runs[0] == "method,repetition,metric,value");
    REQUIRE(runs[1].rfind("nb,1,accuracy,", 0) == 0);

    const nlohmann::json manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
    REQUIRE(manifest.at("settings").at("subcommand") == "benchmark");
    REQUIRE(manifest.at("settings").at("reps") == 2);
    REQUIRE(manifest.at("settings").at("seed") == 7);
    REQUIRE(manifest.at("settings").at("methods").get<std::vector<std::string>>() ==
            std::vector<std::string>{"nb"});

    REQUIRE(fs::exists(dir / "box_accuracy.svg"));
    REQUIRE(fs::exists(dir / "box_fdr.svg"));
    fs::remove_all(dir);
}

TEST_CASE("rerun replays a recorded benchmark byte for byte") {
    const fs::path first = fresh_dir("rerun_first");
    const fs::path replay = fresh_dir("rerun_replay");

    require_cli("benchmark --data " + kCorpus + " --methods nb,knn --reps 2 --seed 7 --out " +
                    first.string(),
                0, first);
    require_cli("rerun --manifest " + (first / "manifest.json").string() + " --out " +
                    replay.string(),
                0, replay);

    REQUIRE(nonempty_lines(read_file(first / "summary.csv")).size() == 3);
    REQUIRE(read_file(first / "summary.csv") == read_file(replay / "summary.csv"));
    REQUIRE(read_file(first / "runs.csv") == read_file(replay / "runs.csv"));
    fs::remove_all(first);
    fs::remove_all(replay);
}

TEST_CASE("train and predict round trip through the model file") {
    const fs::path dir = fresh_dir("train_predict");
    const fs::path model_dir = dir / "nb";
    const fs::path pred_dir = dir / "pred";

    require_cli("train --data " + kCorpus + " --method nb --out " + model_dir.string(), 0, dir);
    REQUIRE(fs::exists(model_dir / "model.json"));
    REQUIRE(fs::exists(model_dir / "manifest.json"));
    const std::string trace = read_file(model_dir / "training_trace.csv");
    REQUIRE(trace.rfind("quantity,step,value\n", 0) == 0);
    REQUIRE(trace.find("train_accuracy") != std::string::npos);

    require_cli("predict --model " + (model_dir / "model.json").string() + " --input " + kCorpus +
                    " --out " + pred_dir.string(),
                0, dir);
    const auto rows = nonempty_lines(read_file(pred_dir / "predictions.csv"));
    REQUIRE(rows.size() == corpus_size() + 1);
    REQUIRE(rows[0] == "id,label");
    REQUIRE(rows[1].rfind("5c0350174604d9a9,", 0) == 0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const std::string tail = rows[i].substr(rows[i].find(',') + 1);
        REQUIRE((tail == "0" || tail == "1"));
    }
    fs::remove_all(dir);
}

TEST_CASE("cnn training saves a binary container predict can reuse") {
    const fs::path dir = fresh_dir("cnn_cli");
    const std::string knobs = " --heights 2,3 --filters 2 --batch 32 --epochs 1";

    const fs::path rand_dir = dir / "rand";
    require_cli("train --data " + kCorpus + " --method cnn_rand --embed-dim 8" + knobs +
                    " --out " + rand_dir.string(),
                0, dir);
    REQUIRE(fs::exists(rand_dir / "model.bin"));
    const std::string trace = read_file(rand_dir / "training_trace.csv");
    REQUIRE(trace.find("epoch_loss,1,") != std::string::npos);

    const fs::path pred_dir = dir / "pred";
    require_cli("predict --model " + (rand_dir / "model.bin").string() + " --input " + kCorpus +
                    " --out " + pred_dir.string(),
                0, dir);
    REQUIRE(nonempty_lines(read_file(pred_dir / "predictions.csv")).size() == corpus_size() + 1);

    const fs::path fix_dir = dir / "fix";
    require_cli("train --data " + kCorpus + " --method cnn_fix --embeddings " + kVectors + knobs +
                    " --out " + fix_dir.string(),
                0, dir);
    REQUIRE(fs::exists(fix_dir / "model.bin"));

    // The vector file is 50-dimensional; an explicit conflicting width is a
    // runtime error, not a usage error.
    require_cli("train --data " + kCorpus + " --method cnn_fix --embeddings " + kVectors +
                    " --embed-dim 32" + knobs + " --out " + (dir / "bad").string(),
                1, dir);
    fs::remove_all(dir);
}

TEST_CASE("prepare balances and splits the corpus") {
    const fs::path dir = fresh_dir("prepare");
    require_cli("prepare --data " + kCorpus + " --seed 5 --train-fraction 0.8 --out " +
                    dir.string(),
                0, dir);

    const auto train = toxcls::parse_corpus(read_file(dir / "train.csv"));
    const auto test = toxcls::parse_corpus(read_file(dir / "test.csv"));

    const auto docs = toxcls::parse_corpus(read_file(kCorpus));
    std::size_t toxic_total = 0;
    for (const auto& d : docs) toxic_total += d.binary_label == toxcls::Label::toxic ? 1 : 0;
    const std::size_t balanced = 2 * std::min(toxic_total, docs.size() - toxic_total);

    REQUIRE(train.size() + test.size() == balanced);
    REQUIRE(train.size() ==
            static_cast<std::size_t>(std::floor(0.8 * static_cast<double>(balanced))));

    std::size_t toxic_kept = 0;
    std::set<std::string> ids;
    for (const auto& part : {train, test})
        for (const auto& d : part) {
            toxic_kept += d.binary_label == toxcls::Label::toxic ? 1 : 0;
            ids.insert(d.id);
        }
    REQUIRE(toxic_kept == balanced / 2);
    REQUIRE(ids.size() == balanced);
    fs::remove_all(dir);
}

TEST_CASE("viz subcommands emit scatter data") {
    const fs::path dir = fresh_dir("viz");
    const std::size_t docs = corpus_size();

    const fs::path pca_dir = dir / "pca";
    require_cli("viz pca --data " + kCorpus + " --out " + pca_dir.string(), 0, dir);
    const auto pca_rows = nonempty_lines(read_file(pca_dir / "pca.csv"));
    REQUIRE(pca_rows.size() == docs + 1);
    REQUIRE(pca_rows[0] == "x,y,label");
    REQUIRE(read_file(pca_dir / "pca.svg").find("<svg") != std::string::npos);

    const fs::path tsne_dir = dir / "tsne";
    require_cli("viz tsne --data " + kCorpus + " --perplexity 5 --iters 60 --seed 3 --out " +
                    tsne_dir.string(),
                0, dir);
    REQUIRE(nonempty_lines(read_file(tsne_dir / "tsne.csv")).size() == docs + 1);
    const auto kl_rows = nonempty_lines(read_file(tsne_dir / "tsne_kl.csv"));
    REQUIRE(kl_rows.size() == 61);
    REQUIRE(kl_rows[0] == "iteration,kl");
    REQUIRE(fs::exists(tsne_dir / "tsne.svg"));
    fs::remove_all(dir);
}

TEST_CASE("runtime failures exit with status 1") {
    const fs::path dir = fresh_dir("runtime");
    const fs::path junk = dir / "junk.json";
    std::ofstream(junk) << "this is not a model\n";

    require_cli("predict --model " + junk.string() + " --input " + kCorpus + " --out " +
                    (dir / "x").string(),
                1, dir);
    require_cli("predict --model " + junk.string() + " --input " + kCorpus +
                    " --text-column bogus --out " + (dir / "x").string(),
                1, dir);
    fs::remove_all(dir);
}
