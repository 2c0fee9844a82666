#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stylelab/commands.hpp"

using namespace stylelab;
namespace fs = std::filesystem;

namespace {

fs::path work_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / "stylelab_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path.string();
}

std::string tiny_train_config(const fs::path& dir, const std::string& regime,
                              const std::string& extra = "") {
    std::ostringstream os;
    os << "[experiment]\nseed = 9\nregime = " << regime << "\nout_dir = " << (dir / "run").string()
       << "\n"
       << "[synthetic]\ncount = 400\nseed = 2\n"
       << "[model]\nemb_dim = 16\nhidden_dim = 16\nmax_len = 10\n"
       << "[train]\nepochs = 3\nbatch_size = 40\nlr = 0.005\nbeta1 = 0.9\ndev_eval_cap = 40\n"
       << extra;
    return write_file(dir / "config.ini", os.str());
}

}  // namespace

TEST_CASE("cmd_train runs a DAE experiment end to end") {
    auto dir = work_dir("train_dae");
    std::string cfg = tiny_train_config(dir, "dae");
    CHECK(cmd_train(cfg) == kOk);
    CHECK(fs::exists(dir / "run" / "model.bin"));
    CHECK(fs::exists(dir / "run" / "train_log.csv"));
    CHECK(fs::exists(dir / "run" / "train.tsv"));

    // reconstruction improves over the run: compare first and last logged loss
    std::ifstream log(dir / "run" / "train_log.csv");
    std::string line;
    std::getline(log, line);  // header
    std::vector<std::vector<std::string>> rows;
    while (std::getline(log, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    REQUIRE(rows.size() >= 3);
    double first_loss = std::stod(rows[1][3]);  // loss_ae of the first interval
    double last_loss = std::stod(rows.back()[3]);
    CHECK(last_loss < first_loss);
}

TEST_CASE("cmd_train exits 2 on config errors") {
    auto dir = work_dir("train_bad");
    // missing seed
    std::string cfg = write_file(dir / "bad.ini",
                                 "[experiment]\nregime = dae\nout_dir = " + (dir / "o").string() +
                                     "\n");
    CHECK(cmd_train(cfg) == kUsageError);
    // MRT regime without a classifier path
    std::string cfg2 = write_file(dir / "mrt.ini",
                                  "[experiment]\nseed = 1\nregime = dae+bt+mrt\nout_dir = " +
                                      (dir / "o2").string() + "\n[synthetic]\ncount = 200\n");
    CHECK(cmd_train(cfg2) == kUsageError);
    CHECK(cmd_train((dir / "missing.ini").string()) == kUsageError);
}

TEST_CASE("cmd_train in the MRT regime trains and saves the classifier at the given path") {
    auto dir = work_dir("train_mrt");
    std::string clf_path = (dir / "clf.bin").string();
    std::string cfg = tiny_train_config(
        dir, "dae+bt+mrt", "[mrt]\nn_samples = 2\nalpha = 0.05\nclassifier = " + clf_path + "\n");
    CHECK(cmd_train(cfg) == kOk);
    CHECK(fs::exists(clf_path));
}

TEST_CASE("cmd_evaluate scores identity predictions at the paper anchors") {
    auto dir = work_dir("evaluate");
    Dataset ds = generate_synthetic(default_sentiment_spec(1200, 4));
    write_tsv((dir / "corpus.tsv").string(), ds.train, ds.schema);

    std::ofstream in(dir / "in.txt"), pred(dir / "pred.txt"), styles(dir / "styles.txt");
    for (size_t i = 0; i < 50; ++i) {
        in << ds.dev[i].text << '\n';
        pred << ds.dev[i].text << '\n';
        styles << format_style(ds.dev[i].style, ds.schema) << '\n';
    }
    in.close();
    pred.close();
    styles.close();

    setenv("STYLELAB_CACHE_DIR", (dir / "cache").string().c_str(), 1);
    EvaluateArgs args;
    args.inputs_path = (dir / "in.txt").string();
    args.predictions_path = (dir / "pred.txt").string();
    args.styles_path = (dir / "styles.txt").string();
    args.corpus_path = (dir / "corpus.tsv").string();
    args.out_dir = (dir / "report").string();
    CHECK(cmd_evaluate(args) == kOk);

    std::ifstream csv(dir / "report" / "report.csv");
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    CHECK(header == report_csv_header());
    std::vector<std::string> cells;
    std::stringstream ss(row);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() >= 6);
    CHECK(std::stod(cells[1]) == 0.0);    // EMD
    CHECK(cells[2].empty());              // no BLEU without references
    CHECK(std::stod(cells[3]) == 100.0);  // sBLEU
    CHECK(std::stod(cells[4]) == 1.0);    // WMS
    // artifact cache was populated and a second evaluation reuses it
    CHECK(fs::exists(dir / "cache"));
    CHECK(cmd_evaluate(args) == kOk);

    // misaligned files exit 2
    std::ofstream(dir / "short.txt") << "only one line\n";
    EvaluateArgs bad = args;
    bad.predictions_path = (dir / "short.txt").string();
    CHECK(cmd_evaluate(bad) == kUsageError);
}

TEST_CASE("cmd_evaluate checkpoint-series mode emits monotone tradeoff and mse curves") {
    auto dir = work_dir("evaluate_series");
    std::string cfg = tiny_train_config(dir, "dae+bt");
    REQUIRE(cmd_train(cfg) == kOk);

    Dataset ds = generate_synthetic(default_sentiment_spec(400, 2));
    write_tsv((dir / "corpus.tsv").string(), ds.train, ds.schema);
    std::ofstream in(dir / "in.txt"), pred(dir / "pred.txt"), styles(dir / "styles.txt");
    Rng rng(77);
    for (size_t i = 0; i < 20; ++i) {
        in << ds.dev[i].text << '\n';
        pred << ds.dev[i].text << '\n';
        styles << format_style(perturb_style(ds.dev[i].style, ds.schema, rng), ds.schema) << '\n';
    }
    in.close();
    pred.close();
    styles.close();

    setenv("STYLELAB_CACHE_DIR", (dir / "cache").string().c_str(), 1);
    EvaluateArgs args;
    args.inputs_path = (dir / "in.txt").string();
    args.predictions_path = (dir / "pred.txt").string();
    args.styles_path = (dir / "styles.txt").string();
    args.corpus_path = (dir / "corpus.tsv").string();
    args.ckpt_dir = (dir / "run").string();
    args.out_dir = (dir / "report").string();
    CHECK(cmd_evaluate(args) == kOk);

    for (const char* name : {"tradeoff.csv", "content_mse.csv"}) {
        std::ifstream csv(dir / "report" / name);
        REQUIRE(csv.good());
        std::string line;
        std::getline(csv, line);  // header
        int64_t prev = -1;
        int rows = 0;
        while (std::getline(csv, line)) {
            int64_t step = std::stoll(line.substr(0, line.find(',')));
            CHECK(step > prev);
            prev = step;
            ++rows;
        }
        CHECK(rows >= 3);  // one per checkpoint
    }
}

TEST_CASE("cmd_synth materializes the synthetic corpus") {
    auto dir = work_dir("synth");
    std::string cfg = write_file(dir / "config.ini",
                                 "[experiment]\nseed = 1\nregime = dae\nout_dir = " +
                                     (dir / "unused").string() +
                                     "\n[synthetic]\ncount = 300\nseed = 6\n");
    CHECK(cmd_synth(cfg, (dir / "data").string()) == kOk);
    CHECK(fs::exists(dir / "data" / "train.tsv"));
    CHECK(fs::exists(dir / "data" / "dev.tsv"));
    CHECK(fs::exists(dir / "data" / "test.tsv"));
    AttributeSchema schema = infer_schema_from_tsv((dir / "data" / "train.tsv").string());
    CHECK(schema.num_attributes() == 1);
}
