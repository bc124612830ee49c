// Command-line front end. Links only the C API (ccbench.h); all pipeline
// logic lives behind the shared library boundary.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccbench.h"

namespace {

int fail_with(ccb_status status, const std::string& context) {
    std::cerr << "error: " << context << ": " << ccb_last_error() << " (status " << status
              << ")\n";
    return 1;
}

std::vector<const char*> to_argv(const std::vector<std::string>& overrides) {
    std::vector<const char*> out;
    out.reserve(overrides.size());
    for (const auto& s : overrides) out.push_back(s.c_str());
    return out;
}

void print_file(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) std::cout << line << '\n';
}

std::string read_maybe_file(const std::string& value) {
    // a column map can arrive inline ({"id_column": ...}) or as a file path
    if (!value.empty() && value[0] == '{') return value;
    std::ifstream in(value);
    if (!in) return value;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ccbench — efficiency-scored multi-label code comment classification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ccb_version());

    // ---- ingest ----
    auto* ingest = app.add_subcommand("ingest", "validate a corpus and write canonical JSONL");
    std::string ingest_in, ingest_out, ingest_format = "jsonl", ingest_colmap, ingest_summary;
    ingest->add_option("--in", ingest_in, "input file")->required();
    ingest->add_option("--out", ingest_out, "canonical JSONL output")->required();
    ingest->add_option("--format", ingest_format, "jsonl or csv")
        ->check(CLI::IsMember({"jsonl", "csv"}));
    ingest->add_option("--colmap", ingest_colmap, "CSV column map (JSON text or file)");
    ingest->add_option("--summary", ingest_summary, "also write a per-label count CSV");

    // ---- split ----
    auto* split = app.add_subcommand("split", "stratified train/test split");
    std::string split_in, split_train, split_test;
    double split_ratio = 0.8;
    std::uint64_t split_seed = 42;
    split->add_option("--in", split_in, "corpus JSONL")->required();
    split->add_option("--ratio", split_ratio, "train fraction (default 0.8)");
    split->add_option("--seed", split_seed, "split seed");
    split->add_option("--train-out", split_train, "train JSONL")->required();
    split->add_option("--test-out", split_test, "test JSONL")->required();

    // ---- pairs ----
    auto* pairs = app.add_subcommand("pairs", "export contrastive sentence pairs as TSV");
    std::string pairs_in, pairs_out;
    std::uint32_t pairs_iterations = 20;
    std::uint64_t pairs_seed = 42;
    pairs->add_option("--in", pairs_in, "training corpus JSONL")->required();
    pairs->add_option("--iterations", pairs_iterations, "sampling iterations (default 20)");
    pairs->add_option("--seed", pairs_seed, "sampling seed");
    pairs->add_option("--out", pairs_out, "output TSV")->required();

    // shared config plumbing for train / evaluate / grid
    std::string config_path, model_path, model_out;
    std::vector<std::string> overrides;
    auto add_config_options = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config file");
        cmd->add_option("--set", overrides, "override, e.g. --set head.kind=forest")
            ->take_all();
    };

    auto* train = app.add_subcommand("train", "train per-language classifiers");
    add_config_options(train);
    train->add_option("--out", model_out, "model container path (default: run dir)");

    auto* evaluate = app.add_subcommand("evaluate", "run the evaluation pipeline");
    add_config_options(evaluate);
    evaluate->add_option("--model", model_path, "evaluate a saved model instead of retraining");

    auto* grid = app.add_subcommand("grid", "sweep the hyperparameter grid");
    add_config_options(grid);

    // ---- score ----
    auto* score = app.add_subcommand("score", "compute the submission score");
    double f1 = 0.0, runtime = 0.0, gflops = 0.0;
    bool score_verbose = false;
    score->add_option("--f1", f1, "average F1")->required();
    score->add_option("--runtime", runtime, "average runtime in seconds")->required();
    score->add_option("--gflops", gflops, "average GFLOPS")->required();
    score->add_flag("--verbose", score_verbose, "print the per-term breakdown");

    // ---- export-breakdown ----
    auto* breakdown = app.add_subcommand("export-breakdown",
                                         "per-term contribution CSV from scored configurations");
    std::string breakdown_in, breakdown_out;
    breakdown->add_option("--in", breakdown_in, "CSV: name,avg_f1,avg_runtime_s,avg_gflops")
        ->required();
    breakdown->add_option("--out", breakdown_out, "output CSV")->required();

    // ---- fixture ----
    auto* fixture = app.add_subcommand("fixture", "write the synthetic demo corpus");
    std::string fixture_dir = "data/fixtures";
    std::uint64_t fixture_seed = 2025;
    fixture->add_option("--dir", fixture_dir, "output directory");
    fixture->add_option("--seed", fixture_seed, "generator seed");

    CLI11_PARSE(app, argc, argv);

    if (*ingest) {
        ccb_corpus* corpus = nullptr;
        char* issues = nullptr;
        ccb_status rc;
        if (ingest_format == "csv") {
            if (ingest_colmap.empty()) {
                std::cerr << "error: --format csv requires --colmap\n";
                return 1;
            }
            rc = ccb_corpus_load_csv(ingest_in.c_str(), read_maybe_file(ingest_colmap).c_str(),
                                     &issues, &corpus);
        } else {
            rc = ccb_corpus_load_jsonl(ingest_in.c_str(), &issues, &corpus);
        }
        if (rc != CCB_OK) return fail_with(rc, "ingest " + ingest_in);
        bool dirty = issues && issues[0] != '\0';
        if (dirty) std::cerr << issues << '\n';
        ccb_string_free(issues);
        rc = ccb_corpus_save_jsonl(corpus, ingest_out.c_str());
        if (rc == CCB_OK && !ingest_summary.empty()) {
            rc = ccb_corpus_summary_csv(corpus, ingest_summary.c_str());
        }
        std::cout << ccb_corpus_size(corpus) << " sentences -> " << ingest_out << '\n';
        ccb_corpus_free(corpus);
        if (rc != CCB_OK) return fail_with(rc, "ingest " + ingest_out);
        return dirty ? 2 : 0;
    }

    if (*split) {
        ccb_corpus* corpus = nullptr;
        ccb_status rc = ccb_corpus_load_jsonl(split_in.c_str(), nullptr, &corpus);
        if (rc != CCB_OK) return fail_with(rc, "split " + split_in);
        ccb_corpus *train_set = nullptr, *test_set = nullptr;
        rc = ccb_corpus_split(corpus, split_ratio, split_seed, &train_set, &test_set);
        if (rc != CCB_OK) {
            ccb_corpus_free(corpus);
            return fail_with(rc, "split");
        }
        rc = ccb_corpus_save_jsonl(train_set, split_train.c_str());
        if (rc == CCB_OK) rc = ccb_corpus_save_jsonl(test_set, split_test.c_str());
        std::cout << ccb_corpus_size(train_set) << " train / " << ccb_corpus_size(test_set)
                  << " test\n";
        ccb_corpus_free(train_set);
        ccb_corpus_free(test_set);
        ccb_corpus_free(corpus);
        return rc == CCB_OK ? 0 : fail_with(rc, "split output");
    }

    if (*pairs) {
        ccb_corpus* corpus = nullptr;
        ccb_status rc = ccb_corpus_load_jsonl(pairs_in.c_str(), nullptr, &corpus);
        if (rc != CCB_OK) return fail_with(rc, "pairs " + pairs_in);
        uint64_t count = 0;
        rc = ccb_pairs_generate(corpus, pairs_iterations, pairs_seed, pairs_out.c_str(), &count);
        ccb_corpus_free(corpus);
        if (rc != CCB_OK) return fail_with(rc, "pairs");
        std::cout << count << " pairs -> " << pairs_out << '\n';
        return 0;
    }

    if (*train) {
        auto argv_overrides = to_argv(overrides);
        ccb_status rc = ccb_train(config_path.empty() ? nullptr : config_path.c_str(),
                                  argv_overrides.data(), argv_overrides.size(),
                                  model_out.empty() ? nullptr : model_out.c_str());
        if (rc != CCB_OK) return fail_with(rc, "train");
        std::cout << "trained" << (model_out.empty() ? "" : " -> " + model_out) << '\n';
        return 0;
    }

    if (*evaluate) {
        auto argv_overrides = to_argv(overrides);
        char* run_dir = nullptr;
        ccb_status rc = ccb_evaluate(config_path.empty() ? nullptr : config_path.c_str(),
                                     argv_overrides.data(), argv_overrides.size(),
                                     model_path.empty() ? nullptr : model_path.c_str(), &run_dir);
        if (rc != CCB_OK) return fail_with(rc, "evaluate");
        std::cout << "run dir: " << run_dir << '\n';
        print_file(std::string(run_dir) + "/score.csv");
        ccb_string_free(run_dir);
        return 0;
    }

    if (*grid) {
        auto argv_overrides = to_argv(overrides);
        char* leaderboard = nullptr;
        ccb_status rc = ccb_grid_run(config_path.empty() ? nullptr : config_path.c_str(),
                                     argv_overrides.data(), argv_overrides.size(), &leaderboard);
        if (rc != CCB_OK) return fail_with(rc, "grid");
        std::cout << "leaderboard: " << leaderboard << '\n';
        print_file(leaderboard);
        ccb_string_free(leaderboard);
        return 0;
    }

    if (*score) {
        ccb_score_breakdown b{};
        ccb_status rc = ccb_submission_score(f1, runtime, gflops, &b);
        if (rc != CCB_OK) return fail_with(rc, "score");
        if (score_verbose) {
            std::printf("f1_term      %.4f\n", b.f1_term);
            std::printf("runtime_term %.4f\n", b.runtime_term);
            std::printf("gflops_term  %.4f\n", b.gflops_term);
        }
        std::printf("%.4f\n", b.total);
        return 0;
    }

    if (*breakdown) {
        ccb_status rc = ccb_breakdown_export(breakdown_in.c_str(), breakdown_out.c_str());
        if (rc != CCB_OK) return fail_with(rc, "export-breakdown");
        std::cout << "wrote " << breakdown_out << '\n';
        return 0;
    }

    if (*fixture) {
        ccb_status rc = ccb_write_fixture(fixture_dir.c_str(), fixture_seed);
        if (rc != CCB_OK) return fail_with(rc, "fixture");
        std::cout << "fixture -> " << fixture_dir << '\n';
        return 0;
    }

    return 0;
}
