#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ccbench.h"

namespace {

const std::string kFixtures = std::string(CCB_SOURCE_DIR) + "/data/fixtures";
const std::string kFullCorpus = kFixtures + "/synthetic_full.jsonl";

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("version and error strings are always available") {
    CHECK(ccb_version() != nullptr);
    CHECK(ccb_last_error() != nullptr);
}

TEST_CASE("corpus handles load, split, save and free") {
    ccb_corpus* corpus = nullptr;
    char* issues = nullptr;
    REQUIRE(ccb_corpus_load_jsonl(kFullCorpus.c_str(), &issues, &corpus) == CCB_OK);
    CHECK(issues[0] == '\0');
    ccb_string_free(issues);
    CHECK(ccb_corpus_size(corpus) == 300);

    ccb_corpus *train = nullptr, *test = nullptr;
    REQUIRE(ccb_corpus_split(corpus, 0.8, 7, &train, &test) == CCB_OK);
    CHECK(ccb_corpus_size(train) + ccb_corpus_size(test) == 300);

    const std::string out = temp_path("capi_train.jsonl");
    CHECK(ccb_corpus_save_jsonl(train, out.c_str()) == CCB_OK);
    const std::string summary = temp_path("capi_summary.csv");
    CHECK(ccb_corpus_summary_csv(corpus, summary.c_str()) == CCB_OK);

    ccb_corpus_free(train);
    ccb_corpus_free(test);
    ccb_corpus_free(corpus);
}

TEST_CASE("load failures set a status and a message") {
    ccb_corpus* corpus = nullptr;
    const ccb_status rc = ccb_corpus_load_jsonl("/no/such/file.jsonl", nullptr, &corpus);
    CHECK(rc == CCB_ERR_IO);
    CHECK(std::strlen(ccb_last_error()) > 0);
    CHECK(ccb_corpus_load_jsonl(nullptr, nullptr, &corpus) == CCB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("row issues are reported through the issues string") {
    const std::string path = temp_path("capi_dirty.jsonl");
    std::ofstream(path) << R"({"id":"ok","language":"java","text":"x","labels":["summary"]})" << "\n"
                        << R"({"id":"bad","language":"java","text":"y","labels":[]})" << "\n";
    ccb_corpus* corpus = nullptr;
    char* issues = nullptr;
    REQUIRE(ccb_corpus_load_jsonl(path.c_str(), &issues, &corpus) == CCB_OK);
    CHECK(ccb_corpus_size(corpus) == 1);
    CHECK(std::string(issues).find("MissingLabel") != std::string::npos);
    ccb_string_free(issues);
    ccb_corpus_free(corpus);
}

TEST_CASE("csv loading through the column map json") {
    const std::string path = temp_path("capi.csv");
    std::ofstream(path) << "id,text,summary,usage\nr1,hello there,1,0\nr2,use me,0,1\n";
    ccb_corpus* corpus = nullptr;
    const char* colmap =
        R"({"id_column":"id","text_column":"text","label_columns":["summary","usage"],"language":"java"})";
    REQUIRE(ccb_corpus_load_csv(path.c_str(), colmap, nullptr, &corpus) == CCB_OK);
    CHECK(ccb_corpus_size(corpus) == 2);
    ccb_corpus_free(corpus);
}

TEST_CASE("pair generation writes the tsv and returns the count") {
    ccb_corpus* corpus = nullptr;
    REQUIRE(ccb_corpus_load_jsonl((kFixtures + "/synthetic_java.jsonl").c_str(), nullptr,
                                  &corpus) == CCB_OK);
    const std::string out = temp_path("capi_pairs.tsv");
    uint64_t count = 0;
    REQUIRE(ccb_pairs_generate(corpus, 20, 1, out.c_str(), &count) == CCB_OK);
    CHECK(count == 20u * 100u * 2u);
    std::ifstream in(out);
    std::string line;
    uint64_t lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == count);
    ccb_corpus_free(corpus);
}

TEST_CASE("submission score through the C surface") {
    ccb_score_breakdown b{};
    REQUIRE(ccb_submission_score(0.6394, 0.9422, 999.0271, &b) == CCB_OK);
    CHECK(std::abs(b.total - 0.7060) <= 5e-4);
    CHECK(std::abs(b.f1_term + b.runtime_term + b.gflops_term - b.total) < 1e-12);
    CHECK(ccb_submission_score(0.0, 0.0, 0.0, nullptr) == CCB_ERR_INVALID_ARGUMENT);
}

TEST_CASE("breakdown export parses the inputs csv") {
    const std::string in_path = temp_path("capi_breakdown_in.csv");
    std::ofstream(in_path) << "name,avg_f1,avg_runtime_s,avg_gflops\n"
                           << "one,0.6394,0.9422,999.0271\n"
                           << "two,0.6921,3.5339,18489.3073\n";
    const std::string out_path = temp_path("capi_breakdown_out.csv");
    REQUIRE(ccb_breakdown_export(in_path.c_str(), out_path.c_str()) == CCB_OK);
    std::ifstream out(out_path);
    std::string line;
    int lines = 0;
    while (std::getline(out, line)) ++lines;
    CHECK(lines == 3); // header + 2 rows

    std::ofstream(in_path) << "wrong,header\n";
    CHECK(ccb_breakdown_export(in_path.c_str(), out_path.c_str()) == CCB_ERR_PARSE);
}

TEST_CASE("experiments run end to end through the C surface") {
    const std::string run_root = temp_path("capi-runs");
    std::filesystem::remove_all(run_root);
    const std::string corpus_override = "corpus.path=" + kFullCorpus;
    const std::string root_override = "run.root=" + run_root;
    std::vector<const char*> overrides = {
        corpus_override.c_str(), root_override.c_str(),
        "featurizer.kind=hashed", "featurizer.dim=256", "featurizer.seed=1",
        "head.kind=logistic",     "head.c=10",          "head.max_iters=1000",
        "measurement.mode=fixed", "run.seed=42",
    };

    char* run_dir = nullptr;
    REQUIRE(ccb_evaluate(nullptr, overrides.data(), overrides.size(), nullptr, &run_dir) == CCB_OK);
    REQUIRE(run_dir != nullptr);
    CHECK(std::filesystem::exists(std::string(run_dir) + "/score.csv"));

    // train to an explicit model path, then evaluate that model
    const std::string model_path = temp_path("capi_model.json");
    REQUIRE(ccb_train(nullptr, overrides.data(), overrides.size(), model_path.c_str()) == CCB_OK);
    char* eval_dir = nullptr;
    REQUIRE(ccb_evaluate(nullptr, overrides.data(), overrides.size(), model_path.c_str(),
                         &eval_dir) == CCB_OK);
    CHECK(std::filesystem::exists(std::string(eval_dir) + "/metrics.csv"));
    ccb_string_free(run_dir);
    ccb_string_free(eval_dir);
}

TEST_CASE("grid runs through the C surface") {
    const std::string run_root = temp_path("capi-grid-runs");
    std::filesystem::remove_all(run_root);
    const std::string corpus_override = "corpus.path=" + kFullCorpus;
    const std::string root_override = "run.root=" + run_root;
    std::vector<const char*> overrides = {
        corpus_override.c_str(), root_override.c_str(), "featurizer.seed=1",
        "grid.head=rf",          "grid.max_depth=2,3", "head.n_trees=10",
        "measurement.mode=fixed",
    };
    char* leaderboard = nullptr;
    REQUIRE(ccb_grid_run(nullptr, overrides.data(), overrides.size(), &leaderboard) == CCB_OK);
    REQUIRE(leaderboard != nullptr);
    std::ifstream in(leaderboard);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 3);
    ccb_string_free(leaderboard);
}

TEST_CASE("fixture writer is exposed") {
    const std::string dir = temp_path("capi-fixture");
    std::filesystem::remove_all(dir);
    REQUIRE(ccb_write_fixture(dir.c_str(), 2025) == CCB_OK);
    CHECK(std::filesystem::exists(dir + "/synthetic_full.jsonl"));
}
