#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "ccb/error.hpp"
#include "ccb/featurize.hpp"
#include "ccb/harness.hpp"
#include "ccb/textio.hpp"

using namespace ccb;
using namespace ccb::harness;

namespace {

const std::string kFixtures = std::string(CCB_SOURCE_DIR) + "/data/fixtures";

std::string temp_root(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("ccb-test-" + tag);
    std::filesystem::remove_all(dir);
    return dir.string();
}

Config fixture_config(const std::string& tag) {
    Config config = Config::from_text(
        "[corpus]\n"
        "path = " + kFixtures + "/synthetic_full.jsonl\n"
        "[split]\n"
        "ratio = 0.8\n"
        "[featurizer]\n"
        "kind = hashed\n"
        "dim = 256\n"
        "seed = 1\n"
        "[head]\n"
        "kind = logistic\n"
        "c = 10\n"
        "max_iters = 1000\n"
        "[measurement]\n"
        "mode = fixed\n"
        "fixed_runtime_s = 0\n"
        "[run]\n"
        "seed = 42\n"
        "root = " + temp_root(tag) + "\n");
    return config;
}

} // namespace

TEST_CASE("config files parse into dotted keys with override precedence") {
    auto config = Config::from_text(
        "# comment\n"
        "[corpus]\n"
        "path = a.jsonl\n"
        "[head]\n"
        "kind = forest\n"
        "max_depth = 9\n");
    CHECK(config.get("corpus.path") == std::string("a.jsonl"));
    CHECK(config.get_int("head.max_depth", 0) == 9);
    CHECK(config.get_or("head.kernel", "rbf") == "rbf");
    CHECK_FALSE(config.get("nope.nope").has_value());

    config.apply_overrides({"head.max_depth=12", "grid.c=0.1,1.0"});
    CHECK(config.get_int("head.max_depth", 0) == 12);
    CHECK(config.get("grid.c") == std::string("0.1,1.0"));

    CHECK_THROWS_AS(config.apply_override("nodot", "x"), Error);
    CHECK_THROWS_AS((void)Config::from_text("key_outside_section = 1\n"), Error);
    CHECK_THROWS_AS((void)Config::from_text("[sec\n"), Error);
    CHECK_THROWS_AS((void)config.get_int("grid.c", 0), Error);
}

TEST_CASE("canonical text and hash are stable under key order") {
    auto a = Config::from_text("[x]\nb = 2\na = 1\n");
    auto b = Config::from_text("[x]\na = 1\nb = 2\n");
    CHECK(a.canonical_text() == b.canonical_text());
    CHECK(a.hash() == b.hash());
    b.apply_override("x.a", "3");
    CHECK(a.hash() != b.hash());
}

TEST_CASE("experiment config validation catches contradictions") {
    auto config = Config::from_text("[head]\nkind = naive_bayes\n");
    CHECK_THROWS_AS((void)ExperimentConfig::from_config(config), Error); // no corpus

    config = fixture_config("validate");
    config.apply_override("head.kind", "naive_bayes"); // hashed features + NB
    CHECK_THROWS_AS((void)ExperimentConfig::from_config(config), Error);

    config = fixture_config("validate2");
    config.apply_override("featurizer.kind", "bow"); // bow + logistic
    CHECK_THROWS_AS((void)ExperimentConfig::from_config(config), Error);

    config = fixture_config("validate3");
    config.apply_override("cost.encoder", "made-up-model");
    CHECK_THROWS_AS((void)ExperimentConfig::from_config(config), Error);
}

TEST_CASE("run_experiment produces all 19 label rows, a finite score and a manifest") {
    auto config = fixture_config("run");
    const auto result = run_experiment(config);

    int rows = 0;
    for (const auto& scores : result.metrics.per_language) rows += static_cast<int>(scores.size());
    CHECK(rows == 19);
    CHECK(std::isfinite(result.score.total));
    CHECK(result.metrics.avg_f1 == doctest::Approx(1.0)); // separable by construction

    namespace fs = std::filesystem;
    CHECK(fs::exists(result.run_dir + "/metrics.csv"));
    CHECK(fs::exists(result.run_dir + "/score.csv"));
    CHECK(fs::exists(result.run_dir + "/cost.csv"));
    CHECK(fs::exists(result.run_dir + "/model.json"));
    CHECK(fs::exists(result.run_dir + "/manifest.json"));

    const auto manifest = textio::read_file(result.run_dir + "/manifest.json");
    CHECK(manifest.find(config.hash()) != std::string::npos);
    CHECK(manifest.find("input_digests") != std::string::npos);
}

TEST_CASE("equal config and seed give byte-identical metric and score outputs") {
    auto config = fixture_config("determinism");
    const auto first = run_experiment(config);
    const std::string metrics1 = textio::read_file(first.run_dir + "/metrics.csv");
    const std::string score1 = textio::read_file(first.run_dir + "/score.csv");

    const auto second = run_experiment(config);
    CHECK(second.run_dir == first.run_dir);
    CHECK(textio::read_file(second.run_dir + "/metrics.csv") == metrics1);
    CHECK(textio::read_file(second.run_dir + "/score.csv") == score1);
}

TEST_CASE("bow plus naive bayes runs single-class end to end") {
    auto config = fixture_config("nb");
    config.apply_override("featurizer.kind", "bow");
    config.apply_override("head.kind", "naive_bayes");
    const auto result = run_experiment(config);
    CHECK(std::isfinite(result.score.total));
    // disjoint vocabularies make even the single-class reduction exact on
    // the single-label test sentences; multi-label rows cost recall only
    CHECK(result.metrics.avg_f1 > 0.8);

    const auto model_json = textio::read_file(result.run_dir + "/model.json");
    CHECK(model_json.find("\"naive_bayes\"") != std::string::npos);
}

TEST_CASE("embedding featurizer joins by id and attributes encoder flops") {
    // externally produced embeddings: one vector per fixture sentence
    const auto load = corpus::load_jsonl(kFixtures + "/synthetic_full.jsonl");
    REQUIRE(load.clean());
    featurize::EmbeddingTable table;
    table.dim = 256;
    table.provenance = "paraphrase-MiniLM-L3-v2";
    for (const auto& s : load.sentences) {
        table.vectors[s.id] = featurize::hashed_embedding(featurize::preprocess(s.text), 256, 1);
    }
    const std::string root = temp_root("embedding");
    std::filesystem::create_directories(root);
    const std::string table_path = root + "/vectors.txt";
    featurize::save_embeddings(table, table_path);

    auto config = fixture_config("embedding-run");
    config.apply_override("featurizer.kind", "embedding");
    config.apply_override("featurizer.embedding_path", table_path);
    config.apply_override("cost.encoder", "paraphrase-MiniLM-L3-v2");
    const auto result = run_experiment(config);
    CHECK(result.metrics.avg_f1 == doctest::Approx(1.0)); // same geometry as the hashed-256 run
    for (double g : result.cost.gflops) CHECK(g > 0.0);   // encoder work is accounted
    CHECK(std::isfinite(result.score.total));

    // a sentence missing from the table is an error, not a silent substitute
    table.vectors.erase(load.sentences.front().id);
    featurize::save_embeddings(table, table_path);
    CHECK_THROWS_AS((void)run_experiment(config), Error);
}

TEST_CASE("saved models evaluate identically to the training run") {
    auto config = fixture_config("saved");
    const auto direct = run_experiment(config);
    const std::string model_path = direct.run_dir + "/model.json";
    const auto loaded = evaluate_models(config, model_path);
    CHECK(loaded.metrics.avg_f1 == doctest::Approx(direct.metrics.avg_f1).epsilon(1e-15));
    CHECK(loaded.cost.avg_gflops == doctest::Approx(direct.cost.avg_gflops).epsilon(1e-15));
}

TEST_CASE("grid enumeration covers the swept axes") {
    auto config = fixture_config("gridspec");
    config.apply_override("grid.head", "svm");
    config.apply_override("grid.c", "0.001,0.01,0.1,1.0");
    config.apply_override("grid.kernels", "linear,poly,rbf,sigmoid");
    const auto grid = GridSpec::from_config(config);
    heads::HeadSpec base;
    CHECK(grid.enumerate(base).size() == 16);

    config.apply_override("grid.head", "rf");
    config.apply_override("grid.max_depth", "3:20");
    CHECK(GridSpec::from_config(config).enumerate(base).size() == 18);

    config.apply_override("grid.max_depth", "4,9");
    CHECK(GridSpec::from_config(config).enumerate(base).size() == 2);

    config.apply_override("grid.head", "lr");
    auto points = GridSpec::from_config(config).enumerate(base);
    CHECK(points.size() == 4);
    CHECK(points[1].display_name() == "LR, C: 0.01");
}

TEST_CASE("run_grid ranks one leaderboard row per point with table-style names") {
    auto config = fixture_config("grid");
    config.apply_override("grid.head", "lr");
    config.apply_override("grid.c", "0.01,10");
    const auto result = run_grid(config);
    REQUIRE(result.leaderboard.size() == 2);
    std::set<std::string> names;
    for (const auto& row : result.leaderboard) {
        names.insert(row.name);
        CHECK(row.status == "ok");
    }
    CHECK(names == std::set<std::string>{"LR, C: 0.01", "LR, C: 10"});
    for (std::size_t i = 1; i < result.leaderboard.size(); ++i) {
        CHECK(result.leaderboard[i - 1].breakdown.total >= result.leaderboard[i].breakdown.total);
    }
    CHECK(std::filesystem::exists(result.leaderboard_csv));
    CHECK(std::filesystem::exists(result.breakdown_csv));
}

TEST_CASE("grid scheduling order never changes per-point results") {
    auto config = fixture_config("gridorder");
    config.apply_override("grid.head", "rf");
    config.apply_override("grid.max_depth", "2,3,4");
    config.apply_override("head.n_trees", "10");
    const auto first = run_grid(config);
    const std::string bytes1 = textio::read_file(first.leaderboard_csv);
    const auto second = run_grid(config);
    CHECK(textio::read_file(second.leaderboard_csv) == bytes1);
}

TEST_CASE("an empty grid is an error") {
    auto config = fixture_config("gridempty");
    config.apply_override("grid.head", "rf");
    config.apply_override("grid.max_depth", "");
    CHECK_THROWS_AS((void)run_grid(config), Error);
}

TEST_CASE("the committed fixture matches its generator bit for bit") {
    const std::string dir = temp_root("fixture-regen");
    write_synthetic_fixture(dir, 2025);
    for (const char* name : {"synthetic_full.jsonl", "synthetic_train.jsonl",
                             "synthetic_test.jsonl", "synthetic_java.jsonl"}) {
        CHECK(textio::read_file(dir + "/" + name) ==
              textio::read_file(kFixtures + "/" + name));
    }
}

TEST_CASE("environment variable supplies the default run root") {
    auto config = fixture_config("envroot");
    // explicit key beats the environment
    setenv("CCB_RUN_ROOT", "/tmp/ccb-env-root", 1);
    CHECK(ExperimentConfig::from_config(config).run_root == config.get("run.root").value());

    auto bare = Config::from_text("[corpus]\npath = x.jsonl\n");
    CHECK(ExperimentConfig::from_config(bare).run_root == "/tmp/ccb-env-root");
    unsetenv("CCB_RUN_ROOT");
    CHECK(ExperimentConfig::from_config(bare).run_root == "runs");
}

TEST_CASE("measured mode records raw samples and a positive runtime") {
    auto config = fixture_config("measured");
    config.apply_override("measurement.mode", "measured");
    config.apply_override("measurement.warmup", "1");
    config.apply_override("measurement.reps", "3");
    const auto result = run_experiment(config);
    CHECK(std::filesystem::exists(result.run_dir + "/cost_samples.csv"));
    for (double r : result.cost.runtime_s) CHECK(r > 0.0);
    CHECK(std::isfinite(result.score.total));
    CHECK(result.cost.avg_runtime_s >= *std::min_element(result.cost.runtime_s.begin(),
                                                         result.cost.runtime_s.end()));
}

TEST_CASE("metrics csv lists every language/label row plus the summary") {
    auto config = fixture_config("metricscsv");
    const auto result = run_experiment(config);
    std::ifstream in(result.run_dir + "/metrics.csv");
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 21); // header + 19 labels + summary
    CHECK(lines[0] == "language,label,precision,recall,f1");
    CHECK(lines[1].rfind("java,", 0) == 0);
    CHECK(lines[20].rfind("all,average,", 0) == 0);
}
