#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccb/corpus.hpp"
#include "ccb/cost.hpp"
#include "ccb/heads.hpp"
#include "ccb/metrics.hpp"
#include "ccb/score.hpp"

namespace ccb::harness {

// Flat key-value config with one section per module. Keys are addressed as
// "section.key"; CLI overrides win over file values.
class Config {
public:
    static Config from_file(const std::string& path);
    static Config from_text(const std::string& text, const std::string& origin = "<text>");

    void apply_override(const std::string& dotted_key, const std::string& value);
    void apply_overrides(const std::vector<std::string>& assignments); // "sec.key=value"

    std::optional<std::string> get(const std::string& dotted_key) const;
    std::string get_or(const std::string& dotted_key, const std::string& fallback) const;
    double get_double(const std::string& dotted_key, double fallback) const;
    std::int64_t get_int(const std::string& dotted_key, std::int64_t fallback) const;
    bool has(const std::string& dotted_key) const;

    // Canonical text rendering (sorted); hashing this names the run directory.
    std::string canonical_text() const;
    std::string hash() const; // 16 hex chars of fnv1a64(canonical_text)

private:
    std::map<std::string, std::string> values_;
};

enum class FeaturizerKind { hashed, bow, embedding };

struct ExperimentConfig {
    // corpus: either a full set to split, or pre-split train/test files
    std::string corpus_path;
    std::string train_path;
    std::string test_path;
    double split_ratio = 0.8;

    FeaturizerKind featurizer = FeaturizerKind::hashed;
    int hashed_dim = 256;
    std::uint64_t hashed_seed = 0; // defaults to the run seed
    int min_df = 1;
    std::string embedding_path;

    heads::HeadSpec head;

    // cost accounting
    std::string encoder;          // preset name, or empty for none
    bool fixed_seq_len = false;
    int seq_len = 128;

    cost::MeasurementProtocol protocol;
    bool fixed_runtime = false;   // skip wall-clock measurement,
    double fixed_runtime_s = 0.0; // report this value instead

    score::ScoreConstants constants;
    metrics::F1Aggregation f1_aggregation = metrics::F1Aggregation::flat_labels;

    std::uint64_t seed = 42;
    std::string run_root; // empty: $CCB_RUN_ROOT or "runs"

    static ExperimentConfig from_config(const Config& config);
};

struct ExperimentResult {
    metrics::AggregateReport metrics;
    cost::CostReport cost;
    score::ScoreBreakdown score;
    std::string run_dir;
    std::vector<std::string> notes; // degenerate labels, constant heads, ...
};

// Full pipeline: load, split if needed, featurize, train one-vs-rest models
// per language, predict the test subsets, aggregate metrics, account FLOPs,
// measure (or fix) runtime, score, and write metrics.csv / cost.csv /
// cost_samples.csv / score.csv / model.json / manifest.json under a run
// directory named by the config hash. Deterministic end-to-end for a fixed
// seed apart from measured wall-clock values.
ExperimentResult run_experiment(const Config& config);

// Train only: writes model.json (featurizer provenance + per-language heads).
std::string train_models(const Config& config, const std::string& model_out);

// Evaluate a saved model on the configured test subsets.
ExperimentResult evaluate_models(const Config& config, const std::string& model_path);

struct GridSpec {
    heads::HeadKind head = heads::HeadKind::forest;
    std::vector<int> max_depths;        // forest/boosted sweep, 3..20
    std::vector<double> c_values;       // logistic/svm sweep
    std::vector<heads::Kernel> kernels; // svm sweep
    std::vector<int> iterations;        // recorded in point names only

    static GridSpec from_config(const Config& config);
    std::vector<heads::HeadSpec> enumerate(const heads::HeadSpec& base) const;
};

struct GridResult {
    std::vector<score::NamedScore> leaderboard; // ranked
    std::string leaderboard_csv;
    std::string breakdown_csv;
};

// One experiment per grid point, in parallel; runtime measurement phases are
// serialized by the cost module lock. Failed points become status=failed rows
// instead of aborting the sweep. Throws only when the grid is empty.
GridResult run_grid(const Config& config);

// Deterministic 3-language corpus with label-disjoint vocabularies, used by
// tests and demos: 100 sentences per language, ~5% multi-label, every label
// has at least 10 positives. Writes <dir>/synthetic_full.jsonl plus the
// 80/20 split as synthetic_train.jsonl / synthetic_test.jsonl.
void write_synthetic_fixture(const std::string& dir, std::uint64_t seed = 2025);

std::string library_version();

} // namespace ccb::harness
