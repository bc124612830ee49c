#include "ccb/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ccb/error.hpp"
#include "ccb/model_io.hpp"
#include "ccb/pairgen.hpp"
#include "ccb/rng.hpp"
#include "ccb/textio.hpp"

using nlohmann::json;

namespace ccb::harness {

std::string library_version() { return "0.1.0"; }

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

Config Config::from_text(const std::string& text, const std::string& origin) {
    Config config;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = textio::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                fail(ErrorKind::parse, origin + ":" + std::to_string(line_no) + ": unterminated section");
            }
            section = textio::trim(t.substr(1, t.size() - 2));
            if (section.empty()) {
                fail(ErrorKind::parse, origin + ":" + std::to_string(line_no) + ": empty section name");
            }
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            fail(ErrorKind::parse, origin + ":" + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = textio::trim(t.substr(0, eq));
        const std::string value = textio::trim(t.substr(eq + 1));
        if (key.empty()) {
            fail(ErrorKind::parse, origin + ":" + std::to_string(line_no) + ": empty key");
        }
        if (section.empty()) {
            fail(ErrorKind::parse, origin + ":" + std::to_string(line_no) + ": key outside any section");
        }
        config.values_[section + "." + key] = value;
    }
    return config;
}

Config Config::from_file(const std::string& path) {
    return from_text(textio::read_file(path), path);
}

void Config::apply_override(const std::string& dotted_key, const std::string& value) {
    if (dotted_key.find('.') == std::string::npos) {
        fail(ErrorKind::invalid_argument, "override key must be section.key: " + dotted_key);
    }
    values_[dotted_key] = value;
}

void Config::apply_overrides(const std::vector<std::string>& assignments) {
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) {
            fail(ErrorKind::invalid_argument, "override must be section.key=value: " + a);
        }
        apply_override(textio::trim(a.substr(0, eq)), textio::trim(a.substr(eq + 1)));
    }
}

std::optional<std::string> Config::get(const std::string& dotted_key) const {
    auto it = values_.find(dotted_key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string Config::get_or(const std::string& dotted_key, const std::string& fallback) const {
    auto v = get(dotted_key);
    return v ? *v : fallback;
}

double Config::get_double(const std::string& dotted_key, double fallback) const {
    auto v = get(dotted_key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        double parsed = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("trailing");
        return parsed;
    } catch (const std::exception&) {
        fail(ErrorKind::parse, "config key " + dotted_key + ": bad number '" + *v + "'");
    }
}

std::int64_t Config::get_int(const std::string& dotted_key, std::int64_t fallback) const {
    auto v = get(dotted_key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        std::int64_t parsed = std::stoll(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("trailing");
        return parsed;
    } catch (const std::exception&) {
        fail(ErrorKind::parse, "config key " + dotted_key + ": bad integer '" + *v + "'");
    }
}

bool Config::has(const std::string& dotted_key) const { return values_.count(dotted_key) > 0; }

std::string Config::canonical_text() const {
    std::ostringstream out;
    for (const auto& [key, value] : values_) out << key << '=' << value << '\n';
    return out.str();
}

std::string Config::hash() const {
    const std::string text = canonical_text();
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(text.data(), text.size())));
    return buf;
}

// ---------------------------------------------------------------------------
// experiment configuration
// ---------------------------------------------------------------------------

namespace {

heads::HeadSpec head_spec_from_config(const Config& config) {
    heads::HeadSpec spec;
    auto kind = heads::head_kind_from_name(config.get_or("head.kind", "logistic"));
    if (!kind) fail(ErrorKind::parse, "head.kind: unknown head '" + config.get_or("head.kind", "") + "'");
    spec.kind = *kind;
    spec.C = config.get_double("head.c", 1.0);
    if (auto k = config.get("head.kernel")) {
        auto kernel = heads::kernel_from_name(*k);
        if (!kernel) fail(ErrorKind::parse, "head.kernel: unknown kernel '" + *k + "'");
        spec.kernel.kernel = *kernel;
    }
    spec.kernel.gamma = config.get_double("head.gamma", 0.0);
    spec.kernel.coef0 = config.get_double("head.coef0", 0.0);
    spec.kernel.degree = static_cast<int>(config.get_int("head.degree", 3));
    spec.max_depth = static_cast<int>(config.get_int("head.max_depth", 6));
    spec.n_trees = static_cast<int>(config.get_int("head.n_trees", 100));
    spec.rounds = static_cast<int>(config.get_int("head.rounds", 100));
    spec.shrinkage = config.get_double("head.shrinkage", 0.1);
    spec.nb_alpha = config.get_double("head.alpha", 1.0);
    spec.threshold = config.get_double("head.threshold", 0.5);
    spec.tol = config.get_double("head.tol", 1e-6);
    spec.max_iters = static_cast<int>(config.get_int("head.max_iters", 500));
    return spec;
}

} // namespace

ExperimentConfig ExperimentConfig::from_config(const Config& config) {
    ExperimentConfig e;
    e.corpus_path = config.get_or("corpus.path", "");
    e.train_path = config.get_or("corpus.train_path", "");
    e.test_path = config.get_or("corpus.test_path", "");
    e.split_ratio = config.get_double("split.ratio", 0.8);
    if (e.corpus_path.empty() && (e.train_path.empty() || e.test_path.empty())) {
        fail(ErrorKind::invalid_argument,
             "config needs corpus.path or corpus.train_path + corpus.test_path");
    }

    const std::string fz = textio::lower(config.get_or("featurizer.kind", "hashed"));
    if (fz == "hashed") e.featurizer = FeaturizerKind::hashed;
    else if (fz == "bow") e.featurizer = FeaturizerKind::bow;
    else if (fz == "embedding") e.featurizer = FeaturizerKind::embedding;
    else fail(ErrorKind::parse, "featurizer.kind must be hashed, bow or embedding");
    e.hashed_dim = static_cast<int>(config.get_int("featurizer.dim", 256));
    e.hashed_seed = static_cast<std::uint64_t>(
        config.get_int("featurizer.seed", config.get_int("run.seed", 42)));
    e.min_df = static_cast<int>(config.get_int("featurizer.min_df", 1));
    e.embedding_path = config.get_or("featurizer.embedding_path", "");
    if (e.featurizer == FeaturizerKind::embedding && e.embedding_path.empty()) {
        fail(ErrorKind::invalid_argument, "featurizer.embedding_path required for embeddings");
    }

    e.head = head_spec_from_config(config);
    if (e.head.kind == heads::HeadKind::naive_bayes && e.featurizer != FeaturizerKind::bow) {
        fail(ErrorKind::invalid_argument, "naive bayes requires featurizer.kind = bow");
    }
    if (e.head.kind != heads::HeadKind::naive_bayes && e.featurizer == FeaturizerKind::bow) {
        fail(ErrorKind::invalid_argument, "bag-of-words features pair with the naive bayes head");
    }

    e.encoder = config.get_or("cost.encoder", "none");
    if (e.encoder == "none") e.encoder.clear();
    if (!e.encoder.empty() && !cost::encoder_preset(e.encoder)) {
        fail(ErrorKind::invalid_argument, "cost.encoder: unknown preset '" + e.encoder + "'");
    }
    const std::string policy = textio::lower(config.get_or("cost.seq_len_policy", "actual"));
    if (policy == "actual") e.fixed_seq_len = false;
    else if (policy == "fixed") e.fixed_seq_len = true;
    else fail(ErrorKind::parse, "cost.seq_len_policy must be actual or fixed");
    e.seq_len = static_cast<int>(config.get_int("cost.seq_len", 128));

    const std::string mode = textio::lower(config.get_or("measurement.mode", "measured"));
    if (mode == "measured") e.fixed_runtime = false;
    else if (mode == "fixed") e.fixed_runtime = true;
    else fail(ErrorKind::parse, "measurement.mode must be measured or fixed");
    e.fixed_runtime_s = config.get_double("measurement.fixed_runtime_s", 0.0);
    e.protocol.warmup = static_cast<int>(config.get_int("measurement.warmup", 2));
    e.protocol.repetitions = static_cast<int>(config.get_int("measurement.reps", 5));
    const std::string agg = textio::lower(config.get_or("measurement.aggregation", "median"));
    if (agg == "median") e.protocol.aggregation = cost::MeasurementProtocol::Aggregation::median;
    else if (agg == "mean") e.protocol.aggregation = cost::MeasurementProtocol::Aggregation::mean;
    else fail(ErrorKind::parse, "measurement.aggregation must be median or mean");

    e.constants.f1_weight = config.get_double("score.f1_weight", 0.6);
    e.constants.runtime_weight = config.get_double("score.runtime_weight", 0.2);
    e.constants.gflops_weight = config.get_double("score.gflops_weight", 0.2);
    e.constants.runtime_budget_s = config.get_double("score.runtime_budget_s", 5.0);
    e.constants.gflops_budget = config.get_double("score.gflops_budget", 5000.0);

    const std::string f1agg = textio::lower(config.get_or("metrics.aggregation", "flat"));
    if (f1agg == "flat") e.f1_aggregation = metrics::F1Aggregation::flat_labels;
    else if (f1agg == "per_language") e.f1_aggregation = metrics::F1Aggregation::per_language_macro;
    else fail(ErrorKind::parse, "metrics.aggregation must be flat or per_language");

    e.seed = static_cast<std::uint64_t>(config.get_int("run.seed", 42));
    e.run_root = config.get_or("run.root", "");
    if (e.run_root.empty()) {
        const char* env = std::getenv("CCB_RUN_ROOT");
        e.run_root = env && *env ? env : "runs";
    }
    return e;
}

// ---------------------------------------------------------------------------
// pipeline internals
// ---------------------------------------------------------------------------

namespace {

using corpus::CommentSentence;
using corpus::Language;

struct LanguageSlice {
    std::vector<CommentSentence> train;
    std::vector<CommentSentence> test;
};

struct PreparedData {
    std::array<LanguageSlice, 3> slices;
    // dense features (hashed / embedding)
    std::array<heads::FeatureMatrix, 3> train_x, test_x;
    // sparse features (bow)
    std::array<std::vector<featurize::SparseCountVector>, 3> train_sparse, test_sparse;
    std::array<featurize::Vocabulary, 3> vocabs;
    std::array<std::vector<int>, 3> test_token_counts; // preprocessed lengths
    int feature_dim = 0;
    std::string embedding_provenance;
    std::vector<std::string> notes;
    std::map<std::string, std::string> input_digests;
};

std::string digest_file(const std::string& path) {
    const std::string bytes = textio::read_file(path);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    return buf;
}

std::vector<CommentSentence> load_clean(const std::string& path,
                                        std::map<std::string, std::string>* digests) {
    auto result = corpus::load_jsonl(path);
    if (!result.clean()) {
        const auto& first = result.issues.front();
        fail(ErrorKind::parse, path + ": " + std::to_string(result.issues.size()) +
                                   " invalid rows, first: " + first.message);
    }
    if (digests) (*digests)[path] = digest_file(path);
    return std::move(result.sentences);
}

void split_by_language(const std::vector<CommentSentence>& sentences,
                       std::array<std::vector<CommentSentence>, 3>* out) {
    for (const auto& s : sentences) (*out)[static_cast<std::size_t>(s.language)].push_back(s);
}

PreparedData prepare_data(const ExperimentConfig& e) {
    PreparedData data;

    std::vector<CommentSentence> train_all, test_all;
    if (!e.train_path.empty() && !e.test_path.empty()) {
        train_all = load_clean(e.train_path, &data.input_digests);
        test_all = load_clean(e.test_path, &data.input_digests);
    } else {
        auto full = load_clean(e.corpus_path, &data.input_digests);
        auto split = corpus::stratified_split(full, e.split_ratio, e.seed);
        train_all = std::move(split.train);
        test_all = std::move(split.test);
        for (const auto& d : split.degenerate_labels) {
            data.notes.push_back("degenerate label (single positive): " + d);
        }
    }

    std::array<std::vector<CommentSentence>, 3> train_by_lang, test_by_lang;
    split_by_language(train_all, &train_by_lang);
    split_by_language(test_all, &test_by_lang);
    for (int lang = 0; lang < 3; ++lang) {
        const auto ul = static_cast<std::size_t>(lang);
        if (train_by_lang[ul].empty() || test_by_lang[ul].empty()) {
            fail(ErrorKind::invalid_argument,
                 std::string("no ") + corpus::language_name(static_cast<Language>(lang)) +
                     " sentences on both sides of the split");
        }
        data.slices[ul].train = std::move(train_by_lang[ul]);
        data.slices[ul].test = std::move(test_by_lang[ul]);
    }

    std::optional<featurize::EmbeddingTable> table;
    if (e.featurizer == FeaturizerKind::embedding) {
        table = featurize::load_embeddings(e.embedding_path);
        data.input_digests[e.embedding_path] = digest_file(e.embedding_path);
        data.feature_dim = table->dim;
        data.embedding_provenance = table->provenance;
    } else if (e.featurizer == FeaturizerKind::hashed) {
        data.feature_dim = e.hashed_dim;
    }

    for (int lang = 0; lang < 3; ++lang) {
        const auto ul = static_cast<std::size_t>(lang);
        const auto& slice = data.slices[ul];

        std::vector<featurize::TokenSequence> train_tokens, test_tokens;
        train_tokens.reserve(slice.train.size());
        test_tokens.reserve(slice.test.size());
        for (const auto& s : slice.train) train_tokens.push_back(featurize::preprocess(s.text));
        for (const auto& s : slice.test) test_tokens.push_back(featurize::preprocess(s.text));
        for (const auto& t : test_tokens) data.test_token_counts[ul].push_back(static_cast<int>(t.size()));

        switch (e.featurizer) {
            case FeaturizerKind::hashed: {
                for (const auto& t : train_tokens) {
                    data.train_x[ul].push_back(
                        featurize::hashed_embedding(t, e.hashed_dim, e.hashed_seed));
                }
                for (const auto& t : test_tokens) {
                    data.test_x[ul].push_back(
                        featurize::hashed_embedding(t, e.hashed_dim, e.hashed_seed));
                }
                break;
            }
            case FeaturizerKind::embedding: {
                for (const auto& s : slice.train) data.train_x[ul].push_back(table->lookup(s.id));
                for (const auto& s : slice.test) data.test_x[ul].push_back(table->lookup(s.id));
                break;
            }
            case FeaturizerKind::bow: {
                data.vocabs[ul] = featurize::build_vocabulary(train_tokens, e.min_df);
                for (const auto& t : train_tokens) {
                    data.train_sparse[ul].push_back(featurize::bow_vector(t, data.vocabs[ul]));
                }
                for (const auto& t : test_tokens) {
                    data.test_sparse[ul].push_back(featurize::bow_vector(t, data.vocabs[ul]));
                }
                break;
            }
        }
    }
    return data;
}

struct TrainedModels {
    std::array<heads::OneVsRestClassifier, 3> classifiers;
    std::vector<std::string> notes;
};

TrainedModels train_all(const PreparedData& data, const ExperimentConfig& e) {
    TrainedModels models;
    Rng base(e.seed);
    for (int lang = 0; lang < 3; ++lang) {
        const auto ul = static_cast<std::size_t>(lang);
        const auto& slice = data.slices[ul];
        const auto& taxonomy = corpus::taxonomy_for(static_cast<Language>(lang));

        std::vector<std::vector<int>> label_sets;
        label_sets.reserve(slice.train.size());
        for (const auto& s : slice.train) label_sets.push_back(s.labels);

        heads::HeadSpec spec = e.head;
        spec.seed = base.fork(static_cast<std::uint64_t>(lang)).next_u64();

        heads::TrainReport report;
        if (e.featurizer == FeaturizerKind::bow) {
            models.classifiers[ul] = heads::ovr_train_sparse(data.train_sparse[ul], label_sets,
                                                             taxonomy.size(), spec, &report);
        } else {
            models.classifiers[ul] = heads::ovr_train(data.train_x[ul], label_sets,
                                                      taxonomy.size(), spec, &report);
        }
        for (std::size_t l = 0; l < report.label_status.size(); ++l) {
            if (report.label_status[l] != "trained") {
                models.notes.push_back(std::string(corpus::language_name(static_cast<Language>(lang))) +
                                       "/" + taxonomy.labels[l] + ": " + report.label_status[l]);
            }
        }
    }
    return models;
}

std::vector<std::vector<int>> predict_slice(const heads::OneVsRestClassifier& clf,
                                            const PreparedData& data, int lang) {
    const auto ul = static_cast<std::size_t>(lang);
    std::vector<std::vector<int>> predictions;
    if (clf.is_single_class()) {
        predictions.reserve(data.test_sparse[ul].size());
        for (const auto& x : data.test_sparse[ul]) predictions.push_back(heads::ovr_predict(clf, x));
    } else {
        predictions.reserve(data.test_x[ul].size());
        for (const auto& x : data.test_x[ul]) predictions.push_back(heads::ovr_predict(clf, x));
    }
    return predictions;
}

metrics::AggregateReport evaluate_metrics(const TrainedModels& models, const PreparedData& data,
                                          const ExperimentConfig& e) {
    std::vector<std::vector<metrics::LabelScore>> per_language;
    for (int lang = 0; lang < 3; ++lang) {
        const auto ul = static_cast<std::size_t>(lang);
        const auto& taxonomy = corpus::taxonomy_for(static_cast<Language>(lang));
        const auto predictions = predict_slice(models.classifiers[ul], data, lang);

        std::vector<std::vector<int>> truth;
        truth.reserve(data.slices[ul].test.size());
        for (const auto& s : data.slices[ul].test) truth.push_back(s.labels);

        std::vector<metrics::LabelScore> scores;
        for (int label = 0; label < taxonomy.size(); ++label) {
            scores.push_back(metrics::f1_score(metrics::confusion(truth, predictions, label), label));
        }
        per_language.push_back(std::move(scores));
    }
    return metrics::aggregate(per_language, e.f1_aggregation);
}

struct CostOutcome {
    cost::CostReport report;
    std::vector<cost::RuntimeMeasurement> measurements; // empty in fixed mode
};

CostOutcome evaluate_cost(const TrainedModels& models, const PreparedData& data,
                          const ExperimentConfig& e) {
    CostOutcome outcome;
    std::optional<cost::EncoderSpec> encoder;
    if (!e.encoder.empty()) encoder = cost::encoder_preset(e.encoder);

    std::vector<double> runtimes, gflops;
    for (int lang = 0; lang < 3; ++lang) {
        const auto ul = static_cast<std::size_t>(lang);
        const auto& clf = models.classifiers[ul];

        std::uint64_t flops = 0;
        const std::size_t n_test = data.slices[ul].test.size();
        for (std::size_t i = 0; i < n_test; ++i) {
            if (encoder) {
                int len = e.fixed_seq_len ? e.seq_len : data.test_token_counts[ul][i];
                len = std::clamp(len, 1, encoder->max_seq);
                flops += cost::encoder_flops(*encoder, len).flops;
            }
            const int nnz = clf.is_single_class()
                                ? static_cast<int>(data.test_sparse[ul][i].entries.size())
                                : 0;
            flops += cost::head_flops(clf, data.feature_dim, nnz).flops;
        }
        gflops.push_back(cost::FlopCount{flops}.gflops());

        if (e.fixed_runtime) {
            runtimes.push_back(e.fixed_runtime_s);
        } else {
            std::lock_guard<std::mutex> guard(cost::measurement_lock());
            auto m = cost::measure_runtime([&] { (void)predict_slice(clf, data, lang); },
                                           e.protocol);
            runtimes.push_back(m.seconds);
            outcome.measurements.push_back(std::move(m));
        }
    }
    outcome.report = cost::cost_report(runtimes, gflops);
    return outcome;
}

std::string featurizer_label(const ExperimentConfig& e, const PreparedData& data) {
    switch (e.featurizer) {
        case FeaturizerKind::hashed: return "hashed-" + std::to_string(e.hashed_dim);
        case FeaturizerKind::bow: return "bow";
        case FeaturizerKind::embedding:
            return data.embedding_provenance.empty() ? "embedding" : data.embedding_provenance;
    }
    return "?";
}

json featurizer_to_json(const ExperimentConfig& e, const PreparedData& data) {
    json j;
    switch (e.featurizer) {
        case FeaturizerKind::hashed:
            j = {{"kind", "hashed"}, {"dim", e.hashed_dim}, {"seed", e.hashed_seed}};
            break;
        case FeaturizerKind::embedding:
            j = {{"kind", "embedding"},
                 {"dim", data.feature_dim},
                 {"provenance", data.embedding_provenance},
                 {"path", e.embedding_path}};
            break;
        case FeaturizerKind::bow: {
            j = {{"kind", "bow"}, {"min_df", e.min_df}};
            json vocabs;
            for (int lang = 0; lang < 3; ++lang) {
                vocabs[corpus::language_name(static_cast<Language>(lang))] =
                    json::parse(model_io::vocabulary_to_json(data.vocabs[static_cast<std::size_t>(lang)]));
            }
            j["vocabularies"] = std::move(vocabs);
            break;
        }
    }
    return j;
}

std::string models_to_json(const TrainedModels& models, const ExperimentConfig& e,
                           const PreparedData& data) {
    json j = {{"version", 1}, {"featurizer", featurizer_to_json(e, data)}};
    json langs;
    for (int lang = 0; lang < 3; ++lang) {
        langs[corpus::language_name(static_cast<Language>(lang))] = json::parse(
            model_io::classifier_to_json(models.classifiers[static_cast<std::size_t>(lang)]));
    }
    j["languages"] = std::move(langs);
    return j.dump(2);
}

void write_manifest(const Config& config, const ExperimentConfig& e, const PreparedData& data,
                    const std::string& run_dir) {
    json digests;
    for (const auto& [path, digest] : data.input_digests) digests[path] = digest;
    json manifest = {{"config_hash", config.hash()},
                     {"config", config.canonical_text()},
                     {"seed", e.seed},
                     {"version", library_version()},
                     {"input_digests", digests},
                     {"flop_convention", "1 multiply-accumulate = 2 FLOPs"}};
    textio::write_file(run_dir + "/manifest.json", manifest.dump(2));
}

void write_cost_csv(const cost::CostReport& report, const std::string& path) {
    std::ostringstream out;
    out << "# 1 multiply-accumulate = 2 FLOPs\n";
    out << "language,runtime_s,gflops\n";
    for (int lang = 0; lang < 3; ++lang) {
        out << corpus::language_name(static_cast<Language>(lang)) << ','
            << textio::format_double(report.runtime_s[static_cast<std::size_t>(lang)]) << ','
            << textio::format_double(report.gflops[static_cast<std::size_t>(lang)]) << '\n';
    }
    out << "average," << textio::format_double(report.avg_runtime_s) << ','
        << textio::format_double(report.avg_gflops) << '\n';
    out << "total," << textio::format_double(report.total_runtime_s) << ','
        << textio::format_double(report.total_gflops) << '\n';
    textio::write_file(path, out.str());
}

ExperimentResult run_point(const Config& config, const ExperimentConfig& e,
                           const PreparedData& data, bool write_outputs) {
    TrainedModels models = train_all(data, e);

    ExperimentResult result;
    result.metrics = evaluate_metrics(models, data, e);
    CostOutcome cost_outcome = evaluate_cost(models, data, e);
    result.cost = cost_outcome.report;
    result.score = score::submission_score(
        {result.metrics.avg_f1, result.cost.avg_runtime_s, result.cost.avg_gflops}, e.constants);
    result.notes = data.notes;
    result.notes.insert(result.notes.end(), models.notes.begin(), models.notes.end());

    if (!write_outputs) return result;

    const std::string run_dir = e.run_root + "/" + config.hash();
    textio::ensure_directory(run_dir);
    result.run_dir = run_dir;

    metrics::write_report_csv(result.metrics, run_dir + "/metrics.csv");
    write_cost_csv(result.cost, run_dir + "/cost.csv");
    if (!cost_outcome.measurements.empty()) {
        cost::write_samples_csv(cost_outcome.measurements, {"java", "python", "pharo"},
                                run_dir + "/cost_samples.csv");
    }
    const std::string name = featurizer_label(e, data) + " + " + e.head.display_name();
    score::NamedScore named{name,
                            {result.metrics.avg_f1, result.cost.avg_runtime_s,
                             result.cost.avg_gflops},
                            result.score,
                            "ok"};
    score::write_leaderboard_csv({named}, run_dir + "/score.csv");
    textio::write_file(run_dir + "/model.json", models_to_json(models, e, data));
    write_manifest(config, e, data, run_dir);
    if (!result.notes.empty()) {
        std::string notes;
        for (const auto& n : result.notes) notes += n + "\n";
        textio::write_file(run_dir + "/notes.txt", notes);
    }
    return result;
}

// re-throw with the config hash attached
template <typename Fn>
auto with_config_context(const Config& config, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.kind(), "[config " + config.hash() + "] " + e.what());
    }
}

} // namespace

ExperimentResult run_experiment(const Config& config) {
    return with_config_context(config, [&] {
        const ExperimentConfig e = ExperimentConfig::from_config(config);
        const PreparedData data = prepare_data(e);
        return run_point(config, e, data, true);
    });
}

namespace {

std::string train_models_impl(const Config& config, const std::string& model_out) {
    const ExperimentConfig e = ExperimentConfig::from_config(config);
    const PreparedData data = prepare_data(e);
    TrainedModels models = train_all(data, e);
    if (!model_out.empty()) {
        textio::write_file(model_out, models_to_json(models, e, data));
        return model_out;
    }
    const std::string run_dir = e.run_root + "/" + config.hash();
    textio::ensure_directory(run_dir);
    const std::string path = run_dir + "/model.json";
    textio::write_file(path, models_to_json(models, e, data));
    return path;
}

} // namespace

std::string train_models(const Config& config, const std::string& model_out) {
    return with_config_context(config, [&] { return train_models_impl(config, model_out); });
}

namespace {

ExperimentResult evaluate_models_impl(const Config& config, const std::string& model_path) {
    const ExperimentConfig base = ExperimentConfig::from_config(config);

    json container = json::parse(textio::read_file(model_path), nullptr, false);
    if (container.is_discarded()) fail(ErrorKind::parse, model_path + ": invalid JSON");

    // the saved featurizer settings override the config's
    ExperimentConfig e = base;
    const auto& fz = container.at("featurizer");
    const std::string kind = fz.at("kind").get<std::string>();
    if (kind == "hashed") {
        e.featurizer = FeaturizerKind::hashed;
        e.hashed_dim = fz.at("dim").get<int>();
        e.hashed_seed = fz.at("seed").get<std::uint64_t>();
    } else if (kind == "embedding") {
        e.featurizer = FeaturizerKind::embedding;
        if (e.embedding_path.empty()) e.embedding_path = fz.at("path").get<std::string>();
    } else if (kind == "bow") {
        e.featurizer = FeaturizerKind::bow;
        e.min_df = fz.at("min_df").get<int>();
    } else {
        fail(ErrorKind::parse, model_path + ": unknown featurizer kind");
    }

    PreparedData data = prepare_data(e);
    TrainedModels models;
    for (int lang = 0; lang < 3; ++lang) {
        const char* name = corpus::language_name(static_cast<Language>(lang));
        models.classifiers[static_cast<std::size_t>(lang)] =
            model_io::classifier_from_json(container.at("languages").at(name).dump());
    }
    // bow vocabularies travel with the model, not the data
    if (e.featurizer == FeaturizerKind::bow) {
        for (int lang = 0; lang < 3; ++lang) {
            const char* name = corpus::language_name(static_cast<Language>(lang));
            data.vocabs[static_cast<std::size_t>(lang)] = model_io::vocabulary_from_json(
                fz.at("vocabularies").at(name).dump());
            data.test_sparse[static_cast<std::size_t>(lang)].clear();
            for (const auto& s : data.slices[static_cast<std::size_t>(lang)].test) {
                data.test_sparse[static_cast<std::size_t>(lang)].push_back(featurize::bow_vector(
                    featurize::preprocess(s.text), data.vocabs[static_cast<std::size_t>(lang)]));
            }
        }
    }

    ExperimentResult result;
    result.metrics = evaluate_metrics(models, data, e);
    CostOutcome cost_outcome = evaluate_cost(models, data, e);
    result.cost = cost_outcome.report;
    result.score = score::submission_score(
        {result.metrics.avg_f1, result.cost.avg_runtime_s, result.cost.avg_gflops}, e.constants);

    const std::string run_dir = e.run_root + "/" + config.hash() + "-eval";
    textio::ensure_directory(run_dir);
    result.run_dir = run_dir;
    metrics::write_report_csv(result.metrics, run_dir + "/metrics.csv");
    write_cost_csv(result.cost, run_dir + "/cost.csv");
    if (!cost_outcome.measurements.empty()) {
        cost::write_samples_csv(cost_outcome.measurements, {"java", "python", "pharo"},
                                run_dir + "/cost_samples.csv");
    }
    score::NamedScore named{"evaluate:" + model_path,
                            {result.metrics.avg_f1, result.cost.avg_runtime_s,
                             result.cost.avg_gflops},
                            result.score,
                            "ok"};
    score::write_leaderboard_csv({named}, run_dir + "/score.csv");
    write_manifest(config, e, data, run_dir);
    return result;
}

} // namespace

ExperimentResult evaluate_models(const Config& config, const std::string& model_path) {
    return with_config_context(config, [&] { return evaluate_models_impl(config, model_path); });
}

// ---------------------------------------------------------------------------
// grid runner
// ---------------------------------------------------------------------------

namespace {

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    const auto colon = text.find(':');
    if (colon != std::string::npos) { // "3:20" inclusive range
        const int lo = std::stoi(text.substr(0, colon));
        const int hi = std::stoi(text.substr(colon + 1));
        for (int v = lo; v <= hi; ++v) values.push_back(v);
        return values;
    }
    for (const auto& part : textio::split(text, ',')) {
        const std::string t = textio::trim(part);
        if (!t.empty()) values.push_back(std::stoi(t));
    }
    return values;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    for (const auto& part : textio::split(text, ',')) {
        const std::string t = textio::trim(part);
        if (!t.empty()) values.push_back(std::stod(t));
    }
    return values;
}

} // namespace

GridSpec GridSpec::from_config(const Config& config) {
    GridSpec grid;
    auto kind = heads::head_kind_from_name(config.get_or("grid.head", "forest"));
    if (!kind) fail(ErrorKind::parse, "grid.head: unknown head");
    grid.head = *kind;
    grid.max_depths = parse_int_list(config.get_or("grid.max_depth", "3:20"));
    grid.c_values = parse_double_list(config.get_or("grid.c", "0.001,0.01,0.1,1.0"));
    if (auto k = config.get("grid.kernels")) {
        for (const auto& part : textio::split(*k, ',')) {
            auto kernel = heads::kernel_from_name(part);
            if (!kernel) fail(ErrorKind::parse, "grid.kernels: unknown kernel '" + part + "'");
            grid.kernels.push_back(*kernel);
        }
    } else {
        grid.kernels = {heads::Kernel::linear, heads::Kernel::poly, heads::Kernel::rbf,
                        heads::Kernel::sigmoid};
    }
    if (auto it = config.get("grid.iterations")) grid.iterations = parse_int_list(*it);
    return grid;
}

std::vector<heads::HeadSpec> GridSpec::enumerate(const heads::HeadSpec& base) const {
    std::vector<heads::HeadSpec> points;
    switch (head) {
        case heads::HeadKind::forest:
        case heads::HeadKind::boosted:
            for (int depth : max_depths) {
                heads::HeadSpec s = base;
                s.kind = head;
                s.max_depth = depth;
                points.push_back(s);
            }
            break;
        case heads::HeadKind::logistic:
            for (double c : c_values) {
                heads::HeadSpec s = base;
                s.kind = head;
                s.C = c;
                points.push_back(s);
            }
            break;
        case heads::HeadKind::svm:
            for (double c : c_values) {
                for (heads::Kernel k : kernels) {
                    heads::HeadSpec s = base;
                    s.kind = head;
                    s.C = c;
                    s.kernel.kernel = k;
                    points.push_back(s);
                }
            }
            break;
        case heads::HeadKind::naive_bayes: {
            heads::HeadSpec s = base;
            s.kind = head;
            points.push_back(s);
            break;
        }
    }
    return points;
}

namespace {

GridResult run_grid_impl(const Config& base_config) {
    const ExperimentConfig base = ExperimentConfig::from_config(base_config);
    const GridSpec grid = GridSpec::from_config(base_config);
    const auto points = grid.enumerate(base.head);
    if (points.empty()) fail(ErrorKind::invalid_argument, "empty hyperparameter grid");

    // features are head-independent; prepare once and share across points
    ExperimentConfig feat_cfg = base;
    if (grid.head == heads::HeadKind::naive_bayes) feat_cfg.featurizer = FeaturizerKind::bow;
    else if (feat_cfg.featurizer == FeaturizerKind::bow) feat_cfg.featurizer = FeaturizerKind::hashed;
    feat_cfg.head.kind = grid.head;
    const PreparedData data = prepare_data(feat_cfg);

    struct PointJob {
        Config config;
        ExperimentConfig exp;
        std::string name;
    };
    std::vector<PointJob> jobs;
    for (const auto& spec : points) {
        Config point_config = base_config;
        point_config.apply_override("head.kind", heads::head_kind_name(spec.kind));
        point_config.apply_override("head.max_depth", std::to_string(spec.max_depth));
        point_config.apply_override("head.c", textio::format_double(spec.C));
        point_config.apply_override("head.kernel", heads::kernel_name(spec.kernel.kernel));
        point_config.apply_override("featurizer.kind",
                                    feat_cfg.featurizer == FeaturizerKind::bow
                                        ? "bow"
                                        : (feat_cfg.featurizer == FeaturizerKind::embedding
                                               ? "embedding"
                                               : "hashed"));
        ExperimentConfig exp = feat_cfg;
        exp.head = spec;
        std::string name = spec.display_name();
        jobs.push_back({std::move(point_config), std::move(exp), std::move(name)});
    }
    if (!grid.iterations.empty()) {
        std::vector<PointJob> expanded;
        for (int iters : grid.iterations) {
            for (const auto& job : jobs) {
                PointJob copy = job;
                copy.name += ", iterations: " + std::to_string(iters);
                copy.config.apply_override("grid.point_iterations", std::to_string(iters));
                expanded.push_back(std::move(copy));
            }
        }
        jobs = std::move(expanded);
    }

    std::vector<score::NamedScore> results(jobs.size());
    std::atomic<std::size_t> next{0};
    const unsigned n_workers = std::max(1u, std::min({std::thread::hardware_concurrency(),
                                                      static_cast<unsigned>(jobs.size()), 8u}));
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            score::NamedScore row;
            row.name = jobs[k].name;
            try {
                ExperimentResult r = run_point(jobs[k].config, jobs[k].exp, data, true);
                row.inputs = {r.metrics.avg_f1, r.cost.avg_runtime_s, r.cost.avg_gflops};
                row.breakdown = r.score;
                row.status = "ok";
            } catch (const std::exception& ex) {
                row.status = std::string("failed: ") + ex.what();
            }
            results[k] = std::move(row);
        }
    };
    std::vector<std::thread> threads;
    for (unsigned t = 0; t + 1 < n_workers; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    std::vector<score::NamedScore> ok_rows, failed_rows;
    for (auto& row : results) {
        (row.status == "ok" ? ok_rows : failed_rows).push_back(std::move(row));
    }
    if (ok_rows.empty()) {
        fail(ErrorKind::invalid_argument,
             "every grid point failed; first: " + failed_rows.front().name + " (" +
                 failed_rows.front().status + ")");
    }
    GridResult out;
    out.leaderboard = score::rank(std::move(ok_rows));
    for (auto& row : failed_rows) out.leaderboard.push_back(std::move(row));

    const std::string grid_dir = base.run_root + "/grid-" + base_config.hash();
    textio::ensure_directory(grid_dir);
    out.leaderboard_csv = grid_dir + "/leaderboard.csv";
    out.breakdown_csv = grid_dir + "/breakdown.csv";
    score::write_leaderboard_csv(out.leaderboard, out.leaderboard_csv);
    score::breakdown_export(out.leaderboard, out.breakdown_csv);
    write_manifest(base_config, base, data, grid_dir);
    return out;
}

} // namespace

GridResult run_grid(const Config& base_config) {
    return with_config_context(base_config, [&] { return run_grid_impl(base_config); });
}

// ---------------------------------------------------------------------------
// synthetic fixture
// ---------------------------------------------------------------------------

void write_synthetic_fixture(const std::string& dir, std::uint64_t seed) {
    textio::ensure_directory(dir);
    Rng rng(seed);

    std::vector<CommentSentence> all;
    const char* style_prefix[3] = {"// ", "# ", ""};
    for (int lang = 0; lang < 3; ++lang) {
        const auto language = static_cast<Language>(lang);
        const auto& taxonomy = corpus::taxonomy_for(language);
        const int n_labels = taxonomy.size();
        const int per_language = 100;
        const int n_multi = 10;

        auto pool_token = [&](int label, int k) {
            return std::string(corpus::language_name(language)) + taxonomy.labels[static_cast<std::size_t>(label)] +
                   "w" + std::to_string(k);
        };
        auto make_text = [&](const std::vector<int>& labels) {
            // every label contributes the same number of words so that no
            // label's signal is a minority inside the sentence; multi-label
            // sentences reuse one fixed multiset per pair so the same
            // mixed-vocabulary pattern shows up on both sides of any split
            std::vector<std::string> words;
            if (labels.size() == 1) {
                const int n_words = 3 + static_cast<int>(rng.bounded(3));
                for (int w = 0; w < n_words; ++w) {
                    words.push_back(pool_token(labels[0], static_cast<int>(rng.bounded(6))));
                }
            } else {
                for (int label : labels) {
                    for (int w = 0; w < 4; ++w) words.push_back(pool_token(label, w));
                }
            }
            rng.shuffle(words);
            std::string text = style_prefix[lang];
            for (std::size_t w = 0; w < words.size(); ++w) {
                if (w) text += ' ';
                text += words[w];
            }
            return text;
        };

        int counter = 0;
        auto add = [&](const std::vector<int>& labels) {
            CommentSentence s;
            char idbuf[32];
            std::snprintf(idbuf, sizeof(idbuf), "%s-%03d", corpus::language_name(language), counter++);
            s.id = idbuf;
            s.language = language;
            s.labels = labels;
            std::sort(s.labels.begin(), s.labels.end());
            s.text = make_text(s.labels);
            all.push_back(std::move(s));
        };

        const int singles = per_language - n_multi;
        const int base_each = singles / n_labels;
        for (int label = 0; label < n_labels; ++label) {
            for (int k = 0; k < base_each; ++k) add({label});
        }
        for (int k = 0; k < singles - base_each * n_labels; ++k) {
            add({static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n_labels)))});
        }
        // two fixed label pairs, repeated, so both split sides see the same
        // mixed-vocabulary patterns
        for (int k = 0; k < n_multi; ++k) {
            if (k % 2 == 0) add({0, 1});
            else add({2, 3});
        }
    }

    corpus::save_jsonl(all, dir + "/synthetic_full.jsonl");
    auto split = corpus::stratified_split(all, 0.8, seed);
    corpus::save_jsonl(split.train, dir + "/synthetic_train.jsonl");
    corpus::save_jsonl(split.test, dir + "/synthetic_test.jsonl");

    std::vector<CommentSentence> java_only;
    for (const auto& s : all) {
        if (s.language == Language::java) java_only.push_back(s);
    }
    corpus::save_jsonl(java_only, dir + "/synthetic_java.jsonl");
}

} // namespace ccb::harness
