#include "ccbench.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ccb/corpus.hpp"
#include "ccb/error.hpp"
#include "ccb/harness.hpp"
#include "ccb/pairgen.hpp"
#include "ccb/score.hpp"
#include "ccb/textio.hpp"

// Opaque handle bodies. The C surface owns plain heap objects; everything
// else lives in the C++ core.
struct ccb_corpus {
    std::vector<ccb::corpus::CommentSentence> sentences;
};

namespace {

thread_local std::string g_last_error;

ccb_status status_of(ccb::ErrorKind kind) {
    switch (kind) {
        case ccb::ErrorKind::io: return CCB_ERR_IO;
        case ccb::ErrorKind::parse: return CCB_ERR_PARSE;
        case ccb::ErrorKind::invalid_argument: return CCB_ERR_INVALID_ARGUMENT;
        case ccb::ErrorKind::missing_label: return CCB_ERR_MISSING_LABEL;
        case ccb::ErrorKind::unknown_label: return CCB_ERR_UNKNOWN_LABEL;
        case ccb::ErrorKind::dim_mismatch: return CCB_ERR_DIM_MISMATCH;
        case ccb::ErrorKind::duplicate_id: return CCB_ERR_DUPLICATE_ID;
        case ccb::ErrorKind::no_positive_partner: return CCB_ERR_NO_POSITIVE_PARTNER;
        case ccb::ErrorKind::no_negative_partner: return CCB_ERR_NO_NEGATIVE_PARTNER;
        case ccb::ErrorKind::single_class: return CCB_ERR_SINGLE_CLASS;
        case ccb::ErrorKind::no_convergence: return CCB_ERR_NO_CONVERGENCE;
        case ccb::ErrorKind::non_finite: return CCB_ERR_NON_FINITE;
        case ccb::ErrorKind::empty_vocabulary: return CCB_ERR_EMPTY_VOCABULARY;
        case ccb::ErrorKind::length_mismatch: return CCB_ERR_LENGTH_MISMATCH;
        case ccb::ErrorKind::missing_label_score: return CCB_ERR_MISSING_LABEL_SCORE;
        case ccb::ErrorKind::wrong_language_count: return CCB_ERR_WRONG_LANGUAGE_COUNT;
        case ccb::ErrorKind::seq_too_long: return CCB_ERR_SEQ_TOO_LONG;
    }
    return CCB_ERR_UNKNOWN;
}

template <typename Fn>
ccb_status guarded(Fn&& fn) {
    try {
        fn();
        return CCB_OK;
    } catch (const ccb::Error& e) {
        g_last_error = e.what();
        return status_of(e.kind());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CCB_ERR_UNKNOWN;
    } catch (...) {
        g_last_error = "unknown error";
        return CCB_ERR_UNKNOWN;
    }
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

ccb_status require(bool condition, const char* message) {
    if (condition) return CCB_OK;
    g_last_error = message;
    return CCB_ERR_INVALID_ARGUMENT;
}

std::string join_issues(const std::vector<ccb::corpus::RowIssue>& issues) {
    std::ostringstream out;
    for (std::size_t i = 0; i < issues.size(); ++i) {
        if (i) out << '\n';
        out << issues[i].kind << ": " << issues[i].message;
    }
    return out.str();
}

ccb::harness::Config build_config(const char* config_path, const char* const* overrides,
                                  size_t n_overrides) {
    ccb::harness::Config config = config_path != nullptr
                                      ? ccb::harness::Config::from_file(config_path)
                                      : ccb::harness::Config::from_text("");
    std::vector<std::string> assignments;
    for (size_t i = 0; i < n_overrides; ++i) assignments.emplace_back(overrides[i]);
    config.apply_overrides(assignments);
    return config;
}

} // namespace

extern "C" {

const char* ccb_version(void) { return "0.1.0"; }

const char* ccb_last_error(void) { return g_last_error.c_str(); }

void ccb_string_free(char* s) { delete[] s; }

ccb_status ccb_corpus_load_jsonl(const char* path, char** issues, ccb_corpus** out) {
    if (auto rc = require(path && out, "path and out must be non-NULL")) return rc;
    return guarded([&] {
        auto result = ccb::corpus::load_jsonl(path);
        if (issues) *issues = copy_string(join_issues(result.issues));
        *out = new ccb_corpus{std::move(result.sentences)};
    });
}

ccb_status ccb_corpus_load_csv(const char* path, const char* column_map_json, char** issues,
                               ccb_corpus** out) {
    if (auto rc = require(path && column_map_json && out, "path, column map and out must be non-NULL"))
        return rc;
    return guarded([&] {
        auto map = ccb::corpus::csv_column_map_from_json(column_map_json);
        auto result = ccb::corpus::load_csv(path, map);
        if (issues) *issues = copy_string(join_issues(result.issues));
        *out = new ccb_corpus{std::move(result.sentences)};
    });
}

ccb_status ccb_corpus_save_jsonl(const ccb_corpus* corpus, const char* path) {
    if (auto rc = require(corpus && path, "corpus and path must be non-NULL")) return rc;
    return guarded([&] { ccb::corpus::save_jsonl(corpus->sentences, path); });
}

size_t ccb_corpus_size(const ccb_corpus* corpus) {
    return corpus ? corpus->sentences.size() : 0;
}

ccb_status ccb_corpus_summary_csv(const ccb_corpus* corpus, const char* path) {
    if (auto rc = require(corpus && path, "corpus and path must be non-NULL")) return rc;
    return guarded([&] {
        ccb::corpus::write_summary_csv(ccb::corpus::corpus_summary(corpus->sentences), path);
    });
}

ccb_status ccb_corpus_split(const ccb_corpus* corpus, double ratio, uint64_t seed,
                            ccb_corpus** train, ccb_corpus** test) {
    if (auto rc = require(corpus && train && test, "corpus, train and test must be non-NULL"))
        return rc;
    return guarded([&] {
        auto split = ccb::corpus::stratified_split(corpus->sentences, ratio, seed);
        *train = new ccb_corpus{std::move(split.train)};
        *test = new ccb_corpus{std::move(split.test)};
    });
}

void ccb_corpus_free(ccb_corpus* corpus) { delete corpus; }

ccb_status ccb_pairs_generate(const ccb_corpus* corpus, uint32_t iterations, uint64_t seed,
                              const char* out_path, uint64_t* pair_count) {
    if (auto rc = require(corpus && out_path, "corpus and out_path must be non-NULL")) return rc;
    return guarded([&] {
        auto pairs = ccb::pairgen::generate_pairs(corpus->sentences, {iterations, seed});
        ccb::pairgen::export_pairs(pairs, out_path);
        if (pair_count) *pair_count = pairs.size();
    });
}

ccb_status ccb_submission_score(double avg_f1, double avg_runtime_s, double avg_gflops,
                                ccb_score_breakdown* out) {
    if (auto rc = require(out != nullptr, "out must be non-NULL")) return rc;
    return guarded([&] {
        auto b = ccb::score::submission_score({avg_f1, avg_runtime_s, avg_gflops});
        out->f1_term = b.f1_term;
        out->runtime_term = b.runtime_term;
        out->gflops_term = b.gflops_term;
        out->total = b.total;
    });
}

ccb_status ccb_breakdown_export(const char* inputs_csv, const char* out_csv) {
    if (auto rc = require(inputs_csv && out_csv, "paths must be non-NULL")) return rc;
    return guarded([&] {
        std::ifstream in(inputs_csv, std::ios::binary);
        if (!in) ccb::fail(ccb::ErrorKind::io, std::string("cannot open ") + inputs_csv);
        std::string line;
        if (!std::getline(in, line)) {
            ccb::fail(ccb::ErrorKind::parse, std::string(inputs_csv) + ": empty file");
        }
        const auto header = ccb::textio::csv_split(line);
        const std::vector<std::string> expected = {"name", "avg_f1", "avg_runtime_s", "avg_gflops"};
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i >= header.size() || ccb::textio::trim(header[i]) != expected[i]) {
                ccb::fail(ccb::ErrorKind::parse,
                          std::string(inputs_csv) + ": header must be name,avg_f1,avg_runtime_s,avg_gflops");
            }
        }
        std::vector<ccb::score::NamedScore> rows;
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (ccb::textio::trim(line).empty()) continue;
            const auto cells = ccb::textio::csv_split(line);
            if (cells.size() < 4) {
                ccb::fail(ccb::ErrorKind::parse,
                          std::string(inputs_csv) + ":" + std::to_string(line_no) + ": expected 4 columns");
            }
            ccb::score::NamedScore row;
            row.name = cells[0];
            try {
                row.inputs = {std::stod(cells[1]), std::stod(cells[2]), std::stod(cells[3])};
            } catch (const std::exception&) {
                ccb::fail(ccb::ErrorKind::parse,
                          std::string(inputs_csv) + ":" + std::to_string(line_no) + ": bad number");
            }
            row.breakdown = ccb::score::submission_score(row.inputs);
            rows.push_back(std::move(row));
        }
        ccb::score::breakdown_export(rows, out_csv);
    });
}

ccb_status ccb_train(const char* config_path, const char* const* overrides, size_t n_overrides,
                     const char* model_out_path) {
    if (auto rc = require(n_overrides == 0 || overrides, "overrides array is NULL")) return rc;
    return guarded([&] {
        auto config = build_config(config_path, overrides, n_overrides);
        ccb::harness::train_models(config, model_out_path ? model_out_path : "");
    });
}

ccb_status ccb_evaluate(const char* config_path, const char* const* overrides, size_t n_overrides,
                        const char* model_path, char** run_dir) {
    if (auto rc = require(n_overrides == 0 || overrides, "overrides array is NULL")) return rc;
    return guarded([&] {
        auto config = build_config(config_path, overrides, n_overrides);
        ccb::harness::ExperimentResult result =
            model_path ? ccb::harness::evaluate_models(config, model_path)
                       : ccb::harness::run_experiment(config);
        if (run_dir) *run_dir = copy_string(result.run_dir);
    });
}

ccb_status ccb_grid_run(const char* config_path, const char* const* overrides, size_t n_overrides,
                        char** leaderboard_csv) {
    if (auto rc = require(n_overrides == 0 || overrides, "overrides array is NULL")) return rc;
    return guarded([&] {
        auto config = build_config(config_path, overrides, n_overrides);
        auto result = ccb::harness::run_grid(config);
        if (leaderboard_csv) *leaderboard_csv = copy_string(result.leaderboard_csv);
    });
}

ccb_status ccb_write_fixture(const char* dir, uint64_t seed) {
    if (auto rc = require(dir != nullptr, "dir must be non-NULL")) return rc;
    return guarded([&] { ccb::harness::write_synthetic_fixture(dir, seed); });
}

} // extern "C"
