/* ccbench — multi-label code-comment classification benchmark library.
 *
 * C interface over the C++ core: opaque handles, integer status codes,
 * thread-local error messages. Every function returns CCB_OK (0) on success;
 * on failure ccb_last_error() describes what went wrong on this thread.
 *
 * Strings returned through char** out-parameters are heap-allocated and must
 * be released with ccb_string_free().
 */
#ifndef CCBENCH_H
#define CCBENCH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ccb_status {
    CCB_OK = 0,
    CCB_ERR_IO = 1,
    CCB_ERR_PARSE = 2,
    CCB_ERR_INVALID_ARGUMENT = 3,
    CCB_ERR_MISSING_LABEL = 4,
    CCB_ERR_UNKNOWN_LABEL = 5,
    CCB_ERR_DIM_MISMATCH = 6,
    CCB_ERR_DUPLICATE_ID = 7,
    CCB_ERR_NO_POSITIVE_PARTNER = 8,
    CCB_ERR_NO_NEGATIVE_PARTNER = 9,
    CCB_ERR_SINGLE_CLASS = 10,
    CCB_ERR_NO_CONVERGENCE = 11,
    CCB_ERR_NON_FINITE = 12,
    CCB_ERR_EMPTY_VOCABULARY = 13,
    CCB_ERR_LENGTH_MISMATCH = 14,
    CCB_ERR_MISSING_LABEL_SCORE = 15,
    CCB_ERR_WRONG_LANGUAGE_COUNT = 16,
    CCB_ERR_SEQ_TOO_LONG = 17,
    CCB_ERR_UNKNOWN = 99
} ccb_status;

typedef struct ccb_corpus ccb_corpus; /* opaque: list of labeled sentences */

const char* ccb_version(void);

/* Message for the most recent failure on the calling thread; never NULL. */
const char* ccb_last_error(void);

void ccb_string_free(char* s);

/* ---- corpus ------------------------------------------------------------ */

/* Canonical JSONL. Rows violating the schema are skipped; *issues (optional)
 * receives a newline-separated report with 1-based line numbers and is empty
 * on a clean load. */
ccb_status ccb_corpus_load_jsonl(const char* path, char** issues, ccb_corpus** out);

/* CSV with a JSON column map: {"id_column","text_column","label_columns" |
 * "label_list_column"+"delimiter","language" | "language_column"}. */
ccb_status ccb_corpus_load_csv(const char* path, const char* column_map_json,
                               char** issues, ccb_corpus** out);

ccb_status ccb_corpus_save_jsonl(const ccb_corpus* corpus, const char* path);

size_t ccb_corpus_size(const ccb_corpus* corpus);

/* Per-language, per-label counts as CSV. */
ccb_status ccb_corpus_summary_csv(const ccb_corpus* corpus, const char* path);

/* Stratified 80/20-style split, deterministic in seed. */
ccb_status ccb_corpus_split(const ccb_corpus* corpus, double ratio, uint64_t seed,
                            ccb_corpus** train, ccb_corpus** test);

void ccb_corpus_free(ccb_corpus* corpus);

/* ---- contrastive pairs -------------------------------------------------- */

/* Writes iterations * |corpus| * 2 pairs as TSV "a_id\tb_id\t1|0";
 * *pair_count (optional) receives the number written. */
ccb_status ccb_pairs_generate(const ccb_corpus* corpus, uint32_t iterations,
                              uint64_t seed, const char* out_path,
                              uint64_t* pair_count);

/* ---- scoring ------------------------------------------------------------ */

typedef struct ccb_score_breakdown {
    double f1_term;
    double runtime_term;
    double gflops_term;
    double total;
} ccb_score_breakdown;

/* total = 0.6*f1 + 0.2*(5-runtime)/5 + 0.2*(5000-gflops)/5000, unclamped. */
ccb_status ccb_submission_score(double avg_f1, double avg_runtime_s,
                                double avg_gflops, ccb_score_breakdown* out);

/* inputs_csv: header name,avg_f1,avg_runtime_s,avg_gflops; writes per-term
 * contribution rows to out_csv. */
ccb_status ccb_breakdown_export(const char* inputs_csv, const char* out_csv);

/* ---- experiments --------------------------------------------------------
 * config_path may be NULL when every needed key arrives via overrides;
 * overrides are "section.key=value" strings and win over file values. */

ccb_status ccb_train(const char* config_path, const char* const* overrides,
                     size_t n_overrides, const char* model_out_path);

/* Runs the full train/evaluate/measure/score pipeline; *run_dir (optional)
 * receives the output directory. If model_path is non-NULL, evaluation uses
 * the saved model instead of training. */
ccb_status ccb_evaluate(const char* config_path, const char* const* overrides,
                        size_t n_overrides, const char* model_path, char** run_dir);

/* Sweeps the configured hyperparameter grid; *leaderboard_csv (optional)
 * receives the path of the ranked leaderboard. */
ccb_status ccb_grid_run(const char* config_path, const char* const* overrides,
                        size_t n_overrides, char** leaderboard_csv);

/* Writes the deterministic 3-language demo corpus into dir. */
ccb_status ccb_write_fixture(const char* dir, uint64_t seed);

#ifdef __cplusplus
}
#endif

#endif /* CCBENCH_H */
