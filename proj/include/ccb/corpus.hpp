#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ccb::corpus {

enum class Language { java = 0, python = 1, pharo = 2 };

inline constexpr int kLanguageCount = 3;

const char* language_name(Language lang);
std::optional<Language> language_from_name(const std::string& name);
std::vector<Language> all_languages();

// Built-in label taxonomy of one language. Labels are referenced by index
// everywhere else; names only matter at the file boundary.
struct LabelTaxonomy {
    Language language;
    std::vector<std::string> labels;

    int size() const { return static_cast<int>(labels.size()); }
    // Index of a label name, or -1 when unknown.
    int index_of(const std::string& name) const;
};

const LabelTaxonomy& taxonomy_for(Language lang);

// Total number of (language, label) slots across all taxonomies: 7 + 5 + 7.
int total_label_count();

struct CommentSentence {
    std::string id;
    Language language = Language::java;
    std::string text;
    std::vector<int> labels; // sorted, unique, non-empty, valid taxonomy indices
};

// Throws on violated invariants (empty/duplicate/out-of-range labels).
void validate_sentence(const CommentSentence& sentence);

// One malformed input row. `line` is 1-based.
struct RowIssue {
    std::size_t line = 0;
    std::string kind; // "MissingLabel", "UnknownLabel", "ParseError", "DuplicateId"
    std::string message;
};

struct LoadResult {
    std::vector<CommentSentence> sentences;
    std::vector<RowIssue> issues;

    bool clean() const { return issues.empty(); }
};

// Canonical format: one JSON object per line with keys id, language, text,
// labels (array of label names). Invalid rows are collected, not fatal.
LoadResult load_jsonl(const std::string& path);
LoadResult load_jsonl_stream(std::istream& in, const std::string& origin);

void save_jsonl(const std::vector<CommentSentence>& sentences, const std::string& path);

// Adapter for arbitrary CSV layouts. Exactly one of label_columns /
// label_list_column must be set; language comes from a fixed value or a column.
struct CsvColumnMap {
    std::string id_column;
    std::string text_column;
    std::vector<std::string> label_columns; // one-hot; header names are label names
    std::string label_list_column;
    std::string delimiter = "|";           // separator inside label_list_column
    std::optional<Language> language;      // fixed language for the whole file
    std::string language_column;           // or read per row
};

CsvColumnMap csv_column_map_from_json(const std::string& json_text);

LoadResult load_csv(const std::string& path, const CsvColumnMap& map);

struct SplitDataset {
    std::vector<CommentSentence> train;
    std::vector<CommentSentence> test;
    double ratio = 0.8;
    std::uint64_t seed = 0;
    // Labels with too few positives to land on both sides, e.g. "java/ownership".
    std::vector<std::string> degenerate_labels;
};

// Iterative stratification, per language, rarest label first. Deterministic
// in (sentences, ratio, seed). Labels with a single positive go to train.
SplitDataset stratified_split(const std::vector<CommentSentence>& sentences,
                              double ratio, std::uint64_t seed);

struct LanguageSummary {
    Language language;
    std::size_t sentence_count = 0;
    std::size_t multi_label_count = 0;        // sentences with >= 2 labels
    std::vector<std::size_t> label_counts;    // one entry per taxonomy label
};

struct CorpusSummary {
    std::vector<LanguageSummary> languages;   // always java, python, pharo

    std::size_t total_sentences() const;
    double multi_label_fraction() const;      // over all sentences
};

CorpusSummary corpus_summary(const std::vector<CommentSentence>& sentences);

// language,label,count rows plus per-language sentence totals.
void write_summary_csv(const CorpusSummary& summary, const std::string& path);

} // namespace ccb::corpus
