#include "ccb/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ccb/error.hpp"
#include "ccb/rng.hpp"
#include "ccb/textio.hpp"

using nlohmann::json;

namespace ccb::corpus {

namespace {

const char* kLanguageNames[kLanguageCount] = {"java", "python", "pharo"};

// Label names match case- and separator-insensitively, so "Development notes",
// "development_notes" and "developmentnotes" all resolve to the same label.
std::string normalize_label(const std::string& name) {
    std::string out;
    for (char c : name) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) out += static_cast<char>(std::tolower(u));
    }
    return out;
}

LabelTaxonomy make_taxonomy(Language lang, std::vector<std::string> labels) {
    LabelTaxonomy t;
    t.language = lang;
    t.labels = std::move(labels);
    return t;
}

const std::vector<LabelTaxonomy>& taxonomies() {
    static const std::vector<LabelTaxonomy> all = {
        make_taxonomy(Language::java, {"deprecation", "expand", "ownership", "pointer",
                                       "rational", "summary", "usage"}),
        make_taxonomy(Language::python,
                      {"development_notes", "expand", "parameters", "summary", "usage"}),
        make_taxonomy(Language::pharo,
                      {"class_references", "collaborators", "example", "intent",
                       "key_implementation_points", "key_messages", "responsibilities"}),
    };
    return all;
}

} // namespace

const char* language_name(Language lang) {
    return kLanguageNames[static_cast<int>(lang)];
}

std::optional<Language> language_from_name(const std::string& name) {
    const std::string n = textio::lower(textio::trim(name));
    for (int i = 0; i < kLanguageCount; ++i) {
        if (n == kLanguageNames[i]) return static_cast<Language>(i);
    }
    return std::nullopt;
}

std::vector<Language> all_languages() {
    return {Language::java, Language::python, Language::pharo};
}

int LabelTaxonomy::index_of(const std::string& name) const {
    const std::string n = normalize_label(name);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (normalize_label(labels[i]) == n) return static_cast<int>(i);
    }
    return -1;
}

const LabelTaxonomy& taxonomy_for(Language lang) {
    return taxonomies()[static_cast<std::size_t>(lang)];
}

int total_label_count() {
    int n = 0;
    for (const auto& t : taxonomies()) n += t.size();
    return n;
}

void validate_sentence(const CommentSentence& sentence) {
    if (sentence.labels.empty()) {
        fail(ErrorKind::missing_label, "sentence " + sentence.id + " has no labels");
    }
    const auto& taxonomy = taxonomy_for(sentence.language);
    std::set<int> seen;
    for (int label : sentence.labels) {
        if (label < 0 || label >= taxonomy.size()) {
            fail(ErrorKind::unknown_label,
                 "sentence " + sentence.id + " label index " + std::to_string(label) +
                     " outside taxonomy of " + language_name(sentence.language));
        }
        if (!seen.insert(label).second) {
            fail(ErrorKind::unknown_label,
                 "sentence " + sentence.id + " repeats label " + std::to_string(label));
        }
    }
}

namespace {

void canonicalize_labels(std::vector<int>& labels) {
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
}

struct SentenceAccumulator {
    LoadResult result;
    std::set<std::string> ids;

    void add(CommentSentence sentence, std::size_t line) {
        canonicalize_labels(sentence.labels);
        if (!ids.insert(sentence.id).second) {
            result.issues.push_back({line, "DuplicateId", "duplicate id " + sentence.id});
            return;
        }
        result.sentences.push_back(std::move(sentence));
    }

    void issue(std::size_t line, const char* kind, std::string message) {
        result.issues.push_back({line, kind, std::move(message)});
    }
};

} // namespace

LoadResult load_jsonl_stream(std::istream& in, const std::string& origin) {
    SentenceAccumulator acc;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (textio::trim(line).empty()) continue;
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded() || !row.is_object()) {
            acc.issue(line_no, "ParseError", origin + ":" + std::to_string(line_no) + ": invalid JSON");
            continue;
        }
        if (!row.contains("id") || !row["id"].is_string() || !row.contains("language") ||
            !row["language"].is_string() || !row.contains("text") || !row["text"].is_string() ||
            !row.contains("labels") || !row["labels"].is_array()) {
            acc.issue(line_no, "ParseError",
                      origin + ":" + std::to_string(line_no) +
                          ": expected keys id, language, text, labels");
            continue;
        }
        auto lang = language_from_name(row["language"].get<std::string>());
        if (!lang) {
            acc.issue(line_no, "ParseError",
                      origin + ":" + std::to_string(line_no) + ": unknown language '" +
                          row["language"].get<std::string>() + "'");
            continue;
        }
        CommentSentence s;
        s.id = row["id"].get<std::string>();
        s.language = *lang;
        s.text = row["text"].get<std::string>();
        const auto& taxonomy = taxonomy_for(s.language);
        bool ok = true;
        for (const auto& label : row["labels"]) {
            if (!label.is_string()) {
                acc.issue(line_no, "ParseError",
                          origin + ":" + std::to_string(line_no) + ": labels must be strings");
                ok = false;
                break;
            }
            int idx = taxonomy.index_of(label.get<std::string>());
            if (idx < 0) {
                acc.issue(line_no, "UnknownLabel",
                          origin + ":" + std::to_string(line_no) + ": label '" +
                              label.get<std::string>() + "' not in " +
                              language_name(s.language) + " taxonomy");
                ok = false;
                break;
            }
            s.labels.push_back(idx);
        }
        if (!ok) continue;
        if (s.labels.empty()) {
            acc.issue(line_no, "MissingLabel",
                      origin + ":" + std::to_string(line_no) + ": empty label set");
            continue;
        }
        acc.add(std::move(s), line_no);
    }
    return std::move(acc.result);
}

LoadResult load_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open " + path);
    return load_jsonl_stream(in, path);
}

void save_jsonl(const std::vector<CommentSentence>& sentences, const std::string& path) {
    std::ostringstream out;
    for (const auto& s : sentences) {
        const auto& taxonomy = taxonomy_for(s.language);
        json labels = json::array();
        for (int idx : s.labels) labels.push_back(taxonomy.labels[static_cast<std::size_t>(idx)]);
        json row = {{"id", s.id},
                    {"language", language_name(s.language)},
                    {"text", s.text},
                    {"labels", labels}};
        out << row.dump() << '\n';
    }
    textio::write_file(path, out.str());
}

CsvColumnMap csv_column_map_from_json(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        fail(ErrorKind::parse, "column map must be a JSON object");
    }
    CsvColumnMap map;
    map.id_column = j.value("id_column", "");
    map.text_column = j.value("text_column", "");
    if (j.contains("label_columns")) {
        for (const auto& c : j["label_columns"]) map.label_columns.push_back(c.get<std::string>());
    }
    map.label_list_column = j.value("label_list_column", "");
    map.delimiter = j.value("delimiter", "|");
    if (j.contains("language")) {
        auto lang = language_from_name(j["language"].get<std::string>());
        if (!lang) fail(ErrorKind::parse, "column map: unknown language");
        map.language = lang;
    }
    map.language_column = j.value("language_column", "");
    if (map.id_column.empty() || map.text_column.empty()) {
        fail(ErrorKind::parse, "column map needs id_column and text_column");
    }
    if (map.label_columns.empty() == map.label_list_column.empty()) {
        fail(ErrorKind::parse, "column map needs exactly one of label_columns / label_list_column");
    }
    if (!map.language && map.language_column.empty()) {
        fail(ErrorKind::parse, "column map needs language or language_column");
    }
    return map;
}

namespace {

bool truthy_cell(const std::string& cell, bool* ok) {
    const std::string v = textio::lower(textio::trim(cell));
    *ok = true;
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v.empty() || v == "0" || v == "false" || v == "no") return false;
    *ok = false;
    return false;
}

} // namespace

LoadResult load_csv(const std::string& path, const CsvColumnMap& map) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open " + path);

    std::string header_line;
    if (!std::getline(in, header_line)) fail(ErrorKind::parse, path + ": empty CSV");
    const auto header = textio::csv_split(header_line);
    auto column_of = [&](const std::string& name) -> int {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (textio::trim(header[i]) == name) return static_cast<int>(i);
        }
        return -1;
    };

    const int id_col = column_of(map.id_column);
    const int text_col = column_of(map.text_column);
    if (id_col < 0) fail(ErrorKind::parse, path + ": missing column " + map.id_column);
    if (text_col < 0) fail(ErrorKind::parse, path + ": missing column " + map.text_column);
    int lang_col = -1;
    if (!map.language_column.empty()) {
        lang_col = column_of(map.language_column);
        if (lang_col < 0) fail(ErrorKind::parse, path + ": missing column " + map.language_column);
    }
    std::vector<int> label_cols;
    for (const auto& name : map.label_columns) {
        int c = column_of(name);
        if (c < 0) fail(ErrorKind::parse, path + ": missing label column " + name);
        label_cols.push_back(c);
    }
    int list_col = -1;
    if (!map.label_list_column.empty()) {
        list_col = column_of(map.label_list_column);
        if (list_col < 0) fail(ErrorKind::parse, path + ": missing column " + map.label_list_column);
    }

    SentenceAccumulator acc;
    std::string line;
    std::size_t line_no = 1; // header consumed
    while (std::getline(in, line)) {
        ++line_no;
        if (textio::trim(line).empty()) continue;
        const auto cells = textio::csv_split(line);
        auto cell = [&](int col) -> std::string {
            return col >= 0 && col < static_cast<int>(cells.size()) ? cells[static_cast<std::size_t>(col)] : "";
        };

        Language lang;
        if (map.language) {
            lang = *map.language;
        } else {
            auto parsed = language_from_name(cell(lang_col));
            if (!parsed) {
                acc.issue(line_no, "ParseError",
                          path + ":" + std::to_string(line_no) + ": unknown language '" +
                              cell(lang_col) + "'");
                continue;
            }
            lang = *parsed;
        }
        const auto& taxonomy = taxonomy_for(lang);

        CommentSentence s;
        s.id = textio::trim(cell(id_col));
        s.language = lang;
        s.text = cell(text_col);
        if (s.id.empty()) {
            acc.issue(line_no, "ParseError", path + ":" + std::to_string(line_no) + ": empty id");
            continue;
        }

        bool ok = true;
        if (list_col >= 0) {
            if (map.delimiter.empty()) fail(ErrorKind::parse, "column map: empty delimiter");
            for (const auto& part : textio::split(cell(list_col), map.delimiter[0])) {
                const std::string name = textio::trim(part);
                if (name.empty()) continue;
                int idx = taxonomy.index_of(name);
                if (idx < 0) {
                    acc.issue(line_no, "UnknownLabel",
                              path + ":" + std::to_string(line_no) + ": label '" + name +
                                  "' not in " + language_name(lang) + " taxonomy");
                    ok = false;
                    break;
                }
                s.labels.push_back(idx);
            }
        } else {
            for (std::size_t k = 0; k < label_cols.size(); ++k) {
                bool cell_ok = false;
                const bool set = truthy_cell(cell(label_cols[k]), &cell_ok);
                if (!cell_ok) {
                    acc.issue(line_no, "ParseError",
                              path + ":" + std::to_string(line_no) + ": one-hot cell '" +
                                  cell(label_cols[k]) + "' in column " + map.label_columns[k]);
                    ok = false;
                    break;
                }
                if (!set) continue;
                int idx = taxonomy.index_of(map.label_columns[k]);
                if (idx < 0) {
                    acc.issue(line_no, "UnknownLabel",
                              path + ":" + std::to_string(line_no) + ": label column '" +
                                  map.label_columns[k] + "' not in " + language_name(lang) +
                                  " taxonomy");
                    ok = false;
                    break;
                }
                s.labels.push_back(idx);
            }
        }
        if (!ok) continue;
        if (s.labels.empty()) {
            acc.issue(line_no, "MissingLabel",
                      path + ":" + std::to_string(line_no) + ": empty label set");
            continue;
        }
        acc.add(std::move(s), line_no);
    }
    return std::move(acc.result);
}

// ---------------------------------------------------------------------------
// Stratified split: iterative stratification, rarest label first. Sentences
// are assigned to the side whose remaining per-label desire is larger; ties
// fall back to the remaining side capacity, then to train.
// ---------------------------------------------------------------------------

SplitDataset stratified_split(const std::vector<CommentSentence>& sentences,
                              double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        fail(ErrorKind::invalid_argument, "split ratio must be in (0,1)");
    }

    SplitDataset out;
    out.ratio = ratio;
    out.seed = seed;

    std::vector<int> side(sentences.size(), -1); // 0 = train, 1 = test

    for (Language lang : all_languages()) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < sentences.size(); ++i) {
            if (sentences[i].language == lang) members.push_back(i);
        }
        if (members.empty()) continue;
        if (members.size() < 2) {
            fail(ErrorKind::invalid_argument,
                 std::string("stratified_split: need at least 2 ") + language_name(lang) +
                     " sentences");
        }
        for (std::size_t i : members) validate_sentence(sentences[i]);

        const auto& taxonomy = taxonomy_for(lang);
        const std::size_t n_labels = static_cast<std::size_t>(taxonomy.size());
        std::vector<std::size_t> label_count(n_labels, 0);
        for (std::size_t i : members) {
            for (int l : sentences[i].labels) ++label_count[static_cast<std::size_t>(l)];
        }

        std::vector<double> desire_train(n_labels), desire_test(n_labels);
        for (std::size_t l = 0; l < n_labels; ++l) {
            desire_train[l] = ratio * static_cast<double>(label_count[l]);
            desire_test[l] = (1.0 - ratio) * static_cast<double>(label_count[l]);
            if (label_count[l] == 1) {
                out.degenerate_labels.push_back(std::string(language_name(lang)) + "/" +
                                                taxonomy.labels[l]);
            }
        }
        double capacity_train = ratio * static_cast<double>(members.size());
        double capacity_test = (1.0 - ratio) * static_cast<double>(members.size());

        std::vector<int> label_order(static_cast<int>(n_labels));
        for (std::size_t l = 0; l < n_labels; ++l) label_order[l] = static_cast<int>(l);
        std::stable_sort(label_order.begin(), label_order.end(), [&](int a, int b) {
            return label_count[static_cast<std::size_t>(a)] < label_count[static_cast<std::size_t>(b)];
        });

        Rng rng = Rng(seed).fork(static_cast<std::uint64_t>(lang));

        auto assign = [&](std::size_t idx, int chosen) {
            side[idx] = chosen;
            for (int l : sentences[idx].labels) {
                auto ul = static_cast<std::size_t>(l);
                (chosen == 0 ? desire_train[ul] : desire_test[ul]) -= 1.0;
            }
            (chosen == 0 ? capacity_train : capacity_test) -= 1.0;
        };

        for (int l : label_order) {
            const auto ul = static_cast<std::size_t>(l);
            std::vector<std::size_t> pending;
            for (std::size_t i : members) {
                if (side[i] != -1) continue;
                const auto& labels = sentences[i].labels;
                if (std::find(labels.begin(), labels.end(), l) != labels.end()) pending.push_back(i);
            }
            rng.shuffle(pending);
            for (std::size_t idx : pending) {
                int chosen;
                if (label_count[ul] == 1) {
                    chosen = 0; // single-positive labels stay in train
                } else if (desire_train[ul] > desire_test[ul]) {
                    chosen = 0;
                } else if (desire_test[ul] > desire_train[ul]) {
                    chosen = 1;
                } else {
                    chosen = capacity_test > capacity_train ? 1 : 0;
                }
                assign(idx, chosen);
            }
        }
    }

    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (side[i] == 0) out.train.push_back(sentences[i]);
        else if (side[i] == 1) out.test.push_back(sentences[i]);
    }
    return out;
}

CorpusSummary corpus_summary(const std::vector<CommentSentence>& sentences) {
    CorpusSummary summary;
    for (Language lang : all_languages()) {
        LanguageSummary ls;
        ls.language = lang;
        ls.label_counts.assign(static_cast<std::size_t>(taxonomy_for(lang).size()), 0);
        summary.languages.push_back(std::move(ls));
    }
    for (const auto& s : sentences) {
        auto& ls = summary.languages[static_cast<std::size_t>(s.language)];
        ++ls.sentence_count;
        if (s.labels.size() >= 2) ++ls.multi_label_count;
        for (int l : s.labels) ++ls.label_counts[static_cast<std::size_t>(l)];
    }
    return summary;
}

std::size_t CorpusSummary::total_sentences() const {
    std::size_t n = 0;
    for (const auto& ls : languages) n += ls.sentence_count;
    return n;
}

double CorpusSummary::multi_label_fraction() const {
    std::size_t total = total_sentences();
    if (total == 0) return 0.0;
    std::size_t multi = 0;
    for (const auto& ls : languages) multi += ls.multi_label_count;
    return static_cast<double>(multi) / static_cast<double>(total);
}

void write_summary_csv(const CorpusSummary& summary, const std::string& path) {
    std::ostringstream out;
    out << "language,label,count\n";
    for (const auto& ls : summary.languages) {
        const auto& taxonomy = taxonomy_for(ls.language);
        for (std::size_t l = 0; l < ls.label_counts.size(); ++l) {
            out << language_name(ls.language) << ',' << taxonomy.labels[l] << ','
                << ls.label_counts[l] << '\n';
        }
        out << language_name(ls.language) << ",(sentences)," << ls.sentence_count << '\n';
        out << language_name(ls.language) << ",(multi_label)," << ls.multi_label_count << '\n';
    }
    textio::write_file(path, out.str());
}

} // namespace ccb::corpus
