#include "ccb/metrics.hpp"

#include <algorithm>
#include <sstream>

#include "ccb/error.hpp"
#include "ccb/textio.hpp"

namespace ccb::metrics {

namespace {

bool has_label(const std::vector<int>& labels, int label) {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
}

} // namespace

ConfusionCounts confusion(const std::vector<std::vector<int>>& truth,
                          const std::vector<std::vector<int>>& predicted, int label) {
    if (truth.size() != predicted.size()) {
        fail(ErrorKind::length_mismatch,
             "confusion: " + std::to_string(truth.size()) + " truth rows vs " +
                 std::to_string(predicted.size()) + " predictions");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool t = has_label(truth[i], label);
        const bool p = has_label(predicted[i], label);
        if (t && p) ++c.tp;
        else if (!t && p) ++c.fp;
        else if (t && !p) ++c.fn;
        else ++c.tn;
    }
    return c;
}

LabelScore f1_score(const ConfusionCounts& counts, int label) {
    LabelScore s;
    s.label = label;
    const double tp = static_cast<double>(counts.tp);
    s.precision = (counts.tp + counts.fp == 0) ? 0.0 : tp / (tp + static_cast<double>(counts.fp));
    s.recall = (counts.tp + counts.fn == 0) ? 0.0 : tp / (tp + static_cast<double>(counts.fn));
    s.f1 = (s.precision + s.recall == 0.0) ? 0.0
                                           : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

AggregateReport aggregate(const std::vector<std::vector<LabelScore>>& per_language,
                          F1Aggregation mode) {
    if (per_language.size() != static_cast<std::size_t>(corpus::kLanguageCount)) {
        fail(ErrorKind::missing_label_score,
             "aggregate: expected scores for all " + std::to_string(corpus::kLanguageCount) +
                 " languages, got " + std::to_string(per_language.size()));
    }
    for (int lang = 0; lang < corpus::kLanguageCount; ++lang) {
        const auto& taxonomy = corpus::taxonomy_for(static_cast<corpus::Language>(lang));
        const auto& scores = per_language[static_cast<std::size_t>(lang)];
        if (static_cast<int>(scores.size()) != taxonomy.size()) {
            fail(ErrorKind::missing_label_score,
                 std::string("aggregate: ") + corpus::language_name(static_cast<corpus::Language>(lang)) +
                     " has " + std::to_string(scores.size()) + " label scores, taxonomy has " +
                     std::to_string(taxonomy.size()));
        }
        std::vector<bool> seen(static_cast<std::size_t>(taxonomy.size()), false);
        for (const auto& s : scores) {
            if (s.label < 0 || s.label >= taxonomy.size() || seen[static_cast<std::size_t>(s.label)]) {
                fail(ErrorKind::missing_label_score, "aggregate: duplicate or out-of-range label index");
            }
            seen[static_cast<std::size_t>(s.label)] = true;
        }
    }

    AggregateReport report;
    report.per_language = per_language;
    report.aggregation = mode;
    if (mode == F1Aggregation::flat_labels) {
        double sum = 0.0;
        int n = 0;
        for (const auto& scores : per_language) {
            for (const auto& s : scores) {
                sum += s.f1;
                ++n;
            }
        }
        report.avg_f1 = n == 0 ? 0.0 : sum / n;
    } else {
        double sum = 0.0;
        for (const auto& scores : per_language) {
            double lang_sum = 0.0;
            for (const auto& s : scores) lang_sum += s.f1;
            sum += scores.empty() ? 0.0 : lang_sum / static_cast<double>(scores.size());
        }
        report.avg_f1 = sum / static_cast<double>(per_language.size());
    }
    return report;
}

void write_report_csv(const AggregateReport& report, const std::string& path) {
    std::ostringstream out;
    out << "language,label,precision,recall,f1\n";
    for (std::size_t lang = 0; lang < report.per_language.size(); ++lang) {
        const auto& taxonomy = corpus::taxonomy_for(static_cast<corpus::Language>(lang));
        for (const auto& s : report.per_language[lang]) {
            out << corpus::language_name(static_cast<corpus::Language>(lang)) << ','
                << textio::csv_escape(taxonomy.labels[static_cast<std::size_t>(s.label)]) << ','
                << textio::format_double(s.precision) << ','
                << textio::format_double(s.recall) << ','
                << textio::format_double(s.f1) << '\n';
        }
    }
    out << "all,average,,," << textio::format_double(report.avg_f1) << '\n';
    textio::write_file(path, out.str());
}

} // namespace ccb::metrics
