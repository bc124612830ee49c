#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccb/corpus.hpp"

namespace ccb::metrics {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
};

// Per-label binary counts over parallel truth/prediction label-set lists.
ConfusionCounts confusion(const std::vector<std::vector<int>>& truth,
                          const std::vector<std::vector<int>>& predicted, int label);

struct LabelScore {
    int label = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Zero-division convention: P=0 when tp+fp=0, R=0 when tp+fn=0, F1=0 when P+R=0.
LabelScore f1_score(const ConfusionCounts& counts, int label = 0);

enum class F1Aggregation {
    flat_labels,        // mean over all 19 (language,label) scores
    per_language_macro, // mean of per-language macro means
};

struct AggregateReport {
    // Indexed by language (java, python, pharo); one score per taxonomy label.
    std::vector<std::vector<LabelScore>> per_language;
    double avg_f1 = 0.0;
    F1Aggregation aggregation = F1Aggregation::flat_labels;
};

// Requires exactly the taxonomy's labels for every language; throws
// MissingLabelScore otherwise.
AggregateReport aggregate(const std::vector<std::vector<LabelScore>>& per_language,
                          F1Aggregation mode = F1Aggregation::flat_labels);

// language,label,precision,recall,f1 rows plus a trailing avg_f1 summary row.
void write_report_csv(const AggregateReport& report, const std::string& path);

} // namespace ccb::metrics
