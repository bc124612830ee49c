#include "ccb/score.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ccb/error.hpp"
#include "ccb/textio.hpp"

namespace ccb::score {

ScoreBreakdown submission_score(const SubmissionInputs& inputs,
                                const ScoreConstants& constants) {
    if (!std::isfinite(inputs.avg_f1) || !std::isfinite(inputs.avg_runtime_s) ||
        !std::isfinite(inputs.avg_gflops)) {
        fail(ErrorKind::non_finite, "submission_score: non-finite input");
    }
    ScoreBreakdown b;
    b.f1_term = constants.f1_weight * inputs.avg_f1;
    b.runtime_term = constants.runtime_weight *
                     (constants.runtime_budget_s - inputs.avg_runtime_s) /
                     constants.runtime_budget_s;
    b.gflops_term = constants.gflops_weight *
                    (constants.gflops_budget - inputs.avg_gflops) /
                    constants.gflops_budget;
    b.total = b.f1_term + b.runtime_term + b.gflops_term;
    return b;
}

void breakdown_export(const std::vector<NamedScore>& scores, const std::string& path) {
    std::ostringstream out;
    out << "name,f1_term,runtime_term,gflops_term,total\n";
    for (const auto& s : scores) {
        out << textio::csv_escape(s.name) << ','
            << textio::format_double(s.breakdown.f1_term) << ','
            << textio::format_double(s.breakdown.runtime_term) << ','
            << textio::format_double(s.breakdown.gflops_term) << ','
            << textio::format_double(s.breakdown.total) << '\n';
    }
    textio::write_file(path, out.str());
}

std::vector<NamedScore> rank(std::vector<NamedScore> scores) {
    std::stable_sort(scores.begin(), scores.end(),
                     [](const NamedScore& a, const NamedScore& b) {
                         if (a.breakdown.total != b.breakdown.total)
                             return a.breakdown.total > b.breakdown.total;
                         if (a.inputs.avg_f1 != b.inputs.avg_f1)
                             return a.inputs.avg_f1 > b.inputs.avg_f1;
                         return a.name < b.name;
                     });
    return scores;
}

void write_leaderboard_csv(const std::vector<NamedScore>& ranked, const std::string& path) {
    std::ostringstream out;
    out << "name,avg_f1,avg_runtime_s,avg_gflops,f1_term,runtime_term,gflops_term,total,status\n";
    for (const auto& s : ranked) {
        out << textio::csv_escape(s.name) << ','
            << textio::format_double(s.inputs.avg_f1) << ','
            << textio::format_double(s.inputs.avg_runtime_s) << ','
            << textio::format_double(s.inputs.avg_gflops) << ','
            << textio::format_double(s.breakdown.f1_term) << ','
            << textio::format_double(s.breakdown.runtime_term) << ','
            << textio::format_double(s.breakdown.gflops_term) << ','
            << textio::format_double(s.breakdown.total) << ','
            << s.status << '\n';
    }
    textio::write_file(path, out.str());
}

} // namespace ccb::score
