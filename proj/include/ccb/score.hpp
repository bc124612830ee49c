#pragma once

#include <string>
#include <vector>

namespace ccb::score {

struct ScoreConstants {
    double f1_weight = 0.6;
    double runtime_weight = 0.2;
    double gflops_weight = 0.2;
    double runtime_budget_s = 5.0;
    double gflops_budget = 5000.0;
};

struct SubmissionInputs {
    double avg_f1 = 0.0;
    double avg_runtime_s = 0.0;
    double avg_gflops = 0.0;
};

// Terms are never clamped; budget overruns go negative.
struct ScoreBreakdown {
    double f1_term = 0.0;
    double runtime_term = 0.0;
    double gflops_term = 0.0;
    double total = 0.0; // f1_term + runtime_term + gflops_term
};

// total = 0.6*f1 + 0.2*(5 - runtime)/5 + 0.2*(5000 - gflops)/5000
// with the weights and budgets taken from `constants`. Throws NonFinite on
// non-finite inputs.
ScoreBreakdown submission_score(const SubmissionInputs& inputs,
                                const ScoreConstants& constants = {});

struct NamedScore {
    std::string name;
    SubmissionInputs inputs;
    ScoreBreakdown breakdown;
    std::string status = "ok"; // grid points that failed carry "failed"
};

// name,f1_term,runtime_term,gflops_term,total; full-precision values so the
// term/total identity survives a parse round-trip.
void breakdown_export(const std::vector<NamedScore>& scores, const std::string& path);

// Descending by total, ties broken by higher avg_f1, then by name.
std::vector<NamedScore> rank(std::vector<NamedScore> scores);

// name,avg_f1,avg_runtime_s,avg_gflops,f1_term,runtime_term,gflops_term,total.
void write_leaderboard_csv(const std::vector<NamedScore>& ranked, const std::string& path);

} // namespace ccb::score
