#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ccb/error.hpp"
#include "ccb/score.hpp"
#include "ccb/textio.hpp"
#include "support/reference_results.hpp"

using namespace ccb;
using namespace ccb::score;

TEST_CASE("reference benchmark rows reproduce within 5e-4") {
    for (const auto& row : ccb_test::reference_rows()) {
        const auto b = submission_score({row.avg_f1, row.avg_runtime_s, row.avg_gflops});
        INFO(row.name);
        CHECK(std::abs(b.total - row.published_score) <= 5e-4);
    }
}

TEST_CASE("perfect F1 with zero cost scores exactly 1") {
    const auto b = submission_score({1.0, 0.0, 0.0});
    CHECK(b.total == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.f1_term == doctest::Approx(0.6));
    CHECK(b.runtime_term == doctest::Approx(0.2));
    CHECK(b.gflops_term == doctest::Approx(0.2));
}

TEST_CASE("terms sum to the total and are never clamped") {
    const auto b = submission_score({0.6921, 3.5339, 18489.3073});
    CHECK(b.total == b.f1_term + b.runtime_term + b.gflops_term);
    CHECK(b.gflops_term < 0.0); // budget overrun goes negative
    CHECK(std::abs(b.total - (-0.0657)) <= 5e-4);
}

TEST_CASE("score moves the right way in every input") {
    const SubmissionInputs base{0.5, 1.0, 1000.0};
    const double t0 = submission_score(base).total;
    CHECK(submission_score({0.6, 1.0, 1000.0}).total > t0);
    CHECK(submission_score({0.5, 2.0, 1000.0}).total < t0);
    CHECK(submission_score({0.5, 1.0, 2000.0}).total < t0);
}

TEST_CASE("one second and one thousand GFLOPS are each worth 0.04") {
    const SubmissionInputs base{0.6394, 0.9422, 999.0271};
    const double t0 = submission_score(base).total;
    CHECK(std::abs((submission_score({base.avg_f1, base.avg_runtime_s + 1.0, base.avg_gflops}).total - t0) -
                   (-0.04)) < 1e-12);
    CHECK(std::abs((submission_score({base.avg_f1, base.avg_runtime_s, base.avg_gflops + 1000.0}).total - t0) -
                   (-0.04)) < 1e-12);
    // 6.66..% F1 buys the same 0.04 back
    CHECK(std::abs((submission_score({base.avg_f1 + 1.0 / 15.0, base.avg_runtime_s, base.avg_gflops}).total - t0) -
                   0.04) < 1e-9);
}

TEST_CASE("non-finite inputs are rejected") {
    CHECK_THROWS_AS((void)submission_score({std::nan(""), 0.0, 0.0}), Error);
    CHECK_THROWS_AS((void)submission_score({0.5, HUGE_VAL, 0.0}), Error);
}

TEST_CASE("rank orders by total, then F1, then name") {
    std::vector<NamedScore> scores;
    for (const auto& row : ccb_test::reference_rows()) {
        NamedScore s;
        s.name = row.name;
        s.inputs = {row.avg_f1, row.avg_runtime_s, row.avg_gflops};
        s.breakdown = submission_score(s.inputs);
        scores.push_back(s);
    }
    const auto ranked = rank(scores);
    CHECK(ranked.front().name == std::string("python all-MiniLM-L6-v2 rf4"));
    // in the embedding-model stage the baselines beat every other candidate
    std::vector<NamedScore> stage1(scores.begin(), scores.begin() + 16);
    CHECK(rank(stage1).front().name == std::string("baselines it20"));

    // tie on total: higher F1 first, then name
    NamedScore a{"bbb", {0.5, 0.0, 0.0}, submission_score({0.5, 0.0, 0.0}), "ok"};
    NamedScore b{"aaa", {0.5, 0.0, 0.0}, submission_score({0.5, 0.0, 0.0}), "ok"};
    NamedScore c{"ccc", {0.6, 1.5, 0.0}, {}, "ok"};
    c.breakdown = submission_score(c.inputs);
    REQUIRE(c.breakdown.total == doctest::Approx(a.breakdown.total).epsilon(1e-12));
    // force exact tie for a clean check
    c.breakdown.total = a.breakdown.total;
    auto out = rank({a, b, c});
    CHECK(out[0].name == "ccc");
    CHECK(out[1].name == "aaa");
    CHECK(out[2].name == "bbb");

    CHECK(rank({}).empty());
}

TEST_CASE("breakdown export writes one parseable row per configuration") {
    NamedScore one{"only", {0.5, 1.0, 100.0}, submission_score({0.5, 1.0, 100.0}), "ok"};
    const std::string path = "breakdown_test.csv";
    breakdown_export({one}, path);

    std::ifstream in(path);
    std::string header, row, extra;
    REQUIRE(std::getline(in, header));
    CHECK(header == "name,f1_term,runtime_term,gflops_term,total");
    REQUIRE(std::getline(in, row));
    CHECK_FALSE(std::getline(in, extra));

    const auto cells = textio::csv_split(row);
    REQUIRE(cells.size() == 5);
    const double f1_term = std::stod(cells[1]);
    const double runtime_term = std::stod(cells[2]);
    const double gflops_term = std::stod(cells[3]);
    const double total = std::stod(cells[4]);
    CHECK(std::abs(f1_term + runtime_term + gflops_term - total) < 1e-12);
}

TEST_CASE("gflops term sign flips between small and huge budgets") {
    NamedScore cheap{"cheap", {0.6394, 0.9422, 999.0271}, submission_score({0.6394, 0.9422, 999.0271}), "ok"};
    NamedScore costly{"costly", {0.6921, 3.5339, 18489.3073}, submission_score({0.6921, 3.5339, 18489.3073}), "ok"};
    CHECK(cheap.breakdown.gflops_term > 0.0);
    CHECK(costly.breakdown.gflops_term < 0.0);
}
