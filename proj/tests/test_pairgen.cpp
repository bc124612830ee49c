#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "ccb/error.hpp"
#include "ccb/pairgen.hpp"
#include "ccb/rng.hpp"

using namespace ccb;
using namespace ccb::pairgen;
using corpus::CommentSentence;
using corpus::Language;

namespace {

CommentSentence make(const std::string& id, std::vector<int> labels) {
    CommentSentence s;
    s.id = id;
    s.language = Language::java;
    s.text = id;
    s.labels = std::move(labels);
    std::sort(s.labels.begin(), s.labels.end());
    return s;
}

bool intersects(const std::vector<int>& a, const std::vector<int>& b) {
    for (int x : a) {
        for (int y : b) {
            if (x == y) return true;
        }
    }
    return false;
}

std::vector<CommentSentence> two_cluster_corpus(int n) {
    std::vector<CommentSentence> out;
    for (int i = 0; i < n; ++i) out.push_back(make("s" + std::to_string(i), {i % 2 == 0 ? 0 : 1}));
    return out;
}

} // namespace

TEST_CASE("pair count identity: iterations x sentences x 2") {
    const auto corpus = two_cluster_corpus(100);
    const auto pairs = generate_pairs(corpus, {20, 7});
    CHECK(pairs.size() == 20u * 100u * 2u);

    std::size_t positives = 0;
    for (const auto& p : pairs) positives += p.polarity == Polarity::positive;
    CHECK(positives == pairs.size() / 2);
}

TEST_CASE("zero iterations yields an empty list on any corpus") {
    CHECK(generate_pairs(two_cluster_corpus(10), {0, 1}).empty());
    // even one that could never satisfy the partner preconditions
    std::vector<CommentSentence> shared = {make("a", {0}), make("b", {0})};
    CHECK(generate_pairs(shared, {0, 1}).empty());
}

TEST_CASE("every emitted pair satisfies its polarity predicate") {
    std::vector<CommentSentence> corpus = {
        make("a", {0}),       make("b", {0, 1}), make("c", {1}),
        make("d", {2}),       make("e", {2, 3}), make("f", {3}),
        make("g", {0, 4}),    make("h", {4}),
    };
    std::map<std::string, std::vector<int>> by_id;
    for (const auto& s : corpus) by_id[s.id] = s.labels;

    const auto pairs = generate_pairs(corpus, {15, 3});
    CHECK(pairs.size() == 15u * corpus.size() * 2u);
    for (const auto& p : pairs) {
        CHECK(p.a_id != p.b_id);
        const bool shared = intersects(by_id[p.a_id], by_id[p.b_id]);
        CHECK(shared == (p.polarity == Polarity::positive));
    }
}

TEST_CASE("per iteration, every sentence anchors one pair of each polarity") {
    const auto corpus = two_cluster_corpus(8);
    const auto pairs = generate_pairs(corpus, {4, 11});
    std::map<std::string, int> pos_count, neg_count;
    for (const auto& p : pairs) {
        (p.polarity == Polarity::positive ? pos_count : neg_count)[p.a_id]++;
    }
    for (const auto& s : corpus) {
        CHECK(pos_count[s.id] == 4);
        CHECK(neg_count[s.id] == 4);
    }
}

TEST_CASE("a shared common label aborts with NoNegativePartner") {
    std::vector<CommentSentence> corpus = {make("a", {0, 1}), make("b", {0, 2}), make("c", {0})};
    try {
        (void)generate_pairs(corpus, {1, 1});
        FAIL("expected NoNegativePartner");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::no_negative_partner);
    }
}

TEST_CASE("an isolated label set aborts with NoPositivePartner") {
    std::vector<CommentSentence> corpus = {make("a", {0}), make("b", {0}), make("c", {1})};
    try {
        (void)generate_pairs(corpus, {1, 1});
        FAIL("expected NoPositivePartner");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::no_positive_partner);
    }
}

TEST_CASE("equal seeds give identical pair lists, different seeds differ") {
    const auto corpus = two_cluster_corpus(30);
    const auto a = generate_pairs(corpus, {6, 123});
    const auto b = generate_pairs(corpus, {6, 123});
    CHECK(a == b);
    const auto c = generate_pairs(corpus, {6, 124});
    CHECK(a != c);
}

TEST_CASE("pair export round-trips through the tsv format") {
    const auto corpus = two_cluster_corpus(12);
    const auto pairs = generate_pairs(corpus, {2, 5});
    const std::string path = "pairs_test.tsv";
    export_pairs(pairs, path);
    CHECK(load_pairs(path) == pairs);

    export_pairs({}, path);
    CHECK(load_pairs(path).empty());

    export_pairs({{"x", "y", Polarity::positive}, {"y", "z", Polarity::negative}}, path);
    std::ifstream in(path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 2);
}
