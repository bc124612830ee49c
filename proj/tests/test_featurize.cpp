#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "ccb/error.hpp"
#include "ccb/featurize.hpp"
#include "ccb/rng.hpp"
#include "ccb/textio.hpp"

using namespace ccb;
using namespace ccb::featurize;

namespace {

// Reference tokenizer applying the declared rules one at a time, kept
// independent of the production implementation.
TokenSequence reference_preprocess(std::string text) {
    for (auto& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (const char* marker : {"/**", "*/", "//", "#"}) {
        std::string m = marker;
        std::size_t pos;
        while ((pos = text.find(m)) != std::string::npos) text.replace(pos, m.size(), " ");
    }
    TokenSequence tokens;
    std::string cur;
    for (unsigned char c : text) {
        const bool keep = std::isalnum(c) || c >= 0x80;
        if (keep) cur += static_cast<char>(c);
        else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

std::string join(const TokenSequence& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

} // namespace

TEST_CASE("preprocess strips markers, lowercases and splits") {
    CHECK(preprocess("// Returns the sum") == TokenSequence{"returns", "the", "sum"});
    CHECK(preprocess("").empty());
    CHECK(preprocess("   \t \n").empty());
    CHECK(preprocess("/** @param x THE Value */") == reference_preprocess("/** @param x THE Value */"));
    CHECK(preprocess("/** @param x THE Value */") == TokenSequence{"param", "x", "the", "value"});
    CHECK(preprocess("# todo: fix-me v2") == TokenSequence{"todo", "fix", "me", "v2"});
}

TEST_CASE("preprocess matches the reference tokenizer on assorted inputs") {
    const char* samples[] = {
        "//x//y",
        "a/**b*/c",
        "Foo.bar(baz, 12)",
        "## doubled # markers #",
        "some_snake_case and CamelCase",
        "trailing marker //",
        "/**/",
        "*/ leading",
    };
    for (const char* s : samples) {
        CHECK(preprocess(s) == reference_preprocess(s));
    }
}

TEST_CASE("preprocess is idempotent") {
    const char* samples[] = {"// Returns the sum", "/** @param x THE Value */",
                             "Mixed CASE text, with. punctuation!", "# python comment"};
    for (const char* s : samples) {
        const auto once = preprocess(s);
        CHECK(preprocess(join(once)) == once);
    }
}

TEST_CASE("vocabulary keeps first-occurrence order and applies min_df") {
    const std::vector<TokenSequence> docs = {{"a", "b"}, {"a"}};
    auto v1 = build_vocabulary(docs, 1);
    CHECK(v1.size() == 2);
    CHECK(v1.lookup("a") == 0);
    CHECK(v1.lookup("b") == 1);

    auto v2 = build_vocabulary(docs, 2);
    CHECK(v2.size() == 1);
    CHECK(v2.lookup("a") == 0);
    CHECK(v2.lookup("b") == -1);

    CHECK_THROWS_AS((void)build_vocabulary(docs, 3), Error);
    CHECK_THROWS_AS((void)build_vocabulary(docs, 0), Error);
}

TEST_CASE("vocabulary selection equals a brute-force document frequency count") {
    Rng rng(77);
    std::vector<TokenSequence> docs;
    for (int d = 0; d < 100; ++d) {
        TokenSequence doc;
        const int len = 1 + static_cast<int>(rng.bounded(8));
        for (int k = 0; k < len; ++k) doc.push_back("tok" + std::to_string(rng.bounded(30)));
        docs.push_back(doc);
    }
    std::map<std::string, int> df;
    for (const auto& doc : docs) {
        std::set<std::string> uniq(doc.begin(), doc.end());
        for (const auto& t : uniq) df[t]++;
    }
    const int min_df = 3;
    auto vocab = build_vocabulary(docs, min_df);
    std::set<std::string> expected;
    for (const auto& [token, count] : df) {
        if (count >= min_df) expected.insert(token);
    }
    CHECK(vocab.tokens.size() == expected.size());
    for (const auto& t : expected) CHECK(vocab.lookup(t) >= 0);
}

TEST_CASE("bow vectors count in-vocabulary tokens and drop the rest") {
    Vocabulary vocab;
    vocab.index = {{"a", 0}, {"b", 1}};
    vocab.tokens = {"a", "b"};

    auto v = bow_vector({"a", "a", "b"}, vocab);
    REQUIRE(v.entries.size() == 2);
    CHECK(v.entries[0] == std::pair<int, int>{0, 2});
    CHECK(v.entries[1] == std::pair<int, int>{1, 1});
    CHECK(v.dim == 2);

    CHECK(bow_vector({"z"}, vocab).entries.empty());
    CHECK(bow_vector({"b", "a", "a"}, vocab).entries == v.entries);

    // total mass never exceeds the token count
    CHECK(v.total_count() <= 3);
}

TEST_CASE("embedding files round-trip exactly") {
    EmbeddingTable table;
    table.dim = 3;
    table.provenance = "unit-test-encoder";
    table.vectors = {{"s1", {0.125, -2.5, 3.0e-7}}, {"s2", {1.0 / 3.0, 0.0, -1.0}}};
    const std::string path = "embeddings_test.txt";
    save_embeddings(table, path);
    const auto loaded = load_embeddings(path);
    CHECK(loaded.dim == 3);
    CHECK(loaded.provenance == "unit-test-encoder");
    REQUIRE(loaded.vectors.size() == 2);
    CHECK(loaded.vectors.at("s1") == table.vectors.at("s1"));
    CHECK(loaded.vectors.at("s2") == table.vectors.at("s2"));
}

TEST_CASE("embedding rows with the wrong arity name the row") {
    const std::string path = "embeddings_bad.txt";
    textio::write_file(path, "dim=384 provenance=x\nrow-a\t1 2 3\n");
    try {
        (void)load_embeddings(path);
        FAIL("expected DimMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::dim_mismatch);
        CHECK(std::string(e.what()).find("row-a") != std::string::npos);
    }

    textio::write_file(path, "dim=2 provenance=x\na\t1 2\na\t3 4\n");
    try {
        (void)load_embeddings(path);
        FAIL("expected DuplicateId");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::duplicate_id);
    }

    textio::write_file(path, "provenance=x dim=2\n");
    CHECK_THROWS_AS((void)load_embeddings(path), Error);

    textio::write_file(path, "dim=2 provenance=x\na\t1 nope\n");
    CHECK_THROWS_AS((void)load_embeddings(path), Error);
}

TEST_CASE("missing embedding ids are loud") {
    EmbeddingTable table;
    table.dim = 1;
    table.vectors = {{"known", {1.0}}};
    CHECK_NOTHROW((void)table.lookup("known"));
    CHECK_THROWS_AS((void)table.lookup("unknown"), Error);
}

TEST_CASE("hashed embeddings: zero on empty, unit norm otherwise, order-free") {
    CHECK(hashed_embedding({}, 8, 1) == DenseEmbedding(8, 0.0));

    const TokenSequence tokens = {"alpha", "beta", "beta", "gamma"};
    const auto v = hashed_embedding(tokens, 64, 9);
    double norm = 0.0;
    for (double x : v) norm += x * x;
    CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-9);

    const TokenSequence permuted = {"beta", "gamma", "beta", "alpha"};
    CHECK(hashed_embedding(permuted, 64, 9) == v);

    // different seeds give different layouts
    CHECK(hashed_embedding(tokens, 64, 10) != v);
    CHECK_THROWS_AS((void)hashed_embedding(tokens, 0, 1), Error);
}
