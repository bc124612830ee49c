#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace ccb::featurize {

using TokenSequence = std::vector<std::string>;

// Lowercase, strip the comment markers  /**  */  //  #  and split on
// whitespace and punctuation boundaries. Digits stay; empty tokens never
// appear. Idempotent on its own output.
TokenSequence preprocess(const std::string& text);

struct Vocabulary {
    std::unordered_map<std::string, int> index; // token -> contiguous id
    std::vector<std::string> tokens;            // id -> token, first-occurrence order
    int min_df = 1;

    int size() const { return static_cast<int>(tokens.size()); }
    // -1 for out-of-vocabulary tokens.
    int lookup(const std::string& token) const {
        auto it = index.find(token);
        return it == index.end() ? -1 : it->second;
    }
};

// Tokens ordered by first occurrence in the training sequences; tokens whose
// document frequency is below min_df are excluded. Throws EmptyVocabulary
// when nothing survives.
Vocabulary build_vocabulary(const std::vector<TokenSequence>& train, int min_df);

struct SparseCountVector {
    std::vector<std::pair<int, int>> entries; // (index, count), indices increasing
    int dim = 0;

    int total_count() const;
};

SparseCountVector bow_vector(const TokenSequence& tokens, const Vocabulary& vocab);

using DenseEmbedding = std::vector<double>;

struct EmbeddingTable {
    std::unordered_map<std::string, DenseEmbedding> vectors; // sentence id -> vector
    int dim = 0;
    std::string provenance; // encoder name

    // Throws when the id is absent: lookups never silently substitute.
    const DenseEmbedding& lookup(const std::string& id) const;
};

// File format: first line "dim=<int> provenance=<string>", then one row per
// sentence: "<id>\t<v1> <v2> ... <vdim>".
EmbeddingTable load_embeddings(const std::string& path);
void save_embeddings(const EmbeddingTable& table, const std::string& path);

// Signed feature hashing: every token lands on (index, sign) buckets derived
// from two independent hashes, counts accumulate, result is L2-normalized.
// Empty input maps to the zero vector. Order-independent and deterministic
// in (token multiset, dim, seed).
DenseEmbedding hashed_embedding(const TokenSequence& tokens, int dim, std::uint64_t seed);

} // namespace ccb::featurize
