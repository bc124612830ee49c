#include "ccb/featurize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ccb/error.hpp"
#include "ccb/rng.hpp"
#include "ccb/textio.hpp"

namespace ccb::featurize {

namespace {

bool token_char(unsigned char c) {
    // ASCII alphanumerics plus any non-ASCII byte, so UTF-8 text survives.
    return std::isalnum(c) || c >= 0x80;
}

void strip_marker(std::string& text, const std::string& marker) {
    std::size_t pos = 0;
    while ((pos = text.find(marker, pos)) != std::string::npos) {
        text.replace(pos, marker.size(), " ");
    }
}

} // namespace

TokenSequence preprocess(const std::string& text) {
    std::string work = textio::lower(text);
    // longest first so "/**" never leaves a dangling "*"
    strip_marker(work, "/**");
    strip_marker(work, "*/");
    strip_marker(work, "//");
    strip_marker(work, "#");

    TokenSequence tokens;
    std::string cur;
    for (unsigned char c : work) {
        if (token_char(c)) {
            cur += static_cast<char>(c);
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

Vocabulary build_vocabulary(const std::vector<TokenSequence>& train, int min_df) {
    if (min_df < 1) fail(ErrorKind::invalid_argument, "min_df must be >= 1");

    std::unordered_map<std::string, int> doc_freq;
    std::vector<std::string> first_seen;
    for (const auto& doc : train) {
        std::unordered_map<std::string, bool> in_doc;
        for (const auto& token : doc) {
            if (in_doc.emplace(token, true).second) {
                auto [it, inserted] = doc_freq.emplace(token, 0);
                if (inserted) first_seen.push_back(token);
                ++it->second;
            }
        }
    }

    Vocabulary vocab;
    vocab.min_df = min_df;
    for (const auto& token : first_seen) {
        if (doc_freq[token] >= min_df) {
            vocab.index.emplace(token, vocab.size());
            vocab.tokens.push_back(token);
        }
    }
    if (vocab.tokens.empty()) {
        fail(ErrorKind::empty_vocabulary,
             "no token reaches document frequency " + std::to_string(min_df));
    }
    return vocab;
}

int SparseCountVector::total_count() const {
    int n = 0;
    for (const auto& [idx, count] : entries) n += count;
    return n;
}

SparseCountVector bow_vector(const TokenSequence& tokens, const Vocabulary& vocab) {
    if (vocab.size() == 0) fail(ErrorKind::empty_vocabulary, "bow_vector: empty vocabulary");
    std::vector<int> counts(static_cast<std::size_t>(vocab.size()), 0);
    for (const auto& token : tokens) {
        int idx = vocab.lookup(token);
        if (idx >= 0) ++counts[static_cast<std::size_t>(idx)];
    }
    SparseCountVector v;
    v.dim = vocab.size();
    for (int i = 0; i < vocab.size(); ++i) {
        if (counts[static_cast<std::size_t>(i)] > 0) {
            v.entries.emplace_back(i, counts[static_cast<std::size_t>(i)]);
        }
    }
    return v;
}

const DenseEmbedding& EmbeddingTable::lookup(const std::string& id) const {
    auto it = vectors.find(id);
    if (it == vectors.end()) {
        fail(ErrorKind::invalid_argument, "no embedding for sentence id '" + id + "'");
    }
    return it->second;
}

EmbeddingTable load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open " + path);

    std::string header;
    if (!std::getline(in, header)) fail(ErrorKind::parse, path + ": empty embedding file");
    EmbeddingTable table;
    {
        std::istringstream hs(header);
        std::string dim_kv;
        hs >> dim_kv;
        if (dim_kv.rfind("dim=", 0) != 0) {
            fail(ErrorKind::parse, path + ": header must start with dim=<int>");
        }
        try {
            table.dim = std::stoi(dim_kv.substr(4));
        } catch (const std::exception&) {
            fail(ErrorKind::parse, path + ": bad dim value '" + dim_kv + "'");
        }
        if (table.dim < 1) fail(ErrorKind::parse, path + ": dim must be >= 1");
        const std::string rest = textio::trim(header.substr(header.find(dim_kv) + dim_kv.size()));
        if (rest.rfind("provenance=", 0) == 0) table.provenance = rest.substr(11);
    }

    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            fail(ErrorKind::parse, path + ":" + std::to_string(line_no) + ": missing tab separator");
        }
        const std::string id = line.substr(0, tab);
        if (table.vectors.count(id)) {
            fail(ErrorKind::duplicate_id, path + ":" + std::to_string(line_no) + ": duplicate id '" + id + "'");
        }
        DenseEmbedding vec;
        vec.reserve(static_cast<std::size_t>(table.dim));
        std::istringstream vs(line.substr(tab + 1));
        double value;
        while (vs >> value) vec.push_back(value);
        if (!vs.eof()) {
            fail(ErrorKind::parse, path + ":" + std::to_string(line_no) + ": bad float in row '" + id + "'");
        }
        if (static_cast<int>(vec.size()) != table.dim) {
            fail(ErrorKind::dim_mismatch,
                 path + ":" + std::to_string(line_no) + ": row '" + id + "' has " +
                     std::to_string(vec.size()) + " values, header says " + std::to_string(table.dim));
        }
        for (double v : vec) {
            if (!std::isfinite(v)) {
                fail(ErrorKind::non_finite,
                     path + ":" + std::to_string(line_no) + ": non-finite value in row '" + id + "'");
            }
        }
        table.vectors.emplace(id, std::move(vec));
    }
    return table;
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
    std::ostringstream out;
    out << "dim=" << table.dim << " provenance=" << table.provenance << '\n';
    // sorted by id for a stable on-disk layout
    std::vector<const std::string*> ids;
    ids.reserve(table.vectors.size());
    for (const auto& [id, vec] : table.vectors) ids.push_back(&id);
    std::sort(ids.begin(), ids.end(), [](const auto* a, const auto* b) { return *a < *b; });
    for (const auto* id : ids) {
        out << *id << '\t';
        const auto& vec = table.vectors.at(*id);
        for (std::size_t i = 0; i < vec.size(); ++i) {
            if (i) out << ' ';
            out << textio::format_double(vec[i]);
        }
        out << '\n';
    }
    textio::write_file(path, out.str());
}

DenseEmbedding hashed_embedding(const TokenSequence& tokens, int dim, std::uint64_t seed) {
    if (dim < 1) fail(ErrorKind::invalid_argument, "hashed_embedding: dim must be >= 1");
    DenseEmbedding vec(static_cast<std::size_t>(dim), 0.0);
    // independent salts for bucket and sign
    const std::uint64_t index_salt = seed * 0x9e3779b97f4a7c15ULL + 0x6a09e667f3bcc909ULL;
    const std::uint64_t sign_salt = seed * 0xc2b2ae3d27d4eb4fULL + 0xbb67ae8584caa73bULL;
    for (const auto& token : tokens) {
        const std::uint64_t h_index = fnv1a64(token.data(), token.size(), index_salt);
        const std::uint64_t h_sign = fnv1a64(token.data(), token.size(), sign_salt);
        const auto bucket = static_cast<std::size_t>(h_index % static_cast<std::uint64_t>(dim));
        vec[bucket] += (h_sign & 1u) ? 1.0 : -1.0;
    }
    double norm_sq = 0.0;
    for (double v : vec) norm_sq += v * v;
    if (norm_sq > 0.0) {
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (double& v : vec) v *= inv;
    }
    return vec;
}

} // namespace ccb::featurize
