#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccb/corpus.hpp"

namespace ccb::pairgen {

enum class Polarity { positive, negative };

// positive => label sets intersect, negative => label sets disjoint.
struct ContrastivePair {
    std::string a_id;
    std::string b_id;
    Polarity polarity = Polarity::positive;

    bool operator==(const ContrastivePair&) const = default;
};

struct PairPlan {
    std::uint32_t num_iterations = 20;
    std::uint64_t seed = 0;
};

// Per iteration every sentence anchors one positive and one negative pair,
// partners drawn uniformly from the qualifying sentences (never itself), so
// |result| = num_iterations * |train| * 2 with an exact half/half polarity
// split. Preconditions are checked for every sentence before any pair is
// emitted; a sentence without a disjoint partner aborts the run rather than
// relaxing the polarity rule.
std::vector<ContrastivePair> generate_pairs(
    const std::vector<corpus::CommentSentence>& train, const PairPlan& plan);

// TSV rows "a_id\tb_id\t1|0" (1 = positive). Round-trip stable.
void export_pairs(const std::vector<ContrastivePair>& pairs, const std::string& path);
std::vector<ContrastivePair> load_pairs(const std::string& path);

} // namespace ccb::pairgen
