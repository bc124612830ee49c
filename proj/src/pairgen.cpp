#include "ccb/pairgen.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ccb/error.hpp"
#include "ccb/rng.hpp"
#include "ccb/textio.hpp"

namespace ccb::pairgen {

namespace {

bool labels_intersect(const std::vector<int>& a, const std::vector<int>& b) {
    // both sorted
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        if (a[i] < b[j]) ++i;
        else ++j;
    }
    return false;
}

} // namespace

std::vector<ContrastivePair> generate_pairs(
    const std::vector<corpus::CommentSentence>& train, const PairPlan& plan) {
    const std::size_t n = train.size();
    if (plan.num_iterations == 0) return {};

    // Partner existence is checked for every anchor up front; nothing is
    // emitted when any anchor would have to violate the polarity rule.
    for (std::size_t i = 0; i < n; ++i) {
        bool has_positive = false, has_negative = false;
        for (std::size_t j = 0; j < n && !(has_positive && has_negative); ++j) {
            if (i == j) continue;
            if (labels_intersect(train[i].labels, train[j].labels)) has_positive = true;
            else has_negative = true;
        }
        if (!has_positive) {
            fail(ErrorKind::no_positive_partner,
                 "sentence " + train[i].id + " shares no label with any other sentence");
        }
        if (!has_negative) {
            fail(ErrorKind::no_negative_partner,
                 "sentence " + train[i].id + " has no label-disjoint partner");
        }
    }

    std::vector<ContrastivePair> pairs;
    pairs.reserve(static_cast<std::size_t>(plan.num_iterations) * n * 2);

    Rng base(plan.seed);
    for (std::uint32_t iter = 0; iter < plan.num_iterations; ++iter) {
        Rng rng = base.fork(iter); // per-iteration stream
        for (std::size_t i = 0; i < n; ++i) {
            for (Polarity polarity : {Polarity::positive, Polarity::negative}) {
                const bool want_intersect = polarity == Polarity::positive;
                std::size_t partner = n;
                // rejection sampling is uniform over the qualifying set
                for (int attempt = 0; attempt < 64; ++attempt) {
                    std::size_t j = static_cast<std::size_t>(rng.bounded(n));
                    if (j == i) continue;
                    if (labels_intersect(train[i].labels, train[j].labels) == want_intersect) {
                        partner = j;
                        break;
                    }
                }
                if (partner == n) {
                    // sparse qualifying set: enumerate it and draw directly
                    std::vector<std::size_t> candidates;
                    for (std::size_t j = 0; j < n; ++j) {
                        if (j == i) continue;
                        if (labels_intersect(train[i].labels, train[j].labels) == want_intersect) {
                            candidates.push_back(j);
                        }
                    }
                    partner = candidates[static_cast<std::size_t>(rng.bounded(candidates.size()))];
                }
                pairs.push_back({train[i].id, train[partner].id, polarity});
            }
        }
    }
    return pairs;
}

void export_pairs(const std::vector<ContrastivePair>& pairs, const std::string& path) {
    std::ostringstream out;
    for (const auto& p : pairs) {
        out << p.a_id << '\t' << p.b_id << '\t' << (p.polarity == Polarity::positive ? '1' : '0')
            << '\n';
    }
    textio::write_file(path, out.str());
}

std::vector<ContrastivePair> load_pairs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open " + path);
    std::vector<ContrastivePair> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = textio::split(line, '\t');
        if (fields.size() != 3 || (fields[2] != "0" && fields[2] != "1")) {
            fail(ErrorKind::parse, path + ":" + std::to_string(line_no) + ": expected a_id\\tb_id\\t0|1");
        }
        pairs.push_back({fields[0], fields[1],
                         fields[2] == "1" ? Polarity::positive : Polarity::negative});
    }
    return pairs;
}

} // namespace ccb::pairgen
