#include "ccb/model_io.hpp"

#include <limits>

#include <nlohmann/json.hpp>

#include "ccb/error.hpp"

using nlohmann::json;

namespace ccb::model_io {

namespace {

constexpr int kModelVersion = 1;

json tree_to_json(const heads::DecisionTree& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
        nodes.push_back({{"leaf", n.is_leaf},
                         {"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"value", n.value}});
    }
    return {{"max_depth", tree.max_depth}, {"nodes", nodes}};
}

heads::DecisionTree tree_from_json(const json& j) {
    heads::DecisionTree tree;
    tree.max_depth = j.at("max_depth").get<int>();
    for (const auto& n : j.at("nodes")) {
        heads::TreeNode node;
        node.is_leaf = n.at("leaf").get<bool>();
        node.feature = n.at("feature").get<int>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<int>();
        node.right = n.at("right").get<int>();
        node.value = n.at("value").get<double>();
        tree.nodes.push_back(node);
    }
    return tree;
}

json head_to_json(const heads::BinaryHead& head) {
    return std::visit(
        [](const auto& h) -> json {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, heads::LogisticHead>) {
                return {{"type", "logistic"},
                        {"weights", h.weights},
                        {"bias", h.bias},
                        {"C", h.C}};
            } else if constexpr (std::is_same_v<T, heads::SvmHead>) {
                return {{"type", "svm"},
                        {"kernel", heads::kernel_name(h.params.kernel)},
                        {"gamma", h.params.gamma},
                        {"coef0", h.params.coef0},
                        {"degree", h.params.degree},
                        {"C", h.C},
                        {"support_vectors", h.support_vectors},
                        {"dual_coefs", h.dual_coefs},
                        {"bias", h.bias},
                        {"platt_a", h.platt_a},
                        {"platt_b", h.platt_b}};
            } else if constexpr (std::is_same_v<T, heads::ForestHead>) {
                json trees = json::array();
                for (const auto& t : h.trees) trees.push_back(tree_to_json(t));
                return {{"type", "forest"},
                        {"max_depth", h.max_depth},
                        {"seed", h.seed},
                        {"trees", trees}};
            } else if constexpr (std::is_same_v<T, heads::BoostedHead>) {
                json trees = json::array();
                for (const auto& t : h.trees) trees.push_back(tree_to_json(t));
                return {{"type", "boosted"},
                        {"initial_log_odds", h.initial_log_odds},
                        {"shrinkage", h.shrinkage},
                        {"max_depth", h.max_depth},
                        {"trees", trees}};
            } else {
                return {{"type", "constant"}, {"prob", h.prob}};
            }
        },
        head);
}

heads::BinaryHead head_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "logistic") {
        heads::LogisticHead h;
        h.weights = j.at("weights").get<std::vector<double>>();
        h.bias = j.at("bias").get<double>();
        h.C = j.at("C").get<double>();
        return h;
    }
    if (type == "svm") {
        heads::SvmHead h;
        auto kernel = heads::kernel_from_name(j.at("kernel").get<std::string>());
        if (!kernel) fail(ErrorKind::parse, "model: unknown kernel");
        h.params.kernel = *kernel;
        h.params.gamma = j.at("gamma").get<double>();
        h.params.coef0 = j.at("coef0").get<double>();
        h.params.degree = j.at("degree").get<int>();
        h.C = j.at("C").get<double>();
        h.support_vectors = j.at("support_vectors").get<heads::FeatureMatrix>();
        h.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
        h.bias = j.at("bias").get<double>();
        h.platt_a = j.at("platt_a").get<double>();
        h.platt_b = j.at("platt_b").get<double>();
        return h;
    }
    if (type == "forest") {
        heads::ForestHead h;
        h.max_depth = j.at("max_depth").get<int>();
        h.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& t : j.at("trees")) h.trees.push_back(tree_from_json(t));
        return h;
    }
    if (type == "boosted") {
        heads::BoostedHead h;
        h.initial_log_odds = j.at("initial_log_odds").get<double>();
        h.shrinkage = j.at("shrinkage").get<double>();
        h.max_depth = j.at("max_depth").get<int>();
        for (const auto& t : j.at("trees")) h.trees.push_back(tree_from_json(t));
        return h;
    }
    if (type == "constant") {
        return heads::ConstantHead{j.at("prob").get<double>()};
    }
    fail(ErrorKind::parse, "model: unknown head type '" + type + "'");
}

json classifier_to_json_value(const heads::OneVsRestClassifier& clf) {
    json j = {{"version", kModelVersion},
              {"head_kind", heads::head_kind_name(clf.head_kind)},
              {"n_labels", clf.n_labels},
              {"feature_dim", clf.feature_dim},
              {"threshold", clf.threshold},
              {"constant_negative_labels", clf.constant_negative_labels}};
    if (clf.nb) {
        j["naive_bayes"] = {{"log_priors", clf.nb->log_priors},
                            {"log_likelihood", clf.nb->log_likelihood},
                            {"alpha", clf.nb->alpha},
                            {"vocab_size", clf.nb->vocab_size}};
    } else {
        json heads_json = json::array();
        for (const auto& head : clf.heads) heads_json.push_back(head_to_json(head));
        j["heads"] = heads_json;
    }
    return j;
}

heads::OneVsRestClassifier classifier_from_json_value(const json& j) {
    if (j.at("version").get<int>() != kModelVersion) {
        fail(ErrorKind::parse, "model: unsupported version");
    }
    heads::OneVsRestClassifier clf;
    auto kind = heads::head_kind_from_name(j.at("head_kind").get<std::string>());
    if (!kind) fail(ErrorKind::parse, "model: unknown head kind");
    clf.head_kind = *kind;
    clf.n_labels = j.at("n_labels").get<int>();
    clf.feature_dim = j.at("feature_dim").get<int>();
    clf.threshold = j.at("threshold").get<double>();
    clf.constant_negative_labels = j.at("constant_negative_labels").get<std::vector<int>>();
    if (j.contains("naive_bayes")) {
        heads::NaiveBayesModel nb;
        const auto& njson = j.at("naive_bayes");
        // -inf priors (zero-document classes) dump as JSON null
        for (const auto& p : njson.at("log_priors")) {
            nb.log_priors.push_back(p.is_null() ? -std::numeric_limits<double>::infinity()
                                                : p.get<double>());
        }
        nb.log_likelihood = njson.at("log_likelihood").get<std::vector<std::vector<double>>>();
        nb.alpha = njson.at("alpha").get<double>();
        nb.vocab_size = njson.at("vocab_size").get<int>();
        clf.nb = std::move(nb);
    } else {
        for (const auto& h : j.at("heads")) clf.heads.push_back(head_from_json(h));
    }
    return clf;
}

} // namespace

std::string classifier_to_json(const heads::OneVsRestClassifier& clf) {
    return classifier_to_json_value(clf).dump();
}

heads::OneVsRestClassifier classifier_from_json(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::parse, "model: invalid JSON");
    try {
        return classifier_from_json_value(j);
    } catch (const json::exception& e) {
        fail(ErrorKind::parse, std::string("model: ") + e.what());
    }
}

std::string vocabulary_to_json(const featurize::Vocabulary& vocab) {
    json j = {{"version", kModelVersion}, {"min_df", vocab.min_df}, {"tokens", vocab.tokens}};
    return j.dump();
}

featurize::Vocabulary vocabulary_from_json(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::parse, "vocabulary: invalid JSON");
    featurize::Vocabulary vocab;
    try {
        vocab.min_df = j.at("min_df").get<int>();
        vocab.tokens = j.at("tokens").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        fail(ErrorKind::parse, std::string("vocabulary: ") + e.what());
    }
    for (std::size_t i = 0; i < vocab.tokens.size(); ++i) {
        vocab.index.emplace(vocab.tokens[i], static_cast<int>(i));
    }
    return vocab;
}

} // namespace ccb::model_io
