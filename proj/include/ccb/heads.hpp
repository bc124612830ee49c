#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ccb/featurize.hpp"

namespace ccb::heads {

using FeatureRow = std::vector<double>;
using FeatureMatrix = std::vector<FeatureRow>;

// ---------------------------------------------------------------------------
// Logistic regression
//
// Minimizes  0.5*||w||^2 + C * sum_i log(1 + exp(-y_i * (w.x_i + b)))
// with y in {-1,+1} and an unregularized bias, i.e. C is the inverse
// regularization strength. Solved by gradient descent with backtracking line
// search, so the objective is non-increasing across iterations.
// ---------------------------------------------------------------------------

struct LogisticHead {
    std::vector<double> weights;
    double bias = 0.0;
    double C = 1.0;

    double decision(const FeatureRow& x) const;
    double predict_prob(const FeatureRow& x) const; // sigmoid(decision)
};

double logistic_objective(const LogisticHead& head, const FeatureMatrix& X,
                          const std::vector<int>& y01);
// Gradient of the objective w.r.t. (weights..., bias); last entry is the bias.
std::vector<double> logistic_gradient(const LogisticHead& head, const FeatureMatrix& X,
                                      const std::vector<int>& y01);

LogisticHead train_logistic(const FeatureMatrix& X, const std::vector<int>& y01,
                            double C, int max_iters = 500, double tol = 1e-6);

// ---------------------------------------------------------------------------
// Soft-margin SVM trained with sequential minimal optimization
// ---------------------------------------------------------------------------

enum class Kernel { linear, poly, rbf, sigmoid };

const char* kernel_name(Kernel k);
std::optional<Kernel> kernel_from_name(const std::string& name);

struct KernelParams {
    Kernel kernel = Kernel::rbf;
    double gamma = 0.0; // 0 means 1/dim, resolved at training time
    double coef0 = 0.0;
    int degree = 3;
};

double kernel_eval(const KernelParams& params, const FeatureRow& a, const FeatureRow& b);

struct SvmHead {
    KernelParams params;
    double C = 1.0;
    FeatureMatrix support_vectors;
    std::vector<double> dual_coefs; // alpha_i * y_i per support vector
    double bias = 0.0;
    // Platt sigmoid P(y=1|f) = 1 / (1 + exp(platt_a * f + platt_b)),
    // fit on training decision values.
    double platt_a = -1.0;
    double platt_b = 0.0;

    double decision(const FeatureRow& x) const;
    double predict_prob(const FeatureRow& x) const;
};

SvmHead train_svm(const FeatureMatrix& X, const std::vector<int>& y01, double C,
                  const KernelParams& params, double tol = 1e-3,
                  int max_passes = 200);

// ---------------------------------------------------------------------------
// Decision trees, random forest, gradient boosting
// ---------------------------------------------------------------------------

struct TreeNode {
    bool is_leaf = true;
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0; // leaf payload: class fraction or boosting step
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root
    int max_depth = 0;

    double predict(const FeatureRow& x) const;
    int depth() const; // longest root-to-leaf edge count
};

struct ForestHead {
    std::vector<DecisionTree> trees;
    int max_depth = 0;
    std::uint64_t seed = 0;

    // Mean of per-tree leaf positive fractions.
    double predict_prob(const FeatureRow& x) const;
};

ForestHead train_forest(const FeatureMatrix& X, const std::vector<int>& y01,
                        int max_depth, int n_trees, std::uint64_t seed);

struct BoostedHead {
    std::vector<DecisionTree> trees; // regression trees on logistic residuals
    double initial_log_odds = 0.0;
    double shrinkage = 0.1;
    int max_depth = 0;
    std::vector<double> train_loss; // log-loss after each round

    double decision(const FeatureRow& x) const; // initial + eta * sum tree(x)
    double predict_prob(const FeatureRow& x) const;
};

// Logistic loss; each round fits a regression tree to residuals y - p and
// assigns Newton-step leaf values sum(r) / sum(p*(1-p)).
BoostedHead train_boosted(const FeatureMatrix& X, const std::vector<int>& y01,
                          int max_depth, int rounds, double shrinkage);

// ---------------------------------------------------------------------------
// Multinomial Naive Bayes over bag-of-words counts (single-class semantics)
// ---------------------------------------------------------------------------

struct NaiveBayesModel {
    std::vector<double> log_priors;              // per class
    std::vector<std::vector<double>> log_likelihood; // [class][token]
    double alpha = 1.0;
    int vocab_size = 0;

    int n_classes() const { return static_cast<int>(log_priors.size()); }
    std::vector<double> log_posterior(const featurize::SparseCountVector& x) const;
    // argmax posterior, ties broken toward the lowest class index
    int predict_class(const featurize::SparseCountVector& x) const;
};

// likelihood(token|class) = (count + alpha) / (class_total + alpha * |V|),
// prior = class document fraction.
NaiveBayesModel train_naive_bayes(const std::vector<featurize::SparseCountVector>& X,
                                  const std::vector<int>& classes, int n_classes,
                                  double alpha);

// ---------------------------------------------------------------------------
// One-vs-rest composition
// ---------------------------------------------------------------------------

enum class HeadKind { logistic, svm, forest, boosted, naive_bayes };

const char* head_kind_name(HeadKind kind);
std::optional<HeadKind> head_kind_from_name(const std::string& name);

// Labels with zero positives get a constant-probability head and are flagged.
struct ConstantHead {
    double prob = 0.0;
};

using BinaryHead = std::variant<LogisticHead, SvmHead, ForestHead, BoostedHead, ConstantHead>;

double head_predict_prob(const BinaryHead& head, const FeatureRow& x);

struct HeadSpec {
    HeadKind kind = HeadKind::logistic;
    double C = 1.0;
    KernelParams kernel;
    int max_depth = 6;
    int n_trees = 100;
    int rounds = 100;
    double shrinkage = 0.1;
    double nb_alpha = 1.0;
    double threshold = 0.5;
    double tol = 1e-6;
    int max_iters = 500;
    std::uint64_t seed = 0;

    // "HEAD, param: value" as used in leaderboards, e.g. "RF, max_depth: 9".
    std::string display_name() const;
};

struct OneVsRestClassifier {
    HeadKind head_kind = HeadKind::logistic;
    int n_labels = 0;
    int feature_dim = 0; // dense dim, or vocabulary size for naive bayes
    double threshold = 0.5;
    std::vector<BinaryHead> heads;            // one per label (dense heads)
    std::optional<NaiveBayesModel> nb;        // single-class path
    std::vector<int> constant_negative_labels;

    bool is_single_class() const { return nb.has_value(); }
    std::vector<double> predict_proba(const FeatureRow& x) const;
};

struct TrainReport {
    std::vector<std::string> label_status; // "trained" or "constant_negative"
};

OneVsRestClassifier ovr_train(const FeatureMatrix& X,
                              const std::vector<std::vector<int>>& label_sets,
                              int n_labels, const HeadSpec& spec,
                              TrainReport* report = nullptr);

OneVsRestClassifier ovr_train_sparse(const std::vector<featurize::SparseCountVector>& X,
                                     const std::vector<std::vector<int>>& label_sets,
                                     int n_labels, const HeadSpec& spec,
                                     TrainReport* report = nullptr);

// Labels with probability >= threshold; falls back to the argmax label when
// none clears it, so the result is never empty. Naive Bayes emits exactly
// one label.
std::vector<int> ovr_predict(const OneVsRestClassifier& clf, const FeatureRow& x);
std::vector<int> ovr_predict(const OneVsRestClassifier& clf,
                             const featurize::SparseCountVector& x);

} // namespace ccb::heads
