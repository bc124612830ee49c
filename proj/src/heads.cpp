#include "ccb/heads.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ccb/error.hpp"
#include "ccb/rng.hpp"
#include "ccb/textio.hpp"

namespace ccb::heads {

namespace {

double sigmoid(double t) {
    if (t >= 0.0) {
        const double e = std::exp(-t);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(t);
    return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow
double log1pexp(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

double dot(const FeatureRow& a, const FeatureRow& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void check_binary_problem(const FeatureMatrix& X, const std::vector<int>& y01) {
    if (X.size() != y01.size()) {
        fail(ErrorKind::length_mismatch, "feature/target lengths differ");
    }
    if (X.size() < 2) fail(ErrorKind::invalid_argument, "need at least 2 samples");
    const std::size_t dim = X[0].size();
    for (const auto& row : X) {
        if (row.size() != dim) fail(ErrorKind::dim_mismatch, "ragged feature matrix");
        for (double v : row) {
            if (!std::isfinite(v)) fail(ErrorKind::non_finite, "non-finite feature value");
        }
    }
    bool has_pos = false, has_neg = false;
    for (int y : y01) {
        if (y == 1) has_pos = true;
        else has_neg = true;
    }
    if (!has_pos || !has_neg) {
        fail(ErrorKind::single_class, "training targets contain a single class");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// logistic regression
// ---------------------------------------------------------------------------

double LogisticHead::decision(const FeatureRow& x) const {
    return dot(weights, x) + bias;
}

double LogisticHead::predict_prob(const FeatureRow& x) const {
    return sigmoid(decision(x));
}

double logistic_objective(const LogisticHead& head, const FeatureMatrix& X,
                          const std::vector<int>& y01) {
    double obj = 0.5 * dot(head.weights, head.weights);
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double y = y01[i] == 1 ? 1.0 : -1.0;
        obj += head.C * log1pexp(-y * head.decision(X[i]));
    }
    return obj;
}

std::vector<double> logistic_gradient(const LogisticHead& head, const FeatureMatrix& X,
                                      const std::vector<int>& y01) {
    const std::size_t dim = head.weights.size();
    std::vector<double> grad(dim + 1, 0.0);
    for (std::size_t d = 0; d < dim; ++d) grad[d] = head.weights[d];
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double y = y01[i] == 1 ? 1.0 : -1.0;
        const double s = sigmoid(-y * head.decision(X[i])); // d loss / d f  is -y*s
        const double coef = -head.C * y * s;
        for (std::size_t d = 0; d < dim; ++d) grad[d] += coef * X[i][d];
        grad[dim] += coef;
    }
    return grad;
}

LogisticHead train_logistic(const FeatureMatrix& X, const std::vector<int>& y01,
                            double C, int max_iters, double tol) {
    check_binary_problem(X, y01);
    if (!(C > 0.0)) fail(ErrorKind::invalid_argument, "C must be positive");

    LogisticHead head;
    head.C = C;
    head.weights.assign(X[0].size(), 0.0);
    head.bias = 0.0;

    double obj = logistic_objective(head, X, y01);
    std::vector<double> prev_grad, prev_params;
    for (int iter = 0; iter < max_iters; ++iter) {
        const auto grad = logistic_gradient(head, X, y01);
        double grad_sq = 0.0;
        for (double g : grad) grad_sq += g * g;
        if (std::sqrt(grad_sq) <= tol) break;

        std::vector<double> params(head.weights);
        params.push_back(head.bias);

        // Barzilai-Borwein step guess, then Armijo backtracking so the
        // objective stays monotone non-increasing
        double step = 1.0;
        if (!prev_grad.empty()) {
            double sy = 0.0, yy = 0.0;
            for (std::size_t d = 0; d < params.size(); ++d) {
                const double s = params[d] - prev_params[d];
                const double y = grad[d] - prev_grad[d];
                sy += s * y;
                yy += y * y;
            }
            if (sy > 0.0 && yy > 0.0) step = std::clamp(sy / yy, 1e-12, 1e6);
        }

        bool accepted = false;
        LogisticHead trial = head;
        while (step > 1e-18) {
            for (std::size_t d = 0; d < head.weights.size(); ++d) {
                trial.weights[d] = head.weights[d] - step * grad[d];
            }
            trial.bias = head.bias - step * grad.back();
            const double trial_obj = logistic_objective(trial, X, y01);
            if (std::isfinite(trial_obj) && trial_obj <= obj - 1e-4 * step * grad_sq) {
                head = trial;
                obj = trial_obj;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // no descent direction progress left at float scale
        prev_grad = grad;
        prev_params = std::move(params);
    }
    if (!std::isfinite(obj) || !std::isfinite(head.bias)) {
        fail(ErrorKind::non_finite, "logistic training diverged");
    }
    return head;
}

// ---------------------------------------------------------------------------
// SVM via sequential minimal optimization
// ---------------------------------------------------------------------------

const char* kernel_name(Kernel k) {
    switch (k) {
        case Kernel::linear: return "linear";
        case Kernel::poly: return "poly";
        case Kernel::rbf: return "rbf";
        case Kernel::sigmoid: return "sigmoid";
    }
    return "?";
}

std::optional<Kernel> kernel_from_name(const std::string& name) {
    const std::string n = textio::lower(textio::trim(name));
    if (n == "linear") return Kernel::linear;
    if (n == "poly") return Kernel::poly;
    if (n == "rbf") return Kernel::rbf;
    if (n == "sigmoid") return Kernel::sigmoid;
    return std::nullopt;
}

double kernel_eval(const KernelParams& params, const FeatureRow& a, const FeatureRow& b) {
    switch (params.kernel) {
        case Kernel::linear: return dot(a, b);
        case Kernel::poly: return std::pow(params.gamma * dot(a, b) + params.coef0,
                                           static_cast<double>(params.degree));
        case Kernel::rbf: {
            double d2 = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double diff = a[i] - b[i];
                d2 += diff * diff;
            }
            return std::exp(-params.gamma * d2);
        }
        case Kernel::sigmoid: return std::tanh(params.gamma * dot(a, b) + params.coef0);
    }
    return 0.0;
}

double SvmHead::decision(const FeatureRow& x) const {
    double f = bias;
    for (std::size_t i = 0; i < support_vectors.size(); ++i) {
        f += dual_coefs[i] * kernel_eval(params, support_vectors[i], x);
    }
    return f;
}

double SvmHead::predict_prob(const FeatureRow& x) const {
    return sigmoid(-(platt_a * decision(x) + platt_b));
}

namespace {

// Platt's probabilistic output, Newton iteration with the usual target
// smoothing (t+ = (n+ + 1)/(n+ + 2), t- = 1/(n- + 2)).
void fit_platt(const std::vector<double>& decisions, const std::vector<int>& y01,
               double* out_a, double* out_b) {
    const std::size_t n = decisions.size();
    double prior1 = 0.0, prior0 = 0.0;
    for (int y : y01) (y == 1 ? prior1 : prior0) += 1.0;
    const double hi = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo = 1.0 / (prior0 + 2.0);

    double a = 0.0;
    double b = std::log((prior0 + 1.0) / (prior1 + 1.0));

    auto objective = [&](double aa, double bb) {
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = y01[i] == 1 ? hi : lo;
            const double z = aa * decisions[i] + bb;
            // t*z + log(1+exp(-z)), stable for both signs of z
            obj += t * z + log1pexp(-z);
        }
        return obj;
    };

    double obj = objective(a, b);
    for (int iter = 0; iter < 100; ++iter) {
        double g_a = 0.0, g_b = 0.0, h_aa = 1e-12, h_ab = 0.0, h_bb = 1e-12;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = y01[i] == 1 ? hi : lo;
            const double z = a * decisions[i] + b;
            const double p = sigmoid(-z); // = 1 - sigma(z)
            const double d1 = t - (1.0 - p);
            const double d2 = p * (1.0 - p);
            g_a += decisions[i] * d1;
            g_b += d1;
            h_aa += decisions[i] * decisions[i] * d2;
            h_ab += decisions[i] * d2;
            h_bb += d2;
        }
        if (std::abs(g_a) < 1e-10 && std::abs(g_b) < 1e-10) break;
        const double det = h_aa * h_bb - h_ab * h_ab;
        double step_a = (h_bb * g_a - h_ab * g_b) / det;
        double step_b = (h_aa * g_b - h_ab * g_a) / det;
        double scale = 1.0;
        bool moved = false;
        while (scale > 1e-10) {
            const double na = a - scale * step_a;
            const double nb = b - scale * step_b;
            const double nobj = objective(na, nb);
            if (nobj < obj + 1e-12) {
                a = na;
                b = nb;
                obj = nobj;
                moved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!moved) break;
    }
    *out_a = a;
    *out_b = b;
}

struct SmoSolver {
    const FeatureMatrix& X;
    std::vector<double> y; // +1 / -1
    double C;
    KernelParams params;
    double tol;
    std::vector<double> alpha;
    std::vector<double> errors; // f(x_i) - y_i, maintained incrementally
    std::vector<double> diag;
    double b = 0.0;
    Rng rng;

    SmoSolver(const FeatureMatrix& x_in, const std::vector<int>& y01, double c,
              const KernelParams& p, double tolerance)
        : X(x_in), C(c), params(p), tol(tolerance), rng(0x5e1ec7edULL) {
        y.reserve(y01.size());
        for (int v : y01) y.push_back(v == 1 ? 1.0 : -1.0);
        alpha.assign(X.size(), 0.0);
        errors.resize(X.size());
        diag.resize(X.size());
        for (std::size_t i = 0; i < X.size(); ++i) {
            diag[i] = kernel_eval(params, X[i], X[i]);
            errors[i] = -y[i]; // f == 0 initially
        }
    }

    double kernel(std::size_t i, std::size_t j) const {
        if (i == j) return diag[i];
        return kernel_eval(params, X[i], X[j]);
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1_old = alpha[i1], a2_old = alpha[i2];
        const double y1 = y[i1], y2 = y[i2];
        const double e1 = errors[i1], e2 = errors[i2];
        const double s = y1 * y2;

        double low, high;
        if (y1 != y2) {
            low = std::max(0.0, a2_old - a1_old);
            high = std::min(C, C + a2_old - a1_old);
        } else {
            low = std::max(0.0, a1_old + a2_old - C);
            high = std::min(C, a1_old + a2_old);
        }
        if (low >= high) return false;

        const double k11 = kernel(i1, i1), k12 = kernel(i1, i2), k22 = kernel(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;

        double a2;
        if (eta > 0.0) {
            a2 = a2_old + y2 * (e1 - e2) / eta;
            a2 = std::clamp(a2, low, high);
        } else {
            // flat or concave along the constraint: evaluate the ends
            const double f1 = y1 * e1 - a1_old * k11 - s * a2_old * k12;
            const double f2 = y2 * e2 - s * a1_old * k12 - a2_old * k22;
            const double l1 = a1_old + s * (a2_old - low);
            const double h1 = a1_old + s * (a2_old - high);
            const double obj_low = l1 * f1 + low * f2 + 0.5 * l1 * l1 * k11 +
                                   0.5 * low * low * k22 + s * low * l1 * k12;
            const double obj_high = h1 * f1 + high * f2 + 0.5 * h1 * h1 * k11 +
                                    0.5 * high * high * k22 + s * high * h1 * k12;
            if (obj_low < obj_high - 1e-12) a2 = low;
            else if (obj_low > obj_high + 1e-12) a2 = high;
            else return false;
        }
        if (std::abs(a2 - a2_old) < 1e-12 * (a2 + a2_old + 1e-12)) return false;

        const double a1 = a1_old + s * (a2_old - a2);

        const double d1 = y1 * (a1 - a1_old);
        const double d2 = y2 * (a2 - a2_old);
        const double b1 = b - e1 - d1 * k11 - d2 * k12;
        const double b2 = b - e2 - d1 * k12 - d2 * k22;
        double b_new;
        if (a1 > 0.0 && a1 < C) b_new = b1;
        else if (a2 > 0.0 && a2 < C) b_new = b2;
        else b_new = 0.5 * (b1 + b2);

        const double delta_b = b_new - b;
        for (std::size_t j = 0; j < X.size(); ++j) {
            errors[j] += d1 * kernel(i1, j) + d2 * kernel(i2, j) + delta_b;
        }
        alpha[i1] = a1;
        alpha[i2] = a2;
        b = b_new;
        // pin the optimized pair to their KKT-consistent values
        errors[i1] = decision_of(i1) - y1;
        errors[i2] = decision_of(i2) - y2;
        return true;
    }

    double decision_of(std::size_t i) const {
        double f = b;
        for (std::size_t j = 0; j < X.size(); ++j) {
            if (alpha[j] > 0.0) f += alpha[j] * y[j] * kernel(j, i);
        }
        return f;
    }

    bool examine(std::size_t i2) {
        const double y2 = y[i2], a2 = alpha[i2], e2 = errors[i2];
        const double r2 = e2 * y2;
        if (!((r2 < -tol && a2 < C) || (r2 > tol && a2 > 0.0))) return false;

        // heuristic 1: largest |E1 - E2| among non-bound points
        std::size_t best = X.size();
        double best_gap = 0.0;
        for (std::size_t j = 0; j < X.size(); ++j) {
            if (alpha[j] > 0.0 && alpha[j] < C) {
                const double gap = std::abs(errors[j] - e2);
                if (gap > best_gap) {
                    best_gap = gap;
                    best = j;
                }
            }
        }
        if (best < X.size() && take_step(best, i2)) return true;

        // heuristic 2: all non-bound points from a random start
        const std::size_t n = X.size();
        std::size_t start = static_cast<std::size_t>(rng.bounded(n));
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t j = (start + k) % n;
            if (alpha[j] > 0.0 && alpha[j] < C && take_step(j, i2)) return true;
        }
        // heuristic 3: everything
        start = static_cast<std::size_t>(rng.bounded(n));
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t j = (start + k) % n;
            if (take_step(j, i2)) return true;
        }
        return false;
    }

    void solve(int max_passes) {
        int pass = 0;
        bool examine_all = true;
        std::size_t num_changed = 0;
        while (examine_all || num_changed > 0) {
            if (++pass > max_passes) {
                fail(ErrorKind::no_convergence,
                     "SMO did not converge within " + std::to_string(max_passes) + " passes");
            }
            num_changed = 0;
            for (std::size_t i = 0; i < X.size(); ++i) {
                if (examine_all || (alpha[i] > 0.0 && alpha[i] < C)) {
                    if (examine(i)) ++num_changed;
                }
            }
            if (examine_all) examine_all = false;
            else if (num_changed == 0) examine_all = true;
        }
    }
};

} // namespace

SvmHead train_svm(const FeatureMatrix& X, const std::vector<int>& y01, double C,
                  const KernelParams& params, double tol, int max_passes) {
    check_binary_problem(X, y01);
    if (!(C > 0.0)) fail(ErrorKind::invalid_argument, "C must be positive");

    KernelParams resolved = params;
    if (resolved.gamma <= 0.0) resolved.gamma = 1.0 / static_cast<double>(X[0].size());

    SmoSolver solver(X, y01, C, resolved, tol);
    solver.solve(max_passes);

    SvmHead head;
    head.params = resolved;
    head.C = C;
    head.bias = solver.b;
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (solver.alpha[i] > 0.0) {
            head.support_vectors.push_back(X[i]);
            head.dual_coefs.push_back(solver.alpha[i] * solver.y[i]);
        }
    }

    std::vector<double> decisions(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) decisions[i] = head.decision(X[i]);
    fit_platt(decisions, y01, &head.platt_a, &head.platt_b);
    return head;
}

// ---------------------------------------------------------------------------
// decision trees
// ---------------------------------------------------------------------------

double DecisionTree::predict(const FeatureRow& x) const {
    int node = 0;
    while (!nodes[static_cast<std::size_t>(node)].is_leaf) {
        const TreeNode& nd = nodes[static_cast<std::size_t>(node)];
        node = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(node)].value;
}

namespace {

int node_depth(const std::vector<TreeNode>& nodes, int idx) {
    const TreeNode& nd = nodes[static_cast<std::size_t>(idx)];
    if (nd.is_leaf) return 0;
    return 1 + std::max(node_depth(nodes, nd.left), node_depth(nodes, nd.right));
}

} // namespace

int DecisionTree::depth() const {
    return nodes.empty() ? 0 : node_depth(nodes, 0);
}

namespace {

struct TreeBuilder {
    const FeatureMatrix& X;
    const std::vector<double>& target;  // labels (0/1) or residuals
    const std::vector<double>* hessian; // nullptr for classification
    int max_depth;
    int feature_subset; // 0 = all features
    Rng* rng;
    std::vector<TreeNode> nodes;

    double leaf_value(const std::vector<std::size_t>& idx) const {
        if (hessian == nullptr) {
            double sum = 0.0;
            for (std::size_t i : idx) sum += target[i];
            return idx.empty() ? 0.0 : sum / static_cast<double>(idx.size());
        }
        // Newton step for logistic loss: sum(residual) / sum(hessian)
        double g = 0.0, h = 0.0;
        for (std::size_t i : idx) {
            g += target[i];
            h += (*hessian)[i];
        }
        return g / std::max(h, 1e-12);
    }

    // Weighted child impurity: Gini for classification, SSE for regression.
    // Both reduce to  sum(t^2) - (sum t)^2/n  up to constants, so one scan
    // works for either via prefix sums of t and t^2.
    int build(std::vector<std::size_t> idx, int depth) {
        const int me = static_cast<int>(nodes.size());
        nodes.push_back({});
        nodes[static_cast<std::size_t>(me)].value = leaf_value(idx);

        if (depth >= max_depth || idx.size() < 2) return me;
        bool pure = true;
        for (std::size_t i = 1; i < idx.size(); ++i) {
            if (target[idx[i]] != target[idx[0]]) {
                pure = false;
                break;
            }
        }
        if (pure) return me;

        const std::size_t dim = X[0].size();
        std::vector<int> features(dim);
        std::iota(features.begin(), features.end(), 0);
        if (feature_subset > 0 && static_cast<std::size_t>(feature_subset) < dim) {
            // partial Fisher-Yates: first `feature_subset` entries form the sample
            for (int k = 0; k < feature_subset; ++k) {
                const auto j = static_cast<std::size_t>(k) +
                               static_cast<std::size_t>(rng->bounded(dim - static_cast<std::size_t>(k)));
                std::swap(features[static_cast<std::size_t>(k)], features[j]);
            }
            features.resize(static_cast<std::size_t>(feature_subset));
            std::sort(features.begin(), features.end()); // scan order independent of draw order
        }

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = std::numeric_limits<double>::infinity();

        std::vector<std::pair<double, double>> column(idx.size()); // (value, target)
        for (int f : features) {
            for (std::size_t k = 0; k < idx.size(); ++k) {
                column[k] = {X[idx[k]][static_cast<std::size_t>(f)], target[idx[k]]};
            }
            std::sort(column.begin(), column.end());

            double left_sum = 0.0, left_sq = 0.0;
            double total_sum = 0.0, total_sq = 0.0;
            for (const auto& [v, t] : column) {
                total_sum += t;
                total_sq += t * t;
            }
            const auto n = static_cast<double>(column.size());
            for (std::size_t k = 0; k + 1 < column.size(); ++k) {
                left_sum += column[k].second;
                left_sq += column[k].second * column[k].second;
                if (column[k].first == column[k + 1].first) continue;
                const double nl = static_cast<double>(k + 1);
                const double nr = n - nl;
                const double right_sum = total_sum - left_sum;
                const double right_sq = total_sq - left_sq;
                const double score = (left_sq - left_sum * left_sum / nl) +
                                     (right_sq - right_sum * right_sum / nr);
                if (score < best_score - 1e-12) {
                    best_score = score;
                    best_feature = f;
                    best_threshold = 0.5 * (column[k].first + column[k + 1].first);
                }
            }
        }

        const double parent_score = [&] {
            double s = 0.0, sq = 0.0;
            for (std::size_t i : idx) {
                s += target[i];
                sq += target[i] * target[i];
            }
            return sq - s * s / static_cast<double>(idx.size());
        }();
        if (best_feature < 0 || best_score >= parent_score - 1e-12) return me;

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx) {
            if (X[i][static_cast<std::size_t>(best_feature)] <= best_threshold) left_idx.push_back(i);
            else right_idx.push_back(i);
        }
        if (left_idx.empty() || right_idx.empty()) return me;

        idx.clear();
        idx.shrink_to_fit();
        const int left = build(std::move(left_idx), depth + 1);
        const int right = build(std::move(right_idx), depth + 1);
        TreeNode& nd = nodes[static_cast<std::size_t>(me)];
        nd.is_leaf = false;
        nd.feature = best_feature;
        nd.threshold = best_threshold;
        nd.left = left;
        nd.right = right;
        return me;
    }
};

DecisionTree build_tree(const FeatureMatrix& X, const std::vector<double>& target,
                        const std::vector<double>* hessian, int max_depth,
                        int feature_subset, Rng* rng,
                        const std::vector<std::size_t>& sample) {
    TreeBuilder builder{X, target, hessian, max_depth, feature_subset, rng, {}};
    builder.build(sample, 0);
    DecisionTree tree;
    tree.nodes = std::move(builder.nodes);
    tree.max_depth = max_depth;
    return tree;
}

} // namespace

// ---------------------------------------------------------------------------
// random forest
// ---------------------------------------------------------------------------

double ForestHead::predict_prob(const FeatureRow& x) const {
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.predict(x);
    return trees.empty() ? 0.0 : sum / static_cast<double>(trees.size());
}

ForestHead train_forest(const FeatureMatrix& X, const std::vector<int>& y01,
                        int max_depth, int n_trees, std::uint64_t seed) {
    if (max_depth < 1) fail(ErrorKind::invalid_argument, "max_depth must be >= 1");
    if (n_trees < 1) fail(ErrorKind::invalid_argument, "n_trees must be >= 1");
    if (X.empty() || X.size() != y01.size()) {
        fail(ErrorKind::length_mismatch, "feature/target lengths differ");
    }

    std::vector<double> target(y01.size());
    for (std::size_t i = 0; i < y01.size(); ++i) target[i] = y01[i] == 1 ? 1.0 : 0.0;

    const auto dim = X[0].size();
    const int subset = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(dim))));

    ForestHead head;
    head.max_depth = max_depth;
    head.seed = seed;
    Rng base(seed);
    for (int t = 0; t < n_trees; ++t) {
        Rng rng = base.fork(static_cast<std::uint64_t>(t));
        std::vector<std::size_t> sample(X.size());
        for (auto& s : sample) s = static_cast<std::size_t>(rng.bounded(X.size()));
        std::sort(sample.begin(), sample.end());
        head.trees.push_back(build_tree(X, target, nullptr, max_depth, subset, &rng, sample));
    }
    return head;
}

// ---------------------------------------------------------------------------
// gradient boosting with logistic loss
// ---------------------------------------------------------------------------

double BoostedHead::decision(const FeatureRow& x) const {
    double f = initial_log_odds;
    for (const auto& tree : trees) f += shrinkage * tree.predict(x);
    return f;
}

double BoostedHead::predict_prob(const FeatureRow& x) const {
    return sigmoid(decision(x));
}

BoostedHead train_boosted(const FeatureMatrix& X, const std::vector<int>& y01,
                          int max_depth, int rounds, double shrinkage) {
    if (rounds < 0) fail(ErrorKind::invalid_argument, "rounds must be >= 0");
    if (max_depth < 1) fail(ErrorKind::invalid_argument, "max_depth must be >= 1");
    if (!(shrinkage > 0.0 && shrinkage <= 1.0)) {
        fail(ErrorKind::invalid_argument, "shrinkage must be in (0,1]");
    }
    if (X.empty() || X.size() != y01.size()) {
        fail(ErrorKind::length_mismatch, "feature/target lengths differ");
    }

    const std::size_t n = X.size();
    double base_rate = 0.0;
    for (int y : y01) base_rate += y == 1 ? 1.0 : 0.0;
    base_rate = std::clamp(base_rate / static_cast<double>(n), 1e-12, 1.0 - 1e-12);

    BoostedHead head;
    head.shrinkage = shrinkage;
    head.max_depth = max_depth;
    head.initial_log_odds = std::log(base_rate / (1.0 - base_rate));

    std::vector<double> raw(n, head.initial_log_odds);
    std::vector<double> residual(n), hess(n);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);

    auto log_loss = [&] {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = y01[i] == 1 ? 1.0 : -1.0;
            loss += log1pexp(-y * raw[i]);
        }
        return loss / static_cast<double>(n);
    };

    for (int round = 0; round < rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(raw[i]);
            residual[i] = (y01[i] == 1 ? 1.0 : 0.0) - p;
            hess[i] = p * (1.0 - p);
        }
        DecisionTree tree = build_tree(X, residual, &hess, max_depth, 0, nullptr, all);
        for (std::size_t i = 0; i < n; ++i) raw[i] += shrinkage * tree.predict(X[i]);
        head.trees.push_back(std::move(tree));
        head.train_loss.push_back(log_loss());
    }
    return head;
}

// ---------------------------------------------------------------------------
// multinomial Naive Bayes
// ---------------------------------------------------------------------------

std::vector<double> NaiveBayesModel::log_posterior(const featurize::SparseCountVector& x) const {
    if (x.dim != vocab_size) {
        fail(ErrorKind::dim_mismatch,
             "input dimension " + std::to_string(x.dim) + " vs vocabulary " +
                 std::to_string(vocab_size));
    }
    std::vector<double> post(log_priors);
    for (int c = 0; c < n_classes(); ++c) {
        for (const auto& [idx, count] : x.entries) {
            post[static_cast<std::size_t>(c)] +=
                count * log_likelihood[static_cast<std::size_t>(c)][static_cast<std::size_t>(idx)];
        }
    }
    return post;
}

int NaiveBayesModel::predict_class(const featurize::SparseCountVector& x) const {
    const auto post = log_posterior(x);
    int best = 0;
    for (int c = 1; c < n_classes(); ++c) {
        if (post[static_cast<std::size_t>(c)] > post[static_cast<std::size_t>(best)]) best = c;
    }
    return best;
}

NaiveBayesModel train_naive_bayes(const std::vector<featurize::SparseCountVector>& X,
                                  const std::vector<int>& classes, int n_classes,
                                  double alpha) {
    if (!(alpha > 0.0)) fail(ErrorKind::invalid_argument, "alpha must be positive");
    if (X.empty() || X.size() != classes.size()) {
        fail(ErrorKind::length_mismatch, "feature/class lengths differ");
    }
    const int vocab = X[0].dim;
    if (vocab < 1) fail(ErrorKind::empty_vocabulary, "naive bayes needs a non-empty vocabulary");

    std::vector<std::vector<double>> token_counts(
        static_cast<std::size_t>(n_classes), std::vector<double>(static_cast<std::size_t>(vocab), 0.0));
    std::vector<double> doc_counts(static_cast<std::size_t>(n_classes), 0.0);
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i].dim != vocab) fail(ErrorKind::dim_mismatch, "ragged sparse inputs");
        const int c = classes[i];
        if (c < 0 || c >= n_classes) fail(ErrorKind::invalid_argument, "class id out of range");
        doc_counts[static_cast<std::size_t>(c)] += 1.0;
        for (const auto& [idx, count] : X[i].entries) {
            token_counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(idx)] += count;
        }
    }

    NaiveBayesModel model;
    model.alpha = alpha;
    model.vocab_size = vocab;
    model.log_priors.resize(static_cast<std::size_t>(n_classes));
    model.log_likelihood.resize(static_cast<std::size_t>(n_classes));
    const double total_docs = static_cast<double>(X.size());
    for (int c = 0; c < n_classes; ++c) {
        const auto uc = static_cast<std::size_t>(c);
        // empty classes keep -inf priors and are never predicted
        model.log_priors[uc] = doc_counts[uc] > 0.0
                                   ? std::log(doc_counts[uc] / total_docs)
                                   : -std::numeric_limits<double>::infinity();
        double class_total = 0.0;
        for (double v : token_counts[uc]) class_total += v;
        const double denom = class_total + alpha * static_cast<double>(vocab);
        model.log_likelihood[uc].resize(static_cast<std::size_t>(vocab));
        for (int v = 0; v < vocab; ++v) {
            model.log_likelihood[uc][static_cast<std::size_t>(v)] =
                std::log((token_counts[uc][static_cast<std::size_t>(v)] + alpha) / denom);
        }
    }
    return model;
}

// ---------------------------------------------------------------------------
// one-vs-rest composition
// ---------------------------------------------------------------------------

const char* head_kind_name(HeadKind kind) {
    switch (kind) {
        case HeadKind::logistic: return "logistic";
        case HeadKind::svm: return "svm";
        case HeadKind::forest: return "forest";
        case HeadKind::boosted: return "boosted";
        case HeadKind::naive_bayes: return "naive_bayes";
    }
    return "?";
}

std::optional<HeadKind> head_kind_from_name(const std::string& name) {
    const std::string n = textio::lower(textio::trim(name));
    if (n == "logistic" || n == "lr") return HeadKind::logistic;
    if (n == "svm") return HeadKind::svm;
    if (n == "forest" || n == "rf") return HeadKind::forest;
    if (n == "boosted" || n == "xg") return HeadKind::boosted;
    if (n == "naive_bayes" || n == "nb") return HeadKind::naive_bayes;
    return std::nullopt;
}

std::string HeadSpec::display_name() const {
    switch (kind) {
        case HeadKind::logistic: return "LR, C: " + textio::format_double(C);
        case HeadKind::svm:
            return "SVM, C: " + textio::format_double(C) +
                   ", kernel: " + kernel_name(kernel.kernel);
        case HeadKind::forest: return "RF, max_depth: " + std::to_string(max_depth);
        case HeadKind::boosted: return "XG, max_depth: " + std::to_string(max_depth);
        case HeadKind::naive_bayes: return "NB, alpha: " + textio::format_double(nb_alpha);
    }
    return "?";
}

double head_predict_prob(const BinaryHead& head, const FeatureRow& x) {
    return std::visit(
        [&](const auto& h) -> double {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, ConstantHead>) return h.prob;
            else return h.predict_prob(x);
        },
        head);
}

std::vector<double> OneVsRestClassifier::predict_proba(const FeatureRow& x) const {
    if (static_cast<int>(x.size()) != feature_dim) {
        fail(ErrorKind::dim_mismatch,
             "feature dimension " + std::to_string(x.size()) + " vs trained " +
                 std::to_string(feature_dim));
    }
    std::vector<double> probs;
    probs.reserve(heads.size());
    for (const auto& head : heads) probs.push_back(head_predict_prob(head, x));
    return probs;
}

namespace {

BinaryHead train_one(const FeatureMatrix& X, const std::vector<int>& y01,
                     const HeadSpec& spec, std::uint64_t label_seed) {
    switch (spec.kind) {
        case HeadKind::logistic:
            return train_logistic(X, y01, spec.C, spec.max_iters, spec.tol);
        case HeadKind::svm:
            return train_svm(X, y01, spec.C, spec.kernel);
        case HeadKind::forest:
            return train_forest(X, y01, spec.max_depth, spec.n_trees, label_seed);
        case HeadKind::boosted:
            return train_boosted(X, y01, spec.max_depth, spec.rounds, spec.shrinkage);
        default:
            fail(ErrorKind::invalid_argument, "naive bayes trains on sparse counts");
    }
}

} // namespace

OneVsRestClassifier ovr_train(const FeatureMatrix& X,
                              const std::vector<std::vector<int>>& label_sets,
                              int n_labels, const HeadSpec& spec, TrainReport* report) {
    if (n_labels < 2) fail(ErrorKind::invalid_argument, "need at least 2 labels");
    if (spec.kind == HeadKind::naive_bayes) {
        fail(ErrorKind::invalid_argument, "naive bayes needs ovr_train_sparse");
    }
    if (X.empty() || X.size() != label_sets.size()) {
        fail(ErrorKind::length_mismatch, "feature/label lengths differ");
    }

    OneVsRestClassifier clf;
    clf.head_kind = spec.kind;
    clf.n_labels = n_labels;
    clf.feature_dim = static_cast<int>(X[0].size());
    clf.threshold = spec.threshold;
    if (report) report->label_status.assign(static_cast<std::size_t>(n_labels), "trained");

    Rng base(spec.seed);
    for (int label = 0; label < n_labels; ++label) {
        std::vector<int> y01(X.size(), 0);
        std::size_t positives = 0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            const auto& labels = label_sets[i];
            if (std::find(labels.begin(), labels.end(), label) != labels.end()) {
                y01[i] = 1;
                ++positives;
            }
        }
        if (positives == 0) {
            clf.heads.emplace_back(ConstantHead{0.0});
            clf.constant_negative_labels.push_back(label);
            if (report) report->label_status[static_cast<std::size_t>(label)] = "constant_negative";
        } else if (positives == X.size()) {
            clf.heads.emplace_back(ConstantHead{1.0});
            if (report) report->label_status[static_cast<std::size_t>(label)] = "constant_positive";
        } else {
            clf.heads.push_back(
                train_one(X, y01, spec, base.fork(static_cast<std::uint64_t>(label)).next_u64()));
        }
    }
    return clf;
}

OneVsRestClassifier ovr_train_sparse(const std::vector<featurize::SparseCountVector>& X,
                                     const std::vector<std::vector<int>>& label_sets,
                                     int n_labels, const HeadSpec& spec, TrainReport* report) {
    if (n_labels < 2) fail(ErrorKind::invalid_argument, "need at least 2 labels");
    if (spec.kind != HeadKind::naive_bayes) {
        fail(ErrorKind::invalid_argument, "sparse training is the naive bayes path");
    }
    if (X.empty() || X.size() != label_sets.size()) {
        fail(ErrorKind::length_mismatch, "feature/label lengths differ");
    }

    // single-class reduction: a multi-label sentence contributes its lowest
    // label index (deterministic tie rule)
    std::vector<int> classes(X.size());
    std::vector<std::size_t> class_docs(static_cast<std::size_t>(n_labels), 0);
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (label_sets[i].empty()) fail(ErrorKind::missing_label, "sentence without labels");
        classes[i] = *std::min_element(label_sets[i].begin(), label_sets[i].end());
        ++class_docs[static_cast<std::size_t>(classes[i])];
    }

    OneVsRestClassifier clf;
    clf.head_kind = HeadKind::naive_bayes;
    clf.n_labels = n_labels;
    clf.feature_dim = X[0].dim;
    clf.threshold = spec.threshold;
    clf.nb = train_naive_bayes(X, classes, n_labels, spec.nb_alpha);
    if (report) report->label_status.assign(static_cast<std::size_t>(n_labels), "trained");
    for (int label = 0; label < n_labels; ++label) {
        if (class_docs[static_cast<std::size_t>(label)] == 0) {
            clf.constant_negative_labels.push_back(label);
            if (report) report->label_status[static_cast<std::size_t>(label)] = "constant_negative";
        }
    }
    return clf;
}

std::vector<int> ovr_predict(const OneVsRestClassifier& clf, const FeatureRow& x) {
    if (clf.is_single_class()) {
        fail(ErrorKind::invalid_argument, "single-class model predicts from sparse counts");
    }
    const auto probs = clf.predict_proba(x);
    std::vector<int> labels;
    for (int i = 0; i < clf.n_labels; ++i) {
        if (probs[static_cast<std::size_t>(i)] >= clf.threshold) labels.push_back(i);
    }
    if (labels.empty()) {
        int best = 0;
        for (int i = 1; i < clf.n_labels; ++i) {
            if (probs[static_cast<std::size_t>(i)] > probs[static_cast<std::size_t>(best)]) best = i;
        }
        labels.push_back(best);
    }
    return labels;
}

std::vector<int> ovr_predict(const OneVsRestClassifier& clf,
                             const featurize::SparseCountVector& x) {
    if (!clf.is_single_class()) {
        fail(ErrorKind::invalid_argument, "dense model predicts from dense features");
    }
    return {clf.nb->predict_class(x)};
}

} // namespace ccb::heads
