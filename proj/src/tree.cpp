#include "banditsim/tree.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace banditsim::gbt {

namespace {

// Gains below this are treated as zero so rounding noise on constant targets
// never manufactures a split.
constexpr double kMinGain = 1e-12;

}  // namespace

double RegressionTree::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (nodes_.empty()) throw std::logic_error("RegressionTree::predict: empty tree");
    int i = 0;
    while (!nodes_[i].is_leaf()) {
        const TreeNode& node = nodes_[i];
        i = x[node.feature] < node.threshold ? node.left : node.right;
    }
    return nodes_[i].value;
}

TreeFitter::TreeFitter(const Eigen::MatrixXd& features, int max_depth, int min_samples_leaf)
    : features_(features), max_depth_(max_depth), min_samples_leaf_(min_samples_leaf) {
    if (features.rows() == 0) throw std::invalid_argument("TreeFitter: empty input");
    if (max_depth < 1 || min_samples_leaf < 1)
        throw std::invalid_argument("TreeFitter: invalid depth or leaf size");
    feature_order_.resize(static_cast<std::size_t>(features.cols()));
    for (Eigen::Index f = 0; f < features.cols(); ++f) {
        auto& order = feature_order_[static_cast<std::size_t>(f)];
        order.resize(static_cast<std::size_t>(features.rows()));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return features(a, f) < features(b, f); });
    }
}

RegressionTree TreeFitter::fit(const Eigen::VectorXd& targets) {
    if (targets.size() != features_.rows())
        throw std::invalid_argument("TreeFitter::fit: features/targets length mismatch");
    targets_ = &targets;
    nodes_.clear();
    build(feature_order_, 0);
    targets_ = nullptr;
    return RegressionTree(nodes_);
}

int TreeFitter::build(const std::vector<std::vector<int>>& sorted_rows, int depth) {
    const Eigen::VectorXd& y = *targets_;
    const auto n = static_cast<long>(sorted_rows[0].size());
    double sum = 0.0;
    for (int r : sorted_rows[0]) sum += y[r];

    const int node_index = static_cast<int>(nodes_.size());
    nodes_.push_back(TreeNode{});
    nodes_[node_index].value = sum / static_cast<double>(n);

    if (depth >= max_depth_ || n < 2L * min_samples_leaf_) return node_index;

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_gain = kMinGain;
    for (std::size_t f = 0; f < sorted_rows.size(); ++f) {
        const std::vector<int>& order = sorted_rows[f];
        double left_sum = 0.0;
        for (long i = 0; i + 1 < n; ++i) {
            left_sum += y[order[static_cast<std::size_t>(i)]];
            const double value = features_(order[static_cast<std::size_t>(i)],
                                           static_cast<Eigen::Index>(f));
            const double next = features_(order[static_cast<std::size_t>(i + 1)],
                                          static_cast<Eigen::Index>(f));
            if (value == next) continue;
            const long nl = i + 1;
            const long nr = n - nl;
            if (nl < min_samples_leaf_ || nr < min_samples_leaf_) continue;
            const double diff = left_sum / static_cast<double>(nl) -
                                (sum - left_sum) / static_cast<double>(nr);
            const double gain =
                diff * diff * static_cast<double>(nl) * static_cast<double>(nr) / static_cast<double>(n);
            if (gain > best_gain) {
                best_gain = gain;
                best_feature = static_cast<int>(f);
                best_threshold = 0.5 * (value + next);
            }
        }
    }
    if (best_feature < 0) return node_index;

    // Stable partition of every feature's order, so children keep sortedness.
    std::vector<std::vector<int>> left_rows(sorted_rows.size());
    std::vector<std::vector<int>> right_rows(sorted_rows.size());
    for (std::size_t f = 0; f < sorted_rows.size(); ++f) {
        left_rows[f].reserve(static_cast<std::size_t>(n));
        right_rows[f].reserve(static_cast<std::size_t>(n));
        for (int r : sorted_rows[f]) {
            (features_(r, best_feature) < best_threshold ? left_rows[f] : right_rows[f]).push_back(r);
        }
    }

    const int left_index = build(left_rows, depth + 1);
    left_rows.clear();
    left_rows.shrink_to_fit();
    const int right_index = build(right_rows, depth + 1);
    nodes_[node_index].feature = best_feature;
    nodes_[node_index].threshold = best_threshold;
    nodes_[node_index].left = left_index;
    nodes_[node_index].right = right_index;
    return node_index;
}

RegressionTree fit_tree(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                        int max_depth, int min_samples_leaf) {
    if (features.rows() != targets.size())
        throw std::invalid_argument("fit_tree: features/targets length mismatch");
    TreeFitter fitter(features, max_depth, min_samples_leaf);
    return fitter.fit(targets);
}

}  // namespace banditsim::gbt
