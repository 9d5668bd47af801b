#pragma once

#include <Eigen/Dense>
#include <vector>

namespace banditsim::gbt {

// Binary regression tree stored as a flat node array. Internal nodes route
// x[feature] < threshold to `left`, otherwise to `right`; leaves carry the
// mean of the targets routed to them.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;

    bool is_leaf() const { return left < 0; }
};

class RegressionTree {
public:
    RegressionTree() = default;
    explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    const std::vector<TreeNode>& nodes() const { return nodes_; }
    bool empty() const { return nodes_.empty(); }

private:
    std::vector<TreeNode> nodes_;
};

// Least-squares CART fitter over a fixed feature matrix: exhaustive greedy
// search over every feature and every midpoint between consecutive distinct
// sorted values. A node becomes a leaf when it holds fewer than
// 2 * min_samples_leaf points, the depth limit is reached, or no candidate
// split reduces the sum of squared errors. Ties break toward the lowest
// feature index, then the lowest threshold.
//
// Each feature is sorted once at construction; fitting a tree on new targets
// (the boosting residuals change every round, the rows never do) only needs
// stable partitions of those orders, so repeated fits cost O(depth * n * d).
class TreeFitter {
public:
    TreeFitter(const Eigen::MatrixXd& features, int max_depth, int min_samples_leaf);

    RegressionTree fit(const Eigen::VectorXd& targets);

private:
    int build(const std::vector<std::vector<int>>& sorted_rows, int depth);

    const Eigen::MatrixXd& features_;
    const Eigen::VectorXd* targets_ = nullptr;
    int max_depth_;
    int min_samples_leaf_;
    std::vector<std::vector<int>> feature_order_;  // per feature, rows sorted by value
    std::vector<TreeNode> nodes_;
};

// One-shot convenience wrapper around TreeFitter.
RegressionTree fit_tree(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets,
                        int max_depth, int min_samples_leaf);

}  // namespace banditsim::gbt
