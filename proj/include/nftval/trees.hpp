#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nftval/core.hpp"

namespace nftval::trees {

struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;       // leaf mean
    std::size_t count = 0;    // training rows reaching the node
    double gain = 0.0;        // SSE reduction of the split; 0 on leaves

    bool is_leaf() const { return left < 0; }
};

struct TreeParams {
    int max_depth = -1;  // -1 = unlimited
    std::size_t min_samples_leaf = 1;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::size_t n_features = 0;
    TreeParams params;

    double predict(std::span<const double> row) const;
};

struct ForestParams {
    std::size_t n_trees = 100;
    int max_depth = -1;
    std::size_t min_samples_leaf = 2;
    std::size_t features_per_split = 0;  // 0 = ceil(p / 3)
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

struct ForestModel {
    std::vector<RegressionTree> trees;
    ForestParams params;
    std::size_t n_features = 0;

    // Arithmetic mean over member trees.
    double predict(std::span<const double> row) const;
};

struct BoostParams {
    std::size_t n_stages = 100;
    double learning_rate = 0.1;
    int max_depth = 3;
    std::size_t min_samples_leaf = 1;
    std::uint64_t seed = 0;
};

struct BoostStage {
    RegressionTree tree;
    double learning_rate = 0.1;
};

struct BoostedModel {
    double initial_prediction = 0.0;  // training target mean
    std::vector<BoostStage> stages;
    BoostParams params;
    std::size_t n_features = 0;

    double predict(std::span<const double> row) const;
};

// Greedy variance-reduction CART. Thresholds are midpoints of adjacent sorted
// feature values; equal-gain ties resolve to the lowest feature index, then
// the lowest threshold.
RegressionTree fit_tree(const Matrix& x, std::span<const double> y, const TreeParams& params);

// Bagged trees on bootstrap samples with per-split feature subsampling.
// Per-tree seed is params.seed + tree index, so parallel and sequential fits
// are bit-identical.
ForestModel fit_random_forest(const Matrix& x, std::span<const double> y,
                              const ForestParams& params);

// Squared-loss boosting: each stage fits a depth-limited tree to the current
// residuals.
BoostedModel fit_gradient_boosting(const Matrix& x, std::span<const double> y,
                                   const BoostParams& params);

}  // namespace nftval::trees
