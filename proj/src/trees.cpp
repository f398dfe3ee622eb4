#include "nftval/trees.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace nftval::trees {

namespace {

double node_mean(std::span<const double> y, std::span<const std::size_t> idx) {
    double s = 0.0;
    for (std::size_t i : idx) s += y[i];
    return s / static_cast<double>(idx.size());
}

double node_sse(std::span<const double> y, std::span<const std::size_t> idx, double mean) {
    double sse = 0.0;
    for (std::size_t i : idx) {
        const double d = y[i] - mean;
        sse += d * d;
    }
    return sse;
}

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, std::span<const double> y, const TreeParams& params,
                std::vector<std::size_t> indices, Rng* feature_rng,
                std::size_t features_per_split)
        : x_(x),
          y_(y),
          params_(params),
          indices_(std::move(indices)),
          feature_rng_(feature_rng),
          features_per_split_(features_per_split) {
        if (indices_.empty()) throw std::invalid_argument("fit_tree: empty training data");
        scratch_.resize(indices_.size());
        all_features_.resize(x_.cols());
        for (std::size_t j = 0; j < x_.cols(); ++j) all_features_[j] = static_cast<int>(j);
    }

    RegressionTree build() {
        RegressionTree tree;
        tree.n_features = x_.cols();
        tree.params = params_;
        build_node(0, indices_.size(), 0, tree.nodes);
        return tree;
    }

private:
    // Candidate features in ascending order; samples without replacement
    // when a subset is requested.
    std::span<const int> candidate_features() {
        if (feature_rng_ == nullptr || features_per_split_ >= x_.cols())
            return all_features_;
        sampled_features_.assign(all_features_.begin(), all_features_.end());
        for (std::size_t k = 0; k < features_per_split_; ++k) {
            const std::size_t pick =
                k + static_cast<std::size_t>(feature_rng_->below(sampled_features_.size() - k));
            std::swap(sampled_features_[k], sampled_features_[pick]);
        }
        sampled_features_.resize(features_per_split_);
        std::sort(sampled_features_.begin(), sampled_features_.end());
        return sampled_features_;
    }

    SplitChoice best_split(std::size_t lo, std::size_t hi, double parent_sse) {
        const std::size_t s = hi - lo;
        const std::size_t msl = params_.min_samples_leaf;
        SplitChoice best;
        if (s < 2 * msl) return best;

        for (int f : candidate_features()) {
            auto* pairs = scratch_.data();
            for (std::size_t i = 0; i < s; ++i) {
                const std::size_t row = indices_[lo + i];
                pairs[i] = {x_.at(row, static_cast<std::size_t>(f)), y_[row]};
            }
            std::sort(pairs, pairs + s,
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (pairs[0].first == pairs[s - 1].first) continue;  // constant feature

            double left_sum = 0.0, left_sumsq = 0.0;
            double total_sum = 0.0, total_sumsq = 0.0;
            for (std::size_t i = 0; i < s; ++i) {
                total_sum += pairs[i].second;
                total_sumsq += pairs[i].second * pairs[i].second;
            }
            for (std::size_t k = 1; k <= s - msl; ++k) {
                const double yv = pairs[k - 1].second;
                left_sum += yv;
                left_sumsq += yv * yv;
                if (k < msl) continue;
                if (pairs[k - 1].first == pairs[k].first) continue;  // not a boundary

                const auto nl = static_cast<double>(k);
                const auto nr = static_cast<double>(s - k);
                const double right_sum = total_sum - left_sum;
                const double right_sumsq = total_sumsq - left_sumsq;
                const double sse_l = left_sumsq - left_sum * left_sum / nl;
                const double sse_r = right_sumsq - right_sum * right_sum / nr;
                const double gain = parent_sse - sse_l - sse_r;
                if (gain > best.gain) {
                    double threshold = 0.5 * (pairs[k - 1].first + pairs[k].first);
                    // Midpoint may round up to the right value; pull it back so
                    // "x <= threshold" reproduces the training partition.
                    if (threshold >= pairs[k].first) threshold = pairs[k - 1].first;
                    best.found = true;
                    best.feature = f;
                    best.threshold = threshold;
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    int build_node(std::size_t lo, std::size_t hi, int depth, std::vector<TreeNode>& nodes) {
        const std::span<const std::size_t> idx(indices_.data() + lo, hi - lo);
        const double mean = node_mean(y_, idx);
        const double sse = node_sse(y_, idx, mean);

        const int node_index = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes[node_index].value = mean;
        nodes[node_index].count = idx.size();

        const bool depth_done = params_.max_depth >= 0 && depth >= params_.max_depth;
        if (depth_done || sse <= 0.0) return node_index;

        const SplitChoice split = best_split(lo, hi, sse);
        if (!split.found || split.gain <= 0.0) return node_index;

        const auto mid_it = std::stable_partition(
            indices_.begin() + static_cast<std::ptrdiff_t>(lo),
            indices_.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::size_t row) {
                return x_.at(row, static_cast<std::size_t>(split.feature)) <= split.threshold;
            });
        const auto mid = static_cast<std::size_t>(mid_it - indices_.begin());

        nodes[node_index].feature = split.feature;
        nodes[node_index].threshold = split.threshold;
        nodes[node_index].gain = split.gain;
        const int left = build_node(lo, mid, depth + 1, nodes);
        const int right = build_node(mid, hi, depth + 1, nodes);
        nodes[node_index].left = left;
        nodes[node_index].right = right;
        return node_index;
    }

    const Matrix& x_;
    std::span<const double> y_;
    TreeParams params_;
    std::vector<std::size_t> indices_;
    Rng* feature_rng_;
    std::size_t features_per_split_;
    std::vector<std::pair<double, double>> scratch_;
    std::vector<int> all_features_;
    std::vector<int> sampled_features_;
};

std::vector<std::size_t> identity_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

void check_training_data(const Matrix& x, std::span<const double> y) {
    if (x.rows() == 0 || x.cols() == 0)
        throw std::invalid_argument("empty training data");
    if (y.size() != x.rows())
        throw std::invalid_argument("row/target length mismatch");
}

}  // namespace

double RegressionTree::predict(std::span<const double> row) const {
    if (row.size() != n_features)
        throw std::invalid_argument("predict: row width does not match tree");
    const TreeNode* node = &nodes[0];
    while (!node->is_leaf()) {
        node = row[static_cast<std::size_t>(node->feature)] <= node->threshold
                   ? &nodes[static_cast<std::size_t>(node->left)]
                   : &nodes[static_cast<std::size_t>(node->right)];
    }
    return node->value;
}

double ForestModel::predict(std::span<const double> row) const {
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.predict(row);
    return sum / static_cast<double>(trees.size());
}

double BoostedModel::predict(std::span<const double> row) const {
    if (row.size() != n_features)
        throw std::invalid_argument("predict: row width does not match model");
    double out = initial_prediction;
    for (const auto& stage : stages) out += stage.learning_rate * stage.tree.predict(row);
    return out;
}

RegressionTree fit_tree(const Matrix& x, std::span<const double> y, const TreeParams& params) {
    check_training_data(x, y);
    TreeBuilder builder(x, y, params, identity_indices(x.rows()), nullptr, x.cols());
    return builder.build();
}

ForestModel fit_random_forest(const Matrix& x, std::span<const double> y,
                              const ForestParams& params) {
    check_training_data(x, y);
    if (params.n_trees == 0) throw std::invalid_argument("forest needs at least one tree");
    const std::size_t p = x.cols();
    std::size_t m = params.features_per_split;
    if (m == 0) m = (p + 2) / 3;  // ceil(p / 3)
    if (m > p) throw std::invalid_argument("features_per_split exceeds feature count");

    ForestModel model;
    model.params = params;
    model.params.features_per_split = m;
    model.n_features = p;
    model.trees.resize(params.n_trees);

    const TreeParams tree_params{params.max_depth, params.min_samples_leaf};
    const std::size_t n = x.rows();

    auto fit_one = [&](std::size_t t) {
        Rng rng(params.seed + t);
        std::vector<std::size_t> idx;
        if (params.bootstrap) {
            idx.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                idx[i] = static_cast<std::size_t>(rng.below(n));
        } else {
            idx = identity_indices(n);
        }
        TreeBuilder builder(x, y, tree_params, std::move(idx), &rng, m);
        model.trees[t] = builder.build();
    };

    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()),
                              params.n_trees);
    if (workers <= 1) {
        for (std::size_t t = 0; t < params.n_trees; ++t) fit_one(t);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t t = w; t < params.n_trees; t += workers) fit_one(t);
            });
        }
        for (auto& th : pool) th.join();
    }
    return model;
}

BoostedModel fit_gradient_boosting(const Matrix& x, std::span<const double> y,
                                   const BoostParams& params) {
    check_training_data(x, y);
    if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0))
        throw std::invalid_argument("boosting learning rate must be in (0, 1]");

    BoostedModel model;
    model.params = params;
    model.n_features = x.cols();
    model.initial_prediction = mean_of(y);

    std::vector<double> residual(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - model.initial_prediction;

    const TreeParams tree_params{params.max_depth, params.min_samples_leaf};
    model.stages.reserve(params.n_stages);
    for (std::size_t stage = 0; stage < params.n_stages; ++stage) {
        RegressionTree tree = fit_tree(x, residual, tree_params);
        for (std::size_t i = 0; i < residual.size(); ++i)
            residual[i] -= params.learning_rate * tree.predict(x.row(i));
        model.stages.push_back({std::move(tree), params.learning_rate});
    }
    return model;
}

}  // namespace nftval::trees
