#include "nftval/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nftval/trees.hpp"

namespace nftval::tuner {

namespace {

double pearson(std::span<const double> xs, std::span<const double> ys) {
    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double cov = 0, vx = 0, vy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if (vx <= 0.0 || vy <= 0.0) return 0.0;  // zero-variance convention
    return std::clamp(cov / std::sqrt(vx * vy), -1.0, 1.0);
}

}  // namespace

SearchResult random_search(const HyperSpace& space, const Matrix& rows,
                           std::span<const double> targets, int n_trials,
                           std::uint64_t seed, const neural::TrainOptions& train_options) {
    if (n_trials < 1) throw std::invalid_argument("random_search: need at least one trial");
    if (space.filters.empty() || space.kernel_sizes.empty() || space.dense_units.empty() ||
        space.dropout.empty())
        throw std::invalid_argument("random_search: empty choice set");
    if (!(space.lr_low > 0.0 && space.lr_low < space.lr_high))
        throw std::invalid_argument("random_search: bad learning-rate range");

    const auto p = static_cast<int>(rows.cols());
    if (std::none_of(space.kernel_sizes.begin(), space.kernel_sizes.end(),
                     [&](int k) { return k <= p; }))
        throw std::invalid_argument("random_search: no kernel size fits the input width");

    // All specs are drawn up front so trials stay independent of each other's
    // training, which keeps them safe to run concurrently.
    Rng rng(seed);
    std::vector<neural::CnnSpec> specs;
    specs.reserve(static_cast<std::size_t>(n_trials));
    const double log_lo = std::log(space.lr_low);
    const double log_hi = std::log(space.lr_high);
    for (int t = 0; t < n_trials; ++t) {
        neural::CnnSpec spec;
        spec.filters = space.filters[rng.below(space.filters.size())];
        spec.kernel_size = space.kernel_sizes[rng.below(space.kernel_sizes.size())];
        while (spec.kernel_size > p)
            spec.kernel_size = space.kernel_sizes[rng.below(space.kernel_sizes.size())];
        spec.dense_units = space.dense_units[rng.below(space.dense_units.size())];
        spec.use_dropout = space.dropout[rng.below(space.dropout.size())];
        spec.learning_rate = std::exp(rng.uniform(log_lo, log_hi));
        specs.push_back(spec);
    }

    SearchResult result;
    result.trials.reserve(specs.size());
    double best_loss = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n_trials; ++t) {
        Trial trial;
        trial.index = t;
        trial.spec = specs[static_cast<std::size_t>(t)];
        const std::uint64_t trial_seed = seed + static_cast<std::uint64_t>(t);

        neural::CnnModel model = neural::init_model(trial.spec, p, trial_seed);
        neural::TrainOptions opts = train_options;
        opts.seed = trial_seed;
        try {
            trial.report = neural::train(model, rows, targets, opts);
            trial.best_val_loss =
                *std::min_element(trial.report.val_loss.begin(), trial.report.val_loss.end());
        } catch (const DivergedError& e) {
            trial.failed = true;
            trial.failure = e.what();
            trial.best_val_loss = std::numeric_limits<double>::infinity();
        }

        if (!trial.failed && trial.best_val_loss < best_loss) {
            best_loss = trial.best_val_loss;
            result.best_index = t;
            result.best_model = model;
        }
        result.trials.push_back(std::move(trial));
    }

    if (result.best_index < 0) {
        std::string msg = "all trials diverged:";
        for (const auto& t : result.trials)
            msg += "\n  trial " + std::to_string(t.index) + ": " + t.failure;
        throw std::runtime_error(msg);
    }
    return result;
}

std::vector<ImportanceRow> importance_report(const std::vector<Trial>& trials,
                                             std::uint64_t seed) {
    std::vector<const Trial*> usable;
    for (const auto& t : trials)
        if (!t.failed) usable.push_back(&t);
    if (usable.size() < 2)
        throw std::invalid_argument("importance_report: need at least 2 completed trials");

    const std::vector<std::string> names = {"kernel size", "learning rate", "filters",
                                            "units", "dropout"};
    const std::size_t n = usable.size();
    Matrix encoded(n, names.size());
    std::vector<double> losses(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& spec = usable[i]->spec;
        encoded.at(i, 0) = static_cast<double>(spec.kernel_size);
        encoded.at(i, 1) = std::log(spec.learning_rate);
        encoded.at(i, 2) = static_cast<double>(spec.filters);
        encoded.at(i, 3) = static_cast<double>(spec.dense_units);
        encoded.at(i, 4) = spec.use_dropout ? 1.0 : 0.0;
        losses[i] = usable[i]->best_val_loss;
    }

    trees::ForestParams params;
    params.seed = seed;
    params.min_samples_leaf = 1;
    const trees::ForestModel forest = trees::fit_random_forest(encoded, losses, params);

    std::vector<double> gains(names.size(), 0.0);
    for (const auto& tree : forest.trees)
        for (const auto& node : tree.nodes)
            if (!node.is_leaf()) gains[static_cast<std::size_t>(node.feature)] += node.gain;
    double total = 0.0;
    for (double g : gains) total += g;

    std::vector<ImportanceRow> report;
    for (std::size_t j = 0; j < names.size(); ++j) {
        ImportanceRow row;
        row.name = names[j];
        // Constant loss leaves no split gain anywhere; fall back to a uniform
        // share so the importances still sum to one.
        row.importance = total > 0.0 ? gains[j] / total : 1.0 / static_cast<double>(names.size());
        std::vector<double> column(n);
        for (std::size_t i = 0; i < n; ++i) column[i] = encoded.at(i, j);
        row.correlation = pearson(column, losses);
        report.push_back(std::move(row));
    }
    return report;
}

}  // namespace nftval::tuner
