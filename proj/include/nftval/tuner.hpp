#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nftval/core.hpp"
#include "nftval/features.hpp"
#include "nftval/neural.hpp"

namespace nftval::tuner {

struct HyperSpace {
    std::vector<int> filters{16, 32, 64};
    std::vector<int> kernel_sizes{2, 3, 4};
    std::vector<int> dense_units{32, 64, 128};
    std::vector<bool> dropout{false, true};
    double lr_low = 1e-4;   // learning rate, log-uniform
    double lr_high = 1e-2;
};

struct Trial {
    int index = 0;
    neural::CnnSpec spec;
    neural::TrainReport report;
    double best_val_loss = 0.0;
    bool failed = false;
    std::string failure;
};

struct SearchResult {
    std::vector<Trial> trials;
    int best_index = -1;
    neural::CnnModel best_model;  // trained parameters of the best trial
};

// Independent draws per trial: categorical choices uniform, learning rate
// exp-uniform over [lr_low, lr_high]. A sampled kernel wider than the input
// is redrawn. Trial t trains with seed = seed + t.
SearchResult random_search(const HyperSpace& space, const Matrix& rows,
                           std::span<const double> targets, int n_trials,
                           std::uint64_t seed, const neural::TrainOptions& train_options);

struct ImportanceRow {
    std::string name;
    double importance = 0.0;   // forest split-gain share, rows sum to 1
    double correlation = 0.0;  // Pearson vs best validation loss
};

inline constexpr const char* kImportanceMethod =
    "random-forest split-gain importance on encoded hyperparameters";

// One row per hyperparameter: kernel size, learning rate, filters, units,
// dropout. Booleans encode as 0/1 and the learning rate as its log.
std::vector<ImportanceRow> importance_report(const std::vector<Trial>& trials,
                                             std::uint64_t seed = 0);

}  // namespace nftval::tuner
