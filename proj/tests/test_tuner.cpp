#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "nftval/tuner.hpp"

using namespace nftval;
using namespace nftval::tuner;

namespace {

Matrix random_matrix(std::size_t n, std::size_t p, Rng& rng) {
    Matrix m(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) m.at(i, j) = rng.normal();
    return m;
}

struct TinyProblem {
    Matrix rows;
    std::vector<double> targets;
    neural::TrainOptions options;

    explicit TinyProblem(std::size_t n = 30, std::size_t p = 6) {
        Rng rng(900);
        rows = random_matrix(n, p, rng);
        targets.resize(n);
        for (std::size_t i = 0; i < n; ++i) targets[i] = rows.at(i, 0);
        options.epochs_cap = 1;
        options.batch_size = 32;
    }
};

// Hand-built trials for the report tests; no training involved.
Trial made_trial(int index, int kernel, double lr, int filters, int units, bool dropout,
                 double loss) {
    Trial t;
    t.index = index;
    t.spec.kernel_size = kernel;
    t.spec.learning_rate = lr;
    t.spec.filters = filters;
    t.spec.dense_units = units;
    t.spec.use_dropout = dropout;
    t.best_val_loss = loss;
    return t;
}

}  // namespace

TEST_CASE("random search is reproducible") {
    TinyProblem problem;
    const auto a = random_search({}, problem.rows, problem.targets, 5, 77, problem.options);
    const auto b = random_search({}, problem.rows, problem.targets, 5, 77, problem.options);
    REQUIRE(a.trials.size() == 5);
    CHECK(a.best_index == b.best_index);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(a.trials[i].spec.filters == b.trials[i].spec.filters);
        CHECK(a.trials[i].spec.kernel_size == b.trials[i].spec.kernel_size);
        CHECK(a.trials[i].spec.learning_rate == b.trials[i].spec.learning_rate);
        CHECK(a.trials[i].best_val_loss == b.trials[i].best_val_loss);
    }
}

TEST_CASE("a single trial is the best trial") {
    TinyProblem problem;
    const auto result =
        random_search({}, problem.rows, problem.targets, 1, 3, problem.options);
    CHECK(result.best_index == 0);
    CHECK(result.trials[0].best_val_loss ==
          *std::min_element(result.trials[0].report.val_loss.begin(),
                            result.trials[0].report.val_loss.end()));
}

TEST_CASE("sampled learning rates cover the log range") {
    TinyProblem problem;
    const auto result =
        random_search({}, problem.rows, problem.targets, 50, 1234, problem.options);
    const HyperSpace space;
    const double mid = std::exp(0.5 * (std::log(space.lr_low) + std::log(space.lr_high)));
    int low_half = 0, high_half = 0;
    for (const auto& trial : result.trials) {
        const double lr = trial.spec.learning_rate;
        CHECK(lr >= space.lr_low);
        CHECK(lr <= space.lr_high);
        (lr < mid ? low_half : high_half)++;
    }
    CHECK(low_half >= 15);
    CHECK(high_half >= 15);
}

TEST_CASE("kernels wider than the input are resampled") {
    TinyProblem problem(24, 2);  // p = 2: only kernel 2 fits
    const auto result =
        random_search({}, problem.rows, problem.targets, 8, 5, problem.options);
    for (const auto& trial : result.trials) CHECK(trial.spec.kernel_size == 2);
}

TEST_CASE("search validates its inputs") {
    TinyProblem problem;
    CHECK_THROWS_AS(random_search({}, problem.rows, problem.targets, 0, 1, problem.options),
                    std::invalid_argument);
    HyperSpace bad;
    bad.kernel_sizes = {40};  // wider than the 6 input columns
    CHECK_THROWS_AS(random_search(bad, problem.rows, problem.targets, 2, 1, problem.options),
                    std::invalid_argument);
}

TEST_CASE("best-so-far validation loss is monotone non-increasing") {
    TinyProblem problem;
    const auto result =
        random_search({}, problem.rows, problem.targets, 10, 42, problem.options);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_so_far;
    for (const auto& trial : result.trials) {
        best = std::min(best, trial.best_val_loss);
        best_so_far.push_back(best);
    }
    for (std::size_t i = 1; i < best_so_far.size(); ++i)
        CHECK(best_so_far[i] <= best_so_far[i - 1]);
    CHECK(best == result.trials[static_cast<std::size_t>(result.best_index)].best_val_loss);
}

TEST_CASE("importance report rows follow the fixed hyperparameter list") {
    std::vector<Trial> trials;
    Rng rng(60);
    for (int i = 0; i < 12; ++i)
        trials.push_back(made_trial(i, 2 + i % 3, std::exp(rng.uniform(-9.0, -4.6)),
                                    16 << (i % 3), 32 << (i % 3), i % 2 == 0,
                                    rng.next_unit()));
    const auto report = importance_report(trials, 1);
    REQUIRE(report.size() == 5);
    CHECK(report[0].name == "kernel size");
    CHECK(report[1].name == "learning rate");
    CHECK(report[2].name == "filters");
    CHECK(report[3].name == "units");
    CHECK(report[4].name == "dropout");

    double total = 0.0;
    for (const auto& row : report) {
        CHECK(row.importance >= 0.0);
        total += row.importance;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("constant losses give zero correlations") {
    std::vector<Trial> trials;
    for (int i = 0; i < 6; ++i)
        trials.push_back(made_trial(i, 2 + i % 3, 1e-3 * (i + 1), 16, 32, false, 0.5));
    const auto report = importance_report(trials, 0);
    for (const auto& row : report) CHECK(row.correlation == 0.0);
    double total = 0.0;
    for (const auto& row : report) total += row.importance;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a loss equal to the log learning rate correlates perfectly") {
    std::vector<Trial> trials;
    Rng rng(61);
    for (int i = 0; i < 20; ++i) {
        const double lr = std::exp(rng.uniform(-9.2, -4.6));
        trials.push_back(made_trial(i, 2 + i % 3, lr, 16 << (i % 3), 32, i % 2 == 0,
                                    std::log(lr)));
    }
    const auto report = importance_report(trials, 0);
    CHECK(report[1].correlation == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("importance needs at least two usable trials") {
    std::vector<Trial> one = {made_trial(0, 2, 1e-3, 16, 32, false, 1.0)};
    CHECK_THROWS_AS(importance_report(one, 0), std::invalid_argument);

    auto failed = made_trial(1, 3, 1e-3, 16, 32, false, 2.0);
    failed.failed = true;
    std::vector<Trial> mixed = {made_trial(0, 2, 1e-3, 16, 32, false, 1.0), failed};
    CHECK_THROWS_AS(importance_report(mixed, 0), std::invalid_argument);
}
