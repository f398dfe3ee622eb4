// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs against the library directly, except the end-to-end check
// which drives the CLI binary.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "nftval/bench.hpp"
#include "nftval/model_io.hpp"
#include "nftval/pipeline.hpp"
#include "nftval/synth.hpp"
#include "nftval/tuner.hpp"

using namespace nftval;
using Clock = std::chrono::steady_clock;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw CheckFailure(what);
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Shared fixtures, built once on first use.
// ---------------------------------------------------------------------------
struct Context {
    std::filesystem::path workdir;

    // 10,000-trade interaction market (criteria 2, 5, 6).
    std::vector<ingest::AssetTraits> assets;
    std::vector<ingest::TradeRecord> trades;
    std::vector<rarity::RarityResult> ranked;
    bool market_ready = false;

    bench::BenchmarkReport report;
    bool report_ready = false;
    double benchmark_seconds = 0.0;

    std::vector<tuner::Trial> tune_trials;
    int tune_best = -1;
    bool tune_ready = false;

    Context() {
        workdir = std::filesystem::temp_directory_path() /
                  ("nftval_acceptance_" + std::to_string(::getpid()));
        std::filesystem::create_directories(workdir);
    }
    ~Context() { std::filesystem::remove_all(workdir); }

    std::string file(const std::string& name) const { return (workdir / name).string(); }

    static synth::SynthConfig market_config() {
        synth::SynthConfig config;
        config.seed = 20240901;
        config.tokens = 500;
        config.days = 50;
        config.trades_per_day_min = 200;
        config.trades_per_day_max = 200;  // exactly 10,000 trades
        config.pricing = synth::PricingKind::Interaction;
        return config;
    }

    void ensure_market() {
        if (market_ready) return;
        const auto config = market_config();
        assets = synth::generate_collection(config);
        const auto stats = rarity::build_collection_stats(assets);
        auto scored = rarity::score_collection(assets, stats);
        rarity::rank_collection(scored.results);
        ranked = scored.results;
        auto [t, g] = synth::generate_trades(config, assets, ranked);
        trades = std::move(t);
        require(trades.size() == 10000, "fixture should have exactly 10,000 trades");
        market_ready = true;
    }

    void ensure_report() {
        if (report_ready) return;
        ensure_market();
        bench::BenchConfig config;
        config.seed = 7;
        const auto start = Clock::now();
        report = bench::run_benchmark(trades, assets, config);
        benchmark_seconds = seconds_since(start);
        report_ready = true;
    }

    void ensure_tune() {
        if (tune_ready) return;
        ensure_market();
        const auto market_days = feat::aggregate_market_days(trades);
        const auto schema =
            feat::FeatureSchema::make(feat::FeatureSet::X1, feat::default_trait_categories());
        auto dataset = feat::build_dataset(trades, assets, ranked, market_days, schema,
                                           feat::TargetTransform::LogEth);
        auto [train, test] = feat::chronological_split(dataset, 0.2);
        const auto standardizer = feat::Standardizer::fit(train);
        train = standardizer.apply(train);

        // Keep the search affordable: a chronological slice of the training
        // rows, six trials, full 25-epoch/batch-32 budget.
        const std::size_t subset = std::min<std::size_t>(train.size(), 1200);
        Matrix rows(0, train.rows.cols());
        std::vector<double> targets;
        for (std::size_t i = 0; i < subset; ++i) {
            rows.append_row(train.rows.row(i));
            targets.push_back(train.targets[i]);
        }

        neural::TrainOptions options;
        options.epochs_cap = 25;
        options.batch_size = 32;
        const auto result = tuner::random_search({}, rows, targets, 6, 11, options);
        tune_trials = result.trials;
        tune_best = result.best_index;
        tune_ready = true;
    }
};

// Independent direct evaluation of the rarity definitions, with its own
// tallies and log identity.
struct RarityOracle {
    std::vector<double> info;
    std::vector<double> score;
    std::vector<std::size_t> rank;

    explicit RarityOracle(const std::vector<ingest::AssetTraits>& assets) {
        const double n = static_cast<double>(assets.size());
        std::set<std::string> category_set;
        for (const auto& a : assets)
            for (const auto& [cat, value] : a.traits) category_set.insert(cat);

        auto value_of = [](const ingest::AssetTraits& a, const std::string& cat) {
            for (const auto& [c, v] : a.traits)
                if (c == cat) return v;
            return std::string("<none>");
        };

        std::map<std::string, std::map<std::string, std::size_t>> tally;
        for (const auto& cat : category_set)
            for (const auto& a : assets) tally[cat][value_of(a, cat)]++;

        info.resize(assets.size());
        for (std::size_t i = 0; i < assets.size(); ++i) {
            double bits = 0.0;
            for (const auto& cat : category_set) {
                const double p =
                    static_cast<double>(tally[cat][value_of(assets[i], cat)]) / n;
                bits -= std::log(p) / std::log(2.0);
            }
            info[i] = bits;
        }

        double mean = 0.0;
        for (double b : info) mean += b;
        mean /= n;
        score.resize(assets.size());
        for (std::size_t i = 0; i < assets.size(); ++i)
            score[i] = mean == 0.0 ? 1.0 : info[i] / mean;

        rank.resize(assets.size());
        for (std::size_t i = 0; i < assets.size(); ++i) {
            std::size_t ahead = 0;
            for (std::size_t j = 0; j < assets.size(); ++j) {
                if (score[j] > score[i]) ++ahead;
                else if (score[j] == score[i] && assets[j].token_id < assets[i].token_id)
                    ++ahead;
            }
            rank[i] = ahead + 1;
        }
    }
};

void criterion_rarity_oracle(Context&) {
    synth::SynthConfig config;
    config.seed = 404;
    config.tokens = 1000;
    auto assets = synth::generate_collection(config);
    for (std::size_t i = 0; i < assets.size(); i += 13) assets[i].traits.pop_back();

    const auto start = Clock::now();
    const auto stats = rarity::build_collection_stats(assets);
    auto scored = rarity::score_collection(assets, stats);
    rarity::rank_collection(scored.results);
    const double elapsed = seconds_since(start);

    const RarityOracle oracle(assets);
    double mean = 0.0;
    std::set<std::size_t> ranks;
    for (std::size_t i = 0; i < assets.size(); ++i) {
        const auto& r = scored.results[i];
        require(std::abs(r.information_content - oracle.info[i]) <=
                    1e-12 * std::max(1.0, std::abs(oracle.info[i])),
                "information content deviates from the oracle");
        require(std::abs(r.rarity_score - oracle.score[i]) <=
                    1e-12 * std::max(1.0, std::abs(oracle.score[i])),
                "rarity score deviates from the oracle");
        require(r.rarity_rank == oracle.rank[i], "rank deviates from the oracle");
        mean += r.rarity_score;
        ranks.insert(r.rarity_rank);
    }
    mean /= static_cast<double>(assets.size());
    require(std::abs(mean - 1.0) <= 1e-12, "mean rarity score is not 1");
    require(ranks.size() == 1000 && *ranks.begin() == 1 && *ranks.rbegin() == 1000,
            "ranks are not a permutation of 1..1000");
    require(elapsed < 1.0, "rarity scoring exceeded 1 s");
}

void criterion_linear_identities(Context& ctx) {
    ctx.ensure_market();
    const auto market_days = feat::aggregate_market_days(ctx.trades);
    const auto schema =
        feat::FeatureSchema::make(feat::FeatureSet::X1, feat::default_trait_categories());
    auto dataset = feat::build_dataset(ctx.trades, ctx.assets, ctx.ranked, market_days,
                                       schema, feat::TargetTransform::Eth);
    auto [train, test] = feat::chronological_split(dataset, 0.2);
    const auto standardizer = feat::Standardizer::fit(train);
    train = standardizer.apply(train);

    const auto& x = train.rows;
    const auto& y = train.targets;
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();

    const auto ols = linmod::fit_ols(x, y);
    const auto ridge0 = linmod::fit_ridge(x, y, 0.0);
    require(std::abs(ridge0.intercept - ols.intercept) <= 1e-8, "ridge(0) intercept != ols");
    for (std::size_t j = 0; j < p; ++j)
        require(std::abs(ridge0.coefficients[j] - ols.coefficients[j]) <= 1e-8,
                "ridge(0) coefficients != ols");

    const auto lasso0 = linmod::fit_lasso(x, y, 0.0);
    require(std::abs(lasso0.intercept - ols.intercept) <= 1e-5, "lasso(0) intercept != ols");
    for (std::size_t j = 0; j < p; ++j)
        require(std::abs(lasso0.coefficients[j] - ols.coefficients[j]) <= 1e-5,
                "lasso(0) coefficients != ols");

    // Analytic full-shrinkage threshold on centered data.
    double y_mean = 0.0;
    for (double v : y) y_mean += v;
    y_mean /= static_cast<double>(n);
    double lambda_max = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += x.at(i, j) * (y[i] - y_mean);
        lambda_max = std::max(lambda_max, std::abs(dot) / static_cast<double>(n));
    }
    const auto shrunk = linmod::fit_lasso(x, y, lambda_max * 1.01);
    for (std::size_t j = 0; j < p; ++j)
        require(shrunk.coefficients[j] == 0.0, "lasso above lambda_max kept a slope");

    for (std::size_t j = 0; j < p; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            dot += (y[i] - linmod::predict(ols, x.row(i))) * x.at(i, j);
        require(std::abs(dot) <= 1e-6 * static_cast<double>(n),
                "ols residuals are not orthogonal to features");
    }
}

void criterion_gradient_check(Context&) {
    const auto start = Clock::now();
    const tuner::HyperSpace space;
    Rng rng(2024);
    const int p = 5;

    for (int arch = 0; arch < 3; ++arch) {
        neural::CnnSpec spec;
        spec.filters = space.filters[rng.below(space.filters.size())];
        spec.kernel_size = space.kernel_sizes[rng.below(space.kernel_sizes.size())];
        spec.dense_units = space.dense_units[rng.below(space.dense_units.size())];
        spec.use_dropout = false;  // gradients are defined for the deterministic net
        spec.learning_rate =
            std::exp(rng.uniform(std::log(space.lr_low), std::log(space.lr_high)));

        const auto model0 = neural::init_model(spec, p, 1000 + arch);
        Matrix rows(0, p);
        std::vector<double> targets;
        for (int b = 0; b < 3; ++b) {
            std::vector<double> row(static_cast<std::size_t>(p));
            for (auto& v : row) v = rng.normal();
            rows.append_row(row);
            targets.push_back(rng.normal());
        }

        const auto grads = neural::backward(model0, rows, targets);
        const double h = 1e-5;
        double worst = 0.0;
        auto model = model0;
        auto check_one = [&](double& param, double analytic) {
            const double saved = param;
            param = saved + h;
            const double up = neural::mse_on(model, rows, targets);
            param = saved - h;
            const double down = neural::mse_on(model, rows, targets);
            param = saved;
            const double fd = (up - down) / (2.0 * h);
            const double mag = std::max(std::abs(fd), std::abs(analytic));
            if (mag > 1e-10) worst = std::max(worst, std::abs(fd - analytic) / mag);
        };
        auto sweep = [&](std::vector<double>& params, const std::vector<double>& analytic) {
            for (std::size_t i = 0; i < params.size(); ++i)
                check_one(params[i], analytic[i]);
        };
        sweep(model.conv_w, grads.conv_w);
        sweep(model.conv_b, grads.conv_b);
        sweep(model.dense_w, grads.dense_w);
        sweep(model.dense_b, grads.dense_b);
        sweep(model.out_w, grads.out_w);
        check_one(model.out_b, grads.out_b);

        require(worst < 1e-4, "finite-difference mismatch on architecture " +
                                  std::to_string(arch) + " (rel err " +
                                  std::to_string(worst) + ")");
    }
    require(seconds_since(start) < 30.0, "gradient check exceeded 30 s");
}

void criterion_training_progress(Context& ctx) {
    ctx.ensure_tune();
    const auto& best = ctx.tune_trials[static_cast<std::size_t>(ctx.tune_best)];
    require(!best.report.train_loss.empty(), "best trial recorded no epochs");
    const double first = best.report.train_loss.front();
    const double last = best.report.train_loss.back();
    require(std::isfinite(first) && std::isfinite(last), "non-finite training losses");
    require(last < 0.5 * first, "best trial final training loss " + std::to_string(last) +
                                    " is not below half of epoch-1 loss " +
                                    std::to_string(first));

    double best_so_far = std::numeric_limits<double>::infinity();
    for (const auto& trial : ctx.tune_trials) {
        const double next = std::min(best_so_far, trial.best_val_loss);
        require(next <= best_so_far, "best-so-far validation loss increased");
        best_so_far = next;
    }
}

void criterion_benchmark_ordering(Context& ctx) {
    ctx.ensure_report();
    require(ctx.benchmark_seconds < 120.0, "benchmark exceeded 2 minutes");

    // ETH target, feature set X1: both tree ensembles beat every linear model.
    const std::size_t eth = 0, x1 = 0;
    const double ols = ctx.report.mse[eth][0][x1];
    const double lasso = ctx.report.mse[eth][1][x1];
    const double ridge = ctx.report.mse[eth][2][x1];
    const double forest = ctx.report.mse[eth][3][x1];
    const double boosted = ctx.report.mse[eth][4][x1];
    for (double linear : {ols, lasso, ridge}) {
        require(forest < linear, "random forest does not beat a linear model on X1/eth");
        require(boosted < linear,
                "gradient boosting does not beat a linear model on X1/eth");
    }
}

void criterion_no_lookahead(Context& ctx) {
    ctx.ensure_market();
    const auto schema =
        feat::FeatureSchema::make(feat::FeatureSet::X1, feat::default_trait_categories());
    const auto full = feat::build_dataset(ctx.trades, ctx.assets, ctx.ranked,
                                          feat::aggregate_market_days(ctx.trades), schema,
                                          feat::TargetTransform::Eth);
    const std::int64_t t_min = ctx.trades.front().timestamp;
    const std::int64_t t_max = ctx.trades.back().timestamp;

    Rng rng(606);
    for (int cut_index = 0; cut_index < 100; ++cut_index) {
        const std::int64_t cut =
            t_min + static_cast<std::int64_t>(
                        rng.below(static_cast<std::uint64_t>(t_max - t_min + 1)));
        std::vector<ingest::TradeRecord> kept;
        for (const auto& t : ctx.trades)
            if (t.timestamp <= cut) kept.push_back(t);
        if (kept.empty()) continue;

        const auto partial = feat::build_dataset(kept, ctx.assets, ctx.ranked,
                                                 feat::aggregate_market_days(kept), schema,
                                                 feat::TargetTransform::Eth);
        std::size_t upto = 0;
        while (upto < full.size() && full.keys[upto].timestamp <= cut) ++upto;
        require(partial.size() == upto, "row set changed below the cut");
        for (std::size_t i = 0; i < upto; ++i) {
            require(partial.keys[i] == full.keys[i], "row keys changed below the cut");
            require(partial.targets[i] == full.targets[i], "targets changed below the cut");
            const auto a = partial.rows.row(i);
            const auto b = full.rows.row(i);
            for (std::size_t j = 0; j < a.size(); ++j)
                require(a[j] == b[j], "feature values changed below the cut");
        }
    }
}

void criterion_report_shapes(Context& ctx) {
    ctx.ensure_report();
    std::size_t finite_cells = 0;
    for (std::size_t ti = 0; ti < 3; ++ti)
        for (std::size_t mi = 0; mi < 5; ++mi)
            for (std::size_t si = 0; si < 3; ++si)
                if (std::isfinite(ctx.report.mse[ti][mi][si])) ++finite_cells;
    require(finite_cells == 45, "benchmark report does not have 45 finite cells");

    const std::string md = bench::render_report(ctx.report, bench::ReportFormat::Markdown);
    std::size_t panels = 0, pos = 0;
    while ((pos = md.find("| Model | X1 | X2 | X3 |", pos)) != std::string::npos) {
        ++panels;
        pos += 1;
    }
    require(panels == 3, "markdown report does not render three panels");

    ctx.ensure_tune();
    const auto importance = tuner::importance_report(ctx.tune_trials, 11);
    require(importance.size() == 5, "importance report does not have 5 rows");
    const std::vector<std::string> expected = {"kernel size", "learning rate", "filters",
                                               "units", "dropout"};
    double total = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        require(importance[i].name == expected[i], "importance row names mismatch");
        total += importance[i].importance;
    }
    require(std::abs(total - 1.0) <= 1e-9, "importances do not sum to 1");
}

void criterion_determinism(Context& ctx) {
    auto read_file = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        require(static_cast<bool>(in), "missing output file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    auto run_stage_pair = [&](const std::string& tag,
                              const std::function<void(const std::string&)>& stage,
                              const std::vector<std::string>& outputs) {
        for (const char* round : {"a", "b"}) stage(ctx.file(tag + "_" + round + "_"));
        for (const auto& name : outputs) {
            require(read_file(ctx.file(tag + "_a_" + name)) ==
                        read_file(ctx.file(tag + "_b_" + name)),
                    tag + ": output " + name + " differs between identical runs");
        }
    };

    synth::SynthConfig small = Context::market_config();
    small.tokens = 120;
    small.days = 14;
    small.trades_per_day_min = 20;
    small.trades_per_day_max = 30;

    run_stage_pair("synth",
                   [&](const std::string& prefix) {
                       pipeline::run_synth(small, prefix + "trades.csv",
                                           prefix + "traits.json", prefix + "truth.json");
                   },
                   {"trades.csv", "traits.json", "truth.json"});

    const std::string trades = ctx.file("synth_a_trades.csv");
    const std::string traits = ctx.file("synth_a_traits.json");

    run_stage_pair("rarity",
                   [&](const std::string& prefix) {
                       pipeline::run_rarity(traits, prefix + "rarity.csv");
                   },
                   {"rarity.csv"});

    run_stage_pair("features",
                   [&](const std::string& prefix) {
                       pipeline::FeaturesParams params;
                       pipeline::run_features(trades, traits, params,
                                              prefix + "features.csv",
                                              prefix + "schema.json");
                   },
                   {"features.csv", "schema.json"});

    run_stage_pair("pca",
                   [&](const std::string& prefix) {
                       pipeline::run_pca(trades, traits, 3, prefix + "pca.csv");
                   },
                   {"pca.csv"});

    run_stage_pair("benchmark",
                   [&](const std::string& prefix) {
                       bench::BenchConfig config;
                       config.seed = 5;
                       config.forest.n_trees = 12;
                       config.boost.n_stages = 12;
                       pipeline::run_benchmark_files(trades, traits, config,
                                                     bench::ReportFormat::Csv,
                                                     prefix + "bench.csv");
                   },
                   {"bench.csv"});

    run_stage_pair("tune",
                   [&](const std::string& prefix) {
                       pipeline::TuneParams params;
                       params.set = feat::FeatureSet::X2;
                       params.n_trials = 2;
                       params.seed = 9;
                       params.train.epochs_cap = 2;
                       pipeline::run_tune(trades, traits, params, prefix + "trials.csv",
                                          prefix + "importance.csv", prefix + "model.json");
                   },
                   {"trials.csv", "importance.csv", "model.json"});

    run_stage_pair("train",
                   [&](const std::string& prefix) {
                       modelio::TrainSpec spec;
                       spec.kind = modelio::ModelKind::Forest;
                       spec.seed = 13;
                       spec.forest.n_trees = 16;
                       pipeline::run_train(trades, traits, spec, prefix + "model.json");
                   },
                   {"model.json"});

    // Save/load round-trips predictions bit-exactly.
    const auto model = modelio::load_model(ctx.file("train_a_model.json"));
    const auto reloaded = modelio::deserialize_model(modelio::serialize_model(model));
    Rng rng(31);
    for (int probe = 0; probe < 100; ++probe) {
        std::vector<double> row(model.schema.columns.size());
        for (auto& v : row) v = 100.0 * rng.next_unit();
        require(model.predict_row(row) == reloaded.predict_row(row),
                "model save/load changed a prediction");
    }
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(NFTVAL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion_end_to_end(Context& ctx) {
    const auto start = Clock::now();
    const std::string dir = ctx.file("e2e_");

    require(run_cli("synth --seed 99 --tokens 300 --days 30 --trades-per-day-min 40"
                    " --trades-per-day-max 60 --trades-out " +
                    dir + "trades.csv --traits-out " + dir + "traits.json --truth-out " +
                    dir + "truth.json") == 0,
            "synth subcommand failed");
    const std::string io =
        " --trades " + dir + "trades.csv --traits " + dir + "traits.json";

    require(run_cli("ingest-check" + io) == 0, "ingest-check subcommand failed");
    require(run_cli("rarity --traits " + dir + "traits.json --out " + dir +
                    "rarity.csv") == 0,
            "rarity subcommand failed");
    require(run_cli("features" + io + " --set X1 --target eth --out " + dir +
                    "features.csv --schema-out " + dir + "schema.json") == 0,
            "features subcommand failed");
    require(run_cli("pca" + io + " --k 3 --out " + dir + "pca.csv") == 0,
            "pca subcommand failed");
    require(run_cli("benchmark" + io + " --split 0.2 --seed 3 --format csv --out " + dir +
                    "bench.csv") == 0,
            "benchmark subcommand failed");
    require(run_cli("report --in " + dir + "bench.csv --format md --out " + dir +
                    "bench.md") == 0,
            "report subcommand failed");
    require(run_cli("tune" + io + " --set X1 --target log_eth --trials 3 --seed 4"
                    " --epochs 25 --batch 32 --trials-out " +
                    dir + "trials.csv --importance-out " + dir + "importance.csv") == 0,
            "tune subcommand failed");
    require(run_cli("train" + io + " --model boosted --set X1 --target eth --seed 5"
                    " --stages 50 --out " +
                    dir + "model.json") == 0,
            "train subcommand failed");

    // Valuate one token with a plausible market snapshot.
    require(run_cli("predict --model " + dir + "model.json --traits " + dir +
                    "traits.json --token 7 --as-of 1700000000 --volume 250 --p5 2.5"
                    " --max 40 --min 1.5 --last-price 6.5 --last-ts 1699000000 --out " +
                    dir + "valuation.json") == 0,
            "predict subcommand failed");

    std::ifstream valuation(dir + "valuation.json");
    require(static_cast<bool>(valuation), "valuation output missing");
    std::ostringstream buf;
    buf << valuation.rdbuf();
    require(buf.str().find("valuation_eth") != std::string::npos,
            "valuation output lacks valuation_eth");

    // Usage errors exit with code 2.
    require(run_cli("") == 2, "bare invocation should exit 2");
    require(run_cli("no-such-command") == 2, "unknown subcommand should exit 2");

    require(seconds_since(start) < 300.0, "end-to-end pipeline exceeded 5 minutes");
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<void(Context&)> run;
    };
    Context ctx;
    const std::vector<Criterion> criteria = {
        {1, "rarity oracle equivalence", criterion_rarity_oracle},
        {2, "linear-model identities", criterion_linear_identities},
        {3, "gradient correctness", criterion_gradient_check},
        {4, "training budget and progress", criterion_training_progress},
        {5, "benchmark ordering pattern", criterion_benchmark_ordering},
        {6, "no-lookahead property", criterion_no_lookahead},
        {7, "report shapes", criterion_report_shapes},
        {8, "determinism", criterion_determinism},
        {9, "end-to-end pipeline", criterion_end_to_end},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = Clock::now();
        try {
            criterion.run(ctx);
            std::cout << "PASS criterion " << criterion.id << " (" << criterion.name << ") "
                      << std::fixed << std::setprecision(1) << seconds_since(start)
                      << "s\n";
        } catch (const std::exception& e) {
            std::cout << "FAIL criterion " << criterion.id << " (" << criterion.name
                      << "): " << e.what() << "\n";
            ++failures;
        }
        std::cout.flush();
    }
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all 9 criteria passed\n";
    return 0;
}
