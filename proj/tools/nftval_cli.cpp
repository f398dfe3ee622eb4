// Command-line front end. All engine access goes through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nftval.h"

namespace {

int fail(nftval_status status) {
    std::cerr << "error: " << nftval_last_error() << "\n";
    return status == NFTVAL_ERR_ARGUMENT ? 2 : 1;
}

std::string valuation_json(const nftval_valuation& v) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "{\"token_id\": %lld, \"valuation_eth\": %.17g, "
                  "\"log_transformed\": %s, \"model_kind\": \"%s\", "
                  "\"schema_id\": \"%s\", \"model_fingerprint\": \"%s\"}",
                  v.token_id, v.valuation_eth, v.log_transformed ? "true" : "false",
                  v.model_kind, v.schema_id, v.model_fingerprint);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collection-agnostic NFT valuation engine"};
    app.require_subcommand(1);

    // --- synth ---
    auto* synth = app.add_subcommand("synth", "Generate a synthetic collection and market");
    nftval_synth_params synth_params;
    nftval_synth_params_init(&synth_params);
    std::string synth_pricing = synth_params.pricing;
    std::string synth_trades = "trades.csv", synth_traits = "traits.json",
                synth_truth = "truth.json";
    synth->add_option("--seed", synth_params.seed, "Random seed");
    synth->add_option("--tokens", synth_params.tokens, "Collection size");
    synth->add_option("--days", synth_params.days, "Number of market days");
    synth->add_option("--trades-per-day-min", synth_params.trades_per_day_min);
    synth->add_option("--trades-per-day-max", synth_params.trades_per_day_max);
    synth->add_option("--pricing", synth_pricing, "constant|linear|interaction");
    synth->add_option("--noise", synth_params.noise_sigma, "Price noise sigma");
    synth->add_option("--trades-out", synth_trades, "Trades CSV path");
    synth->add_option("--traits-out", synth_traits, "Traits JSON path");
    synth->add_option("--truth-out", synth_truth, "Ground-truth JSON path");

    // --- ingest-check ---
    auto* ingest = app.add_subcommand("ingest-check", "Validate trades and traits files");
    std::string in_trades, in_traits;
    ingest->add_option("--trades", in_trades, "Trades CSV")->required();
    ingest->add_option("--traits", in_traits, "Traits JSON")->required();

    // --- rarity ---
    auto* rarity = app.add_subcommand("rarity", "Score and rank collection rarity");
    std::string rarity_traits, rarity_out = "rarity.csv";
    rarity->add_option("--traits", rarity_traits, "Traits JSON")->required();
    rarity->add_option("--out", rarity_out, "Output CSV");

    // --- features ---
    auto* features = app.add_subcommand("features", "Build a feature dataset");
    nftval_features_params features_params;
    nftval_features_params_init(&features_params);
    std::string feat_trades, feat_traits, feat_set = "X1", feat_target = "eth";
    std::string feat_out = "features.csv", feat_schema = "features.schema.json";
    bool feat_no_standardize = false;
    features->add_option("--trades", feat_trades)->required();
    features->add_option("--traits", feat_traits)->required();
    features->add_option("--set", feat_set, "X1|X2|X3");
    features->add_option("--target", feat_target, "eth|log_eth|usd");
    features->add_option("--split", features_params.test_fraction, "Test fraction");
    features->add_flag("--no-standardize", feat_no_standardize);
    features->add_option("--out", feat_out, "Dataset CSV");
    features->add_option("--schema-out", feat_schema, "Schema sidecar JSON");

    // --- pca ---
    auto* pca = app.add_subcommand("pca", "Project traits/rarity features for plotting");
    std::string pca_trades, pca_traits, pca_out = "pca.csv";
    int pca_k = 3;
    pca->add_option("--trades", pca_trades)->required();
    pca->add_option("--traits", pca_traits)->required();
    pca->add_option("--k", pca_k, "Number of components");
    pca->add_option("--out", pca_out, "Output CSV");

    // --- benchmark ---
    auto* benchmark = app.add_subcommand("benchmark", "Run the 45-cell model benchmark");
    nftval_benchmark_params bench_params;
    nftval_benchmark_params_init(&bench_params);
    std::string bench_trades, bench_traits, bench_format = "csv", bench_out = "benchmark.csv";
    benchmark->add_option("--trades", bench_trades)->required();
    benchmark->add_option("--traits", bench_traits)->required();
    benchmark->add_option("--split", bench_params.test_fraction, "Test fraction");
    benchmark->add_option("--seed", bench_params.seed, "Random seed");
    benchmark->add_option("--format", bench_format, "csv|md");
    benchmark->add_option("--out", bench_out, "Output path");

    // --- report ---
    auto* report = app.add_subcommand("report", "Re-render a saved benchmark CSV");
    std::string report_in, report_format = "md", report_out = "benchmark.md";
    report->add_option("--in", report_in, "Benchmark CSV")->required();
    report->add_option("--format", report_format, "csv|md");
    report->add_option("--out", report_out, "Output path");

    // --- tune ---
    auto* tune = app.add_subcommand("tune", "Random-search CNN hyperparameters");
    nftval_tune_params tune_params;
    nftval_tune_params_init(&tune_params);
    std::string tune_trades, tune_traits, tune_set = "X1", tune_target = "eth";
    std::string tune_trials_out = "trials.csv", tune_importance_out = "importance.csv";
    std::string tune_model_out;
    tune->add_option("--trades", tune_trades)->required();
    tune->add_option("--traits", tune_traits)->required();
    tune->add_option("--set", tune_set, "X1|X2|X3");
    tune->add_option("--target", tune_target, "eth|log_eth|usd");
    tune->add_option("--split", tune_params.test_fraction, "Test fraction");
    tune->add_option("--trials", tune_params.n_trials, "Number of trials");
    tune->add_option("--seed", tune_params.seed, "Random seed");
    tune->add_option("--epochs", tune_params.epochs, "Epoch cap per trial");
    tune->add_option("--batch", tune_params.batch_size, "Batch size");
    tune->add_option("--trials-out", tune_trials_out, "Trials CSV");
    tune->add_option("--importance-out", tune_importance_out, "Importance CSV");
    tune->add_option("--best-model-out", tune_model_out, "Save the winning model here");

    // --- train ---
    auto* train = app.add_subcommand("train", "Fit one model and save it");
    nftval_train_params train_params;
    nftval_train_params_init(&train_params);
    std::string train_trades, train_traits, train_kind = "ols", train_set = "X1",
                train_target = "eth", train_out = "model.json";
    bool train_no_standardize = false, train_cnn_dropout = false;
    train->add_option("--trades", train_trades)->required();
    train->add_option("--traits", train_traits)->required();
    train->add_option("--model", train_kind, "ols|ridge|lasso|tree|forest|boosted|cnn");
    train->add_option("--set", train_set, "X1|X2|X3");
    train->add_option("--target", train_target, "eth|log_eth|usd");
    train->add_option("--split", train_params.test_fraction, "Test fraction");
    train->add_option("--seed", train_params.seed, "Random seed");
    train->add_flag("--no-standardize", train_no_standardize);
    train->add_option("--ridge-lambda", train_params.ridge_lambda);
    train->add_option("--lasso-lambda", train_params.lasso_lambda);
    train->add_option("--tree-depth", train_params.tree_max_depth);
    train->add_option("--tree-min-leaf", train_params.tree_min_samples_leaf);
    train->add_option("--trees", train_params.forest_trees, "Forest size");
    train->add_option("--forest-depth", train_params.forest_max_depth);
    train->add_option("--forest-min-leaf", train_params.forest_min_samples_leaf);
    train->add_option("--forest-features", train_params.forest_features_per_split,
                      "Features per split (0 = ceil(p/3))");
    train->add_option("--stages", train_params.boost_stages, "Boosting stages");
    train->add_option("--eta", train_params.boost_learning_rate, "Boosting learning rate");
    train->add_option("--boost-depth", train_params.boost_max_depth);
    train->add_option("--filters", train_params.cnn_filters);
    train->add_option("--kernel", train_params.cnn_kernel);
    train->add_option("--units", train_params.cnn_units);
    train->add_flag("--dropout", train_cnn_dropout);
    train->add_option("--dropout-rate", train_params.cnn_dropout_rate);
    train->add_option("--lr", train_params.cnn_learning_rate);
    train->add_option("--epochs", train_params.cnn_epochs);
    train->add_option("--batch", train_params.cnn_batch_size);
    train->add_option("--out", train_out, "Model file path");

    // --- predict ---
    auto* predict = app.add_subcommand("predict", "Valuate one token with a saved model");
    std::string predict_model, predict_traits, predict_out;
    nftval_request request;
    nftval_request_init(&request);
    bool have_last_price = false, have_last_ts = false;
    predict->add_option("--model", predict_model, "Model file")->required();
    predict->add_option("--traits", predict_traits, "Traits JSON")->required();
    predict->add_option("--token", request.token_id, "Token id")->required();
    predict->add_option("--as-of", request.as_of_timestamp, "Valuation timestamp")
        ->required();
    predict->add_option("--volume", request.volume_eth, "Prior-day volume (ETH)")
        ->required();
    predict->add_option("--p5", request.price_p5_eth, "Prior-day 5th percentile (ETH)")
        ->required();
    predict->add_option("--max", request.price_max_eth, "Prior-day max (ETH)")->required();
    predict->add_option("--min", request.price_min_eth, "Prior-day min (ETH)")->required();
    auto* lp = predict->add_option("--last-price", request.last_trade_price_eth,
                                   "Last trade price (ETH)");
    auto* lt = predict->add_option("--last-ts", request.last_trade_timestamp,
                                   "Last trade timestamp");
    predict->add_option("--rate", request.eth_usd_rate,
                        "ETH/USD rate (USD-target models only)");
    predict->add_option("--out", predict_out, "Also write the JSON here");
    lp->needs(lt);
    lt->needs(lp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    have_last_price = lp->count() > 0;
    have_last_ts = lt->count() > 0;

    if (synth->parsed()) {
        synth_params.pricing = synth_pricing.c_str();
        const auto rc = nftval_synth_run(&synth_params, synth_trades.c_str(),
                                         synth_traits.c_str(), synth_truth.c_str());
        if (rc != NFTVAL_OK) return fail(rc);
        std::cout << "wrote " << synth_trades << ", " << synth_traits << ", " << synth_truth
                  << "\n";
        return 0;
    }

    if (ingest->parsed()) {
        size_t trades = 0, assets = 0, zero = 0;
        const auto rc =
            nftval_ingest_check(in_trades.c_str(), in_traits.c_str(), &trades, &assets, &zero);
        if (rc != NFTVAL_OK) return fail(rc);
        std::cout << "trades: " << trades << "\nassets: " << assets
                  << "\nzero_price_trades: " << zero << "\n";
        return 0;
    }

    if (rarity->parsed()) {
        const auto rc = nftval_rarity_run(rarity_traits.c_str(), rarity_out.c_str());
        if (rc != NFTVAL_OK) return fail(rc);
        std::cout << "wrote " << rarity_out << "\n";
        return 0;
    }

    if (features->parsed()) {
        features_params.feature_set = feat_set.c_str();
        features_params.target = feat_target.c_str();
        features_params.standardize = feat_no_standardize ? 0 : 1;
        const auto rc = nftval_features_run(feat_trades.c_str(), feat_traits.c_str(),
                                            &features_params, feat_out.c_str(),
                                            feat_schema.c_str());
        if (rc != NFTVAL_OK) return fail(rc);
        std::cout << "wrote " << feat_out << " and " << feat_schema << "\n";
        return 0;
    }

    if (pca->parsed()) {
        const auto rc =
            nftval_pca_run(pca_trades.c_str(), pca_traits.c_str(), pca_k, pca_out.c_str());
        if (rc != NFTVAL_OK) return fail(rc);
        std::cout << "wrote " << pca_out << "\n";
        return 0;
    }

    if (benchmark->parsed()) {
        bench_params.format = bench_format.c_str();
        const auto rc = nftval_benchmark_run(bench_trades.c_str(), bench_traits.c_str(),
                                             &bench_params, bench_out.c_str());
        if (rc != NFTVAL_OK) return fail(rc);
        std::cout << "wrote " << bench_out << "\n";
        return 0;
    }

    if (report->parsed()) {
        const auto rc =
            nftval_report_render(report_in.c_str(), report_format.c_str(), report_out.c_str());
        if (rc != NFTVAL_OK) return fail(rc);
        std::cout << "wrote " << report_out << "\n";
        return 0;
    }

    if (tune->parsed()) {
        tune_params.feature_set = tune_set.c_str();
        tune_params.target = tune_target.c_str();
        int best_trial = -1;
        double best_loss = 0.0;
        const auto rc = nftval_tune_run(
            tune_trades.c_str(), tune_traits.c_str(), &tune_params, tune_trials_out.c_str(),
            tune_importance_out.c_str(), tune_model_out.empty() ? nullptr : tune_model_out.c_str(),
            &best_trial, &best_loss);
        if (rc != NFTVAL_OK) return fail(rc);
        std::cout << "best trial: " << best_trial << " (val_loss " << best_loss << ")\n";
        std::cout << "wrote " << tune_trials_out << " and " << tune_importance_out << "\n";
        if (!tune_model_out.empty()) std::cout << "wrote " << tune_model_out << "\n";
        return 0;
    }

    if (train->parsed()) {
        train_params.model_kind = train_kind.c_str();
        train_params.feature_set = train_set.c_str();
        train_params.target = train_target.c_str();
        train_params.standardize = train_no_standardize ? 0 : 1;
        train_params.cnn_dropout = train_cnn_dropout ? 1 : 0;
        double train_mse = 0.0, test_mse = 0.0;
        const auto rc = nftval_train_run(train_trades.c_str(), train_traits.c_str(),
                                         &train_params, train_out.c_str(), &train_mse,
                                         &test_mse);
        if (rc != NFTVAL_OK) return fail(rc);
        std::cout << "train_mse: " << train_mse << "\ntest_mse: " << test_mse << "\nwrote "
                  << train_out << "\n";
        return 0;
    }

    if (predict->parsed()) {
        if (have_last_price && have_last_ts) request.has_last_trade = 1;

        nftval_model* model = nullptr;
        auto rc = nftval_model_load(predict_model.c_str(), &model);
        if (rc != NFTVAL_OK) return fail(rc);
        nftval_collection* collection = nullptr;
        rc = nftval_collection_load(predict_traits.c_str(), &collection);
        if (rc != NFTVAL_OK) {
            nftval_model_free(model);
            return fail(rc);
        }

        nftval_valuation valuation;
        rc = nftval_valuate(model, collection, &request, &valuation);
        nftval_collection_free(collection);
        nftval_model_free(model);
        if (rc != NFTVAL_OK) return fail(rc);

        const std::string json = valuation_json(valuation);
        std::cout << json << "\n";
        if (!predict_out.empty()) {
            std::ofstream f(predict_out);
            if (!f) {
                std::cerr << "error: cannot open for writing: " << predict_out << "\n";
                return 1;
            }
            f << json << "\n";
        }
        return 0;
    }

    return 2;
}
