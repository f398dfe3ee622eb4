#include "nftval/pipeline.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nftval::pipeline {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

struct LoadedData {
    std::vector<ingest::TradeRecord> trades;
    std::vector<ingest::AssetTraits> assets;
};

LoadedData load(const std::string& trades_path, const std::string& traits_path) {
    return {ingest::load_trades_file(trades_path), ingest::load_traits_file(traits_path)};
}

feat::Dataset build_full_dataset(const LoadedData& data, feat::FeatureSet set,
                                 feat::TargetTransform target,
                                 const std::vector<std::string>& categories) {
    const auto stats = rarity::build_collection_stats(data.assets);
    auto scored = rarity::score_collection(data.assets, stats);
    rarity::rank_collection(scored.results);
    const auto market_days = feat::aggregate_market_days(data.trades);
    const auto cats = categories.empty() ? feat::default_trait_categories() : categories;
    return feat::build_dataset(data.trades, data.assets, scored.results, market_days,
                               feat::FeatureSchema::make(set, cats), target);
}

}  // namespace

void run_synth(const synth::SynthConfig& config, const std::string& trades_csv,
               const std::string& traits_json, const std::string& truth_json) {
    const auto collection = synth::generate_collection(config);
    const auto stats = rarity::build_collection_stats(collection);
    auto scored = rarity::score_collection(collection, stats);
    rarity::rank_collection(scored.results);
    auto [trades, truth] = synth::generate_trades(config, collection, scored.results);

    auto tf = open_out(trades_csv);
    ingest::write_trades(tf, trades);
    auto af = open_out(traits_json);
    ingest::write_traits(af, collection);
    auto gf = open_out(truth_json);
    gf << synth::ground_truth_json(truth);
}

IngestSummary run_ingest_check(const std::string& trades_path,
                               const std::string& traits_path) {
    LoadedData data = load(trades_path, traits_path);
    IngestSummary summary;
    summary.trades = data.trades.size();
    summary.assets = data.assets.size();
    for (const auto& t : data.trades)
        if (t.price_eth <= 0.0) summary.zero_price_trades++;
    return summary;
}

void run_rarity(const std::string& traits_path, const std::string& out_csv) {
    const auto assets = ingest::load_traits_file(traits_path);
    const auto stats = rarity::build_collection_stats(assets);
    auto scored = rarity::score_collection(assets, stats);
    rarity::rank_collection(scored.results);

    auto f = open_out(out_csv);
    f << "token_id,information_content,rarity_score,rarity_rank\n";
    for (const auto& r : scored.results)
        f << r.token_id << ',' << format_double(r.information_content) << ','
          << format_double(r.rarity_score) << ',' << r.rarity_rank << "\n";
}

void run_features(const std::string& trades_path, const std::string& traits_path,
                  const FeaturesParams& params, const std::string& out_csv,
                  const std::string& schema_json_out) {
    LoadedData data = load(trades_path, traits_path);
    feat::Dataset dataset =
        build_full_dataset(data, params.set, params.target, params.categories);
    if (dataset.size() < 2)
        throw std::runtime_error("features: dataset has fewer than 2 rows after filtering");

    auto [train, test] = feat::chronological_split(dataset, params.test_fraction);
    feat::Standardizer standardizer;
    if (params.standardize) {
        standardizer = feat::Standardizer::fit(train);
        train = standardizer.apply(train);
        test = standardizer.apply(test);
    }

    auto f = open_out(out_csv);
    f << "token_id,timestamp";
    for (const auto& col : dataset.schema.columns) f << ',' << col;
    f << ",target,split\n";
    auto emit = [&](const feat::Dataset& part, const char* tag) {
        for (std::size_t i = 0; i < part.size(); ++i) {
            f << part.keys[i].token_id << ',' << part.keys[i].timestamp;
            for (double v : part.rows.row(i)) f << ',' << format_double(v);
            f << ',' << format_double(part.targets[i]) << ',' << tag << "\n";
        }
    };
    emit(train, "train");
    emit(test, "test");

    nlohmann::json schema;
    schema["feature_set_id"] = feat::to_string(dataset.schema.set);
    schema["columns"] = dataset.schema.columns;
    schema["categories"] = dataset.schema.categories;
    schema["target_transform"] = feat::to_string(params.target);
    schema["test_fraction"] = params.test_fraction;
    schema["split_boundary_timestamp"] = test.keys.front().timestamp;
    schema["standardized"] = params.standardize;
    schema["rows"] = dataset.size();
    schema["dropped_no_market"] = dataset.dropped_no_market;
    schema["dropped_first_trade"] = dataset.dropped_first_trade;
    schema["dropped_bad_target"] = dataset.dropped_bad_target;
    auto sf = open_out(schema_json_out);
    sf << schema.dump(2) << "\n";
}

void run_pca(const std::string& trades_path, const std::string& traits_path, std::size_t k,
             const std::string& out_csv) {
    LoadedData data = load(trades_path, traits_path);
    // Traits-and-rarity block only, one row per trade, priced in ETH.
    feat::Dataset dataset =
        build_full_dataset(data, feat::FeatureSet::X2, feat::TargetTransform::Eth, {});
    if (dataset.size() < 2)
        throw std::runtime_error("pca: dataset has fewer than 2 rows after filtering");

    const std::size_t market_cols = 4;
    Matrix traits_block(dataset.size(), dataset.rows.cols() - market_cols);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        auto row = dataset.rows.row(i);
        for (std::size_t j = market_cols; j < row.size(); ++j)
            traits_block.at(i, j - market_cols) = row[j];
    }
    feat::Dataset holder;
    holder.rows = traits_block;
    const auto standardizer = feat::Standardizer::fit(holder);
    for (std::size_t i = 0; i < traits_block.rows(); ++i)
        standardizer.apply_row(traits_block.row(i));

    const auto result = feat::pca(traits_block, k);
    auto f = open_out(out_csv);
    for (std::size_t c = 0; c < k; ++c) f << "pc" << (c + 1) << ',';
    f << "price\n";
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        for (std::size_t c = 0; c < k; ++c)
            f << format_double(result.projections.at(i, c)) << ',';
        f << format_double(dataset.targets[i]) << "\n";
    }
}

bench::BenchmarkReport run_benchmark_files(const std::string& trades_path,
                                           const std::string& traits_path,
                                           const bench::BenchConfig& config,
                                           bench::ReportFormat format,
                                           const std::string& out_path) {
    LoadedData data = load(trades_path, traits_path);
    const auto report = bench::run_benchmark(data.trades, data.assets, config);
    auto f = open_out(out_path);
    f << bench::render_report(report, format);
    return report;
}

void run_report(const std::string& bench_csv_path, bench::ReportFormat format,
                const std::string& out_path) {
    std::ifstream in(bench_csv_path);
    if (!in) throw std::runtime_error("cannot open benchmark CSV: " + bench_csv_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto report = bench::parse_report_csv(buf.str());
    auto f = open_out(out_path);
    f << bench::render_report(report, format);
}

TuneOutcome run_tune(const std::string& trades_path, const std::string& traits_path,
                     const TuneParams& params, const std::string& trials_csv,
                     const std::string& importance_csv,
                     const std::optional<std::string>& best_model_out) {
    LoadedData data = load(trades_path, traits_path);
    feat::Dataset dataset =
        build_full_dataset(data, params.set, params.target, params.categories);
    if (dataset.size() < 2)
        throw std::runtime_error("tune: dataset has fewer than 2 rows after filtering");

    auto [train, test] = feat::chronological_split(dataset, params.test_fraction);
    feat::Standardizer standardizer;
    if (params.standardize) {
        standardizer = feat::Standardizer::fit(train);
        train = standardizer.apply(train);
        test = standardizer.apply(test);
    }

    const auto result = tuner::random_search(params.space, train.rows, train.targets,
                                             params.n_trials, params.seed, params.train);

    auto tf = open_out(trials_csv);
    tf << "trial,filters,kernel,units,dropout,lr,val_loss\n";
    for (const auto& trial : result.trials) {
        tf << trial.index << ',' << trial.spec.filters << ',' << trial.spec.kernel_size
           << ',' << trial.spec.dense_units << ',' << (trial.spec.use_dropout ? 1 : 0)
           << ',' << format_double(trial.spec.learning_rate) << ','
           << format_double(trial.best_val_loss) << "\n";
    }

    const auto importance = tuner::importance_report(result.trials, params.seed);
    auto imf = open_out(importance_csv);
    imf << "# method: " << tuner::kImportanceMethod << "\n";
    imf << "hyperparameter,importance,correlation\n";
    for (const auto& row : importance)
        imf << row.name << ',' << format_double(row.importance) << ','
            << format_double(row.correlation) << "\n";

    const auto& best = result.trials[static_cast<std::size_t>(result.best_index)];
    if (best_model_out) {
        modelio::TrainedModel model;
        model.kind = modelio::ModelKind::Cnn;
        model.schema = dataset.schema;
        model.target_transform = params.target;
        model.standardized = params.standardize;
        model.standardizer = standardizer;
        model.cnn = result.best_model;
        model.seed = params.seed;
        model.split_boundary = test.keys.front().timestamp;
        model.data_start = train.keys.front().timestamp;
        model.data_end = test.keys.back().timestamp;
        model.train_rows = train.size();
        model.test_rows = test.size();
        model.train_mse = neural::mse_on(result.best_model, train.rows, train.targets);
        model.test_mse = neural::mse_on(result.best_model, test.rows, test.targets);
        model.dataset_fingerprint = modelio::dataset_fingerprint(dataset);
        save_model(model, *best_model_out);
    }

    TuneOutcome outcome;
    outcome.best_trial = result.best_index;
    outcome.best_val_loss = best.best_val_loss;
    outcome.best_spec = best.spec;
    return outcome;
}

TrainOutcome run_train(const std::string& trades_path, const std::string& traits_path,
                       const modelio::TrainSpec& spec, const std::string& model_out) {
    LoadedData data = load(trades_path, traits_path);
    const auto model = modelio::train_model(data.trades, data.assets, spec);
    modelio::save_model(model, model_out);
    return {model.train_mse, model.test_mse, model.fingerprint()};
}

}  // namespace nftval::pipeline
