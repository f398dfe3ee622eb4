#include "nftval/bench.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nftval/linmod.hpp"
#include "nftval/rarity.hpp"

namespace nftval::bench {

const char* display_name(BenchModel model) {
    switch (model) {
        case BenchModel::Ols: return "OLS";
        case BenchModel::Lasso: return "Lasso";
        case BenchModel::Ridge: return "Ridge";
        case BenchModel::RandomForest: return "Random Forest";
        case BenchModel::GradientBoosting: return "Gradient Boosting";
    }
    return "?";
}

const char* id_name(BenchModel model) {
    switch (model) {
        case BenchModel::Ols: return "ols";
        case BenchModel::Lasso: return "lasso";
        case BenchModel::Ridge: return "ridge";
        case BenchModel::RandomForest: return "forest";
        case BenchModel::GradientBoosting: return "boosted";
    }
    return "?";
}

BenchModel bench_model_from_id(const std::string& id) {
    for (BenchModel m : kBenchModels)
        if (id == id_name(m)) return m;
    throw std::invalid_argument("unknown benchmark model: " + id);
}

double mse(std::span<const double> predictions, std::span<const double> actuals) {
    if (predictions.size() != actuals.size())
        throw std::invalid_argument("mse: length mismatch");
    if (predictions.empty()) throw std::invalid_argument("mse: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - actuals[i];
        sum += d * d;
    }
    return sum / static_cast<double>(predictions.size());
}

namespace {

std::vector<double> predict_all(const linmod::LinearModel& model, const Matrix& rows) {
    std::vector<double> out(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = linmod::predict(model, rows.row(i));
    return out;
}

template <typename Model>
std::vector<double> predict_all(const Model& model, const Matrix& rows) {
    std::vector<double> out(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = model.predict(rows.row(i));
    return out;
}

}  // namespace

BenchmarkReport run_benchmark(const std::vector<ingest::TradeRecord>& trades,
                              const std::vector<ingest::AssetTraits>& assets,
                              const BenchConfig& config) {
    BenchmarkReport report;
    report.config = config;

    const auto stats = rarity::build_collection_stats(assets);
    auto scored = rarity::score_collection(assets, stats);
    rarity::rank_collection(scored.results);
    const auto market_days = feat::aggregate_market_days(trades);

    const auto categories =
        config.categories.empty() ? feat::default_trait_categories() : config.categories;

    for (std::size_t ti = 0; ti < kTargets.size(); ++ti) {
        double best_mse = std::numeric_limits<double>::infinity();
        for (std::size_t si = 0; si < kFeatureSets.size(); ++si) {
            const auto schema = feat::FeatureSchema::make(kFeatureSets[si], categories);
            feat::Dataset dataset = feat::build_dataset(trades, assets, scored.results,
                                                        market_days, schema, kTargets[ti]);
            if (dataset.size() == 0)
                throw std::runtime_error(std::string("benchmark: dataset ") +
                                         feat::to_string(kFeatureSets[si]) + "/" +
                                         feat::to_string(kTargets[ti]) +
                                         " is empty after availability filtering");

            auto [train, test] = feat::chronological_split(dataset, config.test_fraction);
            if (config.standardize) {
                const auto standardizer = feat::Standardizer::fit(train);
                train = standardizer.apply(train);
                test = standardizer.apply(test);
            }

            auto& info = report.datasets[ti][si];
            info.train_rows = train.size();
            info.test_rows = test.size();
            info.split_boundary = test.keys.front().timestamp;

            // One deterministic seed per cell.
            const std::uint64_t cell_seed =
                config.seed + 7919 * (ti * kFeatureSets.size() + si);

            for (std::size_t mi = 0; mi < kBenchModels.size(); ++mi) {
                std::vector<double> predictions;
                switch (kBenchModels[mi]) {
                    case BenchModel::Ols: {
                        const auto model = linmod::fit_ols(train.rows, train.targets);
                        predictions = predict_all(model, test.rows);
                        break;
                    }
                    case BenchModel::Lasso: {
                        const auto model =
                            linmod::fit_lasso(train.rows, train.targets, config.lasso_lambda);
                        predictions = predict_all(model, test.rows);
                        break;
                    }
                    case BenchModel::Ridge: {
                        const auto model =
                            linmod::fit_ridge(train.rows, train.targets, config.ridge_lambda);
                        predictions = predict_all(model, test.rows);
                        break;
                    }
                    case BenchModel::RandomForest: {
                        trees::ForestParams params = config.forest;
                        params.seed = cell_seed;
                        const auto model =
                            trees::fit_random_forest(train.rows, train.targets, params);
                        predictions = predict_all(model, test.rows);
                        break;
                    }
                    case BenchModel::GradientBoosting: {
                        trees::BoostParams params = config.boost;
                        params.seed = cell_seed;
                        const auto model =
                            trees::fit_gradient_boosting(train.rows, train.targets, params);
                        predictions = predict_all(model, test.rows);
                        break;
                    }
                }
                const double cell = mse(predictions, test.targets);
                report.mse[ti][mi][si] = cell;
                if (cell < best_mse) {
                    best_mse = cell;
                    report.best_model[ti] = kBenchModels[mi];
                    report.best_set[ti] = kFeatureSets[si];
                }
            }
        }
    }
    return report;
}

namespace {

const char* target_caption(feat::TargetTransform t) {
    switch (t) {
        case feat::TargetTransform::Eth: return "Y = Trade price (ETH)";
        case feat::TargetTransform::LogEth: return "Y = log (Trade price (ETH))";
        case feat::TargetTransform::Usd: return "Y = Trade price (USD)";
    }
    return "?";
}

std::string cell_text(double value, feat::TargetTransform target) {
    char buf[64];
    if (target == feat::TargetTransform::Usd)
        std::snprintf(buf, sizeof(buf), "%.2e", value);
    else
        std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

}  // namespace

std::string render_report(const BenchmarkReport& report, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::Csv) {
        out << "target,model,feature_set,mse,train_rows,test_rows,split_boundary\n";
        for (std::size_t ti = 0; ti < kTargets.size(); ++ti)
            for (std::size_t mi = 0; mi < kBenchModels.size(); ++mi)
                for (std::size_t si = 0; si < kFeatureSets.size(); ++si) {
                    const auto& info = report.datasets[ti][si];
                    out << feat::to_string(kTargets[ti]) << ',' << id_name(kBenchModels[mi])
                        << ',' << feat::to_string(kFeatureSets[si]) << ','
                        << format_double(report.mse[ti][mi][si]) << ',' << info.train_rows
                        << ',' << info.test_rows << ',' << info.split_boundary << "\n";
                }
        return out.str();
    }

    for (std::size_t ti = 0; ti < kTargets.size(); ++ti) {
        out << "### " << target_caption(kTargets[ti]) << "\n\n";
        out << "| Model | X1 | X2 | X3 |\n";
        out << "| --- | --- | --- | --- |\n";
        for (std::size_t mi = 0; mi < kBenchModels.size(); ++mi) {
            out << "| " << display_name(kBenchModels[mi]);
            for (std::size_t si = 0; si < kFeatureSets.size(); ++si)
                out << " | " << cell_text(report.mse[ti][mi][si], kTargets[ti]);
            out << " |\n";
        }
        out << "\nBest: " << display_name(report.best_model[ti]) << " on "
            << feat::to_string(report.best_set[ti]) << "\n\n";
    }
    return out.str();
}

BenchmarkReport parse_report_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) ||
        line != "target,model,feature_set,mse,train_rows,test_rows,split_boundary")
        throw ParseError("benchmark CSV: bad header");

    BenchmarkReport report;
    bool seen[3][5][3] = {};
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string target, model, set, msetext, train_rows, test_rows, boundary;
        if (!std::getline(fields, target, ',') || !std::getline(fields, model, ',') ||
            !std::getline(fields, set, ',') || !std::getline(fields, msetext, ',') ||
            !std::getline(fields, train_rows, ',') || !std::getline(fields, test_rows, ',') ||
            !std::getline(fields, boundary))
            throw ParseError("benchmark CSV: malformed row: " + line);

        std::size_t ti = 0, mi = 0, si = 0;
        const auto t = feat::target_transform_from_string(target);
        while (kTargets[ti] != t) ++ti;
        const auto m = bench_model_from_id(model);
        while (kBenchModels[mi] != m) ++mi;
        const auto s = feat::feature_set_from_string(set);
        while (kFeatureSets[si] != s) ++si;

        report.mse[ti][mi][si] = std::stod(msetext);
        report.datasets[ti][si].train_rows = std::stoull(train_rows);
        report.datasets[ti][si].test_rows = std::stoull(test_rows);
        report.datasets[ti][si].split_boundary = std::stoll(boundary);
        if (seen[ti][mi][si]) throw ParseError("benchmark CSV: duplicate cell: " + line);
        seen[ti][mi][si] = true;
        ++rows;
    }
    if (rows != 45) throw ParseError("benchmark CSV: expected 45 cells, got " +
                                     std::to_string(rows));

    for (std::size_t ti = 0; ti < kTargets.size(); ++ti) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t si = 0; si < kFeatureSets.size(); ++si)
            for (std::size_t mi = 0; mi < kBenchModels.size(); ++mi)
                if (report.mse[ti][mi][si] < best) {
                    best = report.mse[ti][mi][si];
                    report.best_model[ti] = kBenchModels[mi];
                    report.best_set[ti] = kFeatureSets[si];
                }
    }
    return report;
}

}  // namespace nftval::bench
