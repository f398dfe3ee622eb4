#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nftval/features.hpp"
#include "nftval/ingest.hpp"
#include "nftval/trees.hpp"

namespace nftval::bench {

enum class BenchModel { Ols, Lasso, Ridge, RandomForest, GradientBoosting };

inline constexpr std::array<BenchModel, 5> kBenchModels = {
    BenchModel::Ols, BenchModel::Lasso, BenchModel::Ridge, BenchModel::RandomForest,
    BenchModel::GradientBoosting};
inline constexpr std::array<feat::FeatureSet, 3> kFeatureSets = {
    feat::FeatureSet::X1, feat::FeatureSet::X2, feat::FeatureSet::X3};
inline constexpr std::array<feat::TargetTransform, 3> kTargets = {
    feat::TargetTransform::Eth, feat::TargetTransform::LogEth, feat::TargetTransform::Usd};

const char* display_name(BenchModel model);
const char* id_name(BenchModel model);
BenchModel bench_model_from_id(const std::string& id);

struct BenchConfig {
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
    bool standardize = true;
    double ridge_lambda = 1.0;
    double lasso_lambda = 1.0;
    trees::ForestParams forest;
    trees::BoostParams boost;
    std::vector<std::string> categories;  // empty = default schema
};

struct DatasetInfo {
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::int64_t split_boundary = 0;  // timestamp of the earliest test row
};

struct BenchmarkReport {
    // Indexed [target][model][set] in the declared enum orders.
    double mse[3][5][3] = {};
    DatasetInfo datasets[3][3];  // [target][set]
    BenchModel best_model[3] = {};
    feat::FeatureSet best_set[3] = {};
    BenchConfig config;
};

double mse(std::span<const double> predictions, std::span<const double> actuals);

BenchmarkReport run_benchmark(const std::vector<ingest::TradeRecord>& trades,
                              const std::vector<ingest::AssetTraits>& assets,
                              const BenchConfig& config);

enum class ReportFormat { Csv, Markdown };

// Markdown renders three 5x3 panels (one per target); CSV is a long-format
// table that parse_report_csv round-trips.
std::string render_report(const BenchmarkReport& report, ReportFormat format);

BenchmarkReport parse_report_csv(const std::string& text);

}  // namespace nftval::bench
