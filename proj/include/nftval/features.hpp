#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nftval/core.hpp"
#include "nftval/ingest.hpp"
#include "nftval/rarity.hpp"

namespace nftval::feat {

// Daily aggregate over the collection's positive-price trades.
struct MarketDay {
    std::int64_t day = 0;  // UTC day index (timestamp / 86400)
    double volume_eth = 0.0;
    double price_p5_eth = 0.0;
    double price_max_eth = 0.0;
    double price_min_eth = 0.0;
};

enum class FeatureSet { X1, X2, X3 };

enum class TargetTransform { Eth, LogEth, Usd };

const char* to_string(FeatureSet set);
const char* to_string(TargetTransform t);
FeatureSet feature_set_from_string(const std::string& s);
TargetTransform target_transform_from_string(const std::string& s);

// Table-1 style trait category list used when none is configured.
std::vector<std::string> default_trait_categories();

// Column layout: market block, then rarity rank + per-category counts, then
// last-trade block, filtered by the feature set. Order is fixed and recorded.
struct FeatureSchema {
    FeatureSet set = FeatureSet::X1;
    std::vector<std::string> columns;
    std::vector<std::string> categories;

    static FeatureSchema make(FeatureSet set, std::vector<std::string> categories);

    bool has_market() const { return set != FeatureSet::X3; }
    bool has_last_trade() const { return set != FeatureSet::X2; }
};

struct RowKey {
    std::int64_t token_id = 0;
    std::int64_t timestamp = 0;

    bool operator==(const RowKey&) const = default;
};

struct Dataset {
    FeatureSchema schema;
    Matrix rows;
    std::vector<double> targets;
    std::vector<RowKey> keys;
    TargetTransform target_transform = TargetTransform::Eth;

    // Availability-rule drop tallies, for reporting.
    std::size_t dropped_no_market = 0;
    std::size_t dropped_first_trade = 0;
    std::size_t dropped_bad_target = 0;

    std::size_t size() const { return rows.rows(); }
};

std::vector<MarketDay> aggregate_market_days(const std::vector<ingest::TradeRecord>& trades);

double transform_target(double price_eth, double price_usd, TargetTransform t);

Dataset build_dataset(const std::vector<ingest::TradeRecord>& trades,
                      const std::vector<ingest::AssetTraits>& assets,
                      const std::vector<rarity::RarityResult>& rarity_results,
                      const std::vector<MarketDay>& market_days,
                      const FeatureSchema& schema, TargetTransform transform);

// Last ceil(test_fraction * n) rows by trade timestamp become the test set;
// ties keep input order.
std::pair<Dataset, Dataset> chronological_split(const Dataset& dataset, double test_fraction);

// Column-wise (x - mean) / std with training statistics; population std.
// Zero-variance columns are centered only.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> stds;  // 0 marks a constant column

    static Standardizer fit(const Dataset& train);
    Dataset apply(const Dataset& dataset) const;
    void apply_row(std::span<double> row) const;
};

struct PcaResult {
    Matrix components;  // k rows, each an orthonormal direction
    std::vector<double> explained_variance_ratios;
    Matrix projections;  // n x k
    // True when k exceeded the matrix rank; trailing components carry no variance.
    bool rank_deficient = false;
};

PcaResult pca(const Matrix& matrix, std::size_t k);

}  // namespace nftval::feat
