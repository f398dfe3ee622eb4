#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "nftval/features.hpp"
#include "nftval/ingest.hpp"
#include "nftval/linmod.hpp"
#include "nftval/neural.hpp"
#include "nftval/rarity.hpp"
#include "nftval/trees.hpp"

namespace nftval::modelio {

inline constexpr int kFormatVersion = 1;

enum class ModelKind { Ols, Ridge, Lasso, Tree, Forest, Boosted, Cnn };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

// A fitted model with everything needed to reproduce its predictions:
// schema, standardizer statistics, parameters, and training metadata.
// Metadata timestamps are data timestamps, never wall clock, so identical
// runs serialize to identical bytes.
struct TrainedModel {
    ModelKind kind = ModelKind::Ols;
    feat::FeatureSchema schema;
    feat::TargetTransform target_transform = feat::TargetTransform::Eth;
    bool standardized = false;
    feat::Standardizer standardizer;

    linmod::LinearModel linear;
    trees::RegressionTree tree;
    trees::ForestModel forest;
    trees::BoostedModel boosted;
    neural::CnnModel cnn;

    std::uint64_t seed = 0;
    std::string dataset_fingerprint;
    std::int64_t data_start = 0;
    std::int64_t data_end = 0;
    std::int64_t split_boundary = 0;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    double train_mse = 0.0;
    double test_mse = 0.0;

    // Standardizes the raw feature row (when enabled) and predicts.
    double predict_row(std::span<const double> raw_row) const;

    // Content hash of kind + schema + standardizer + parameters.
    std::string fingerprint() const;
};

std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(const std::string& text);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

// Content hash of a built dataset (schema, rows, targets, keys).
std::string dataset_fingerprint(const feat::Dataset& dataset);

// Everything the model-fitting front end needs in one place.
struct TrainSpec {
    ModelKind kind = ModelKind::Ols;
    feat::FeatureSet set = feat::FeatureSet::X1;
    feat::TargetTransform target = feat::TargetTransform::Eth;
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
    bool standardize = true;
    std::vector<std::string> categories;  // empty = default schema

    double ridge_lambda = 1.0;
    double lasso_lambda = 1.0;
    trees::TreeParams tree;
    trees::ForestParams forest;
    trees::BoostParams boost;
    neural::CnnSpec cnn;
    neural::TrainOptions cnn_train;
};

TrainedModel train_model(const std::vector<ingest::TradeRecord>& trades,
                         const std::vector<ingest::AssetTraits>& assets,
                         const TrainSpec& spec);

// Traits plus precomputed rarity, built once and reused across valuations.
struct PreparedCollection {
    std::vector<ingest::AssetTraits> assets;
    rarity::CollectionStats stats;
    std::vector<rarity::RarityResult> ranked;
    std::unordered_map<std::int64_t, std::size_t> index_by_token;

    static PreparedCollection build(std::vector<ingest::AssetTraits> assets);
};

struct ValuationRequest {
    std::int64_t token_id = 0;
    // Prior-day market snapshot.
    double volume_eth = 0.0;
    double price_p5_eth = 0.0;
    double price_max_eth = 0.0;
    double price_min_eth = 0.0;
    bool has_last_trade = false;
    double last_trade_price_eth = 0.0;
    std::int64_t last_trade_timestamp = 0;
    std::int64_t as_of_timestamp = 0;
    // Required to express USD-target model output in ETH; ignored otherwise.
    double eth_usd_rate = 0.0;
};

struct Valuation {
    std::int64_t token_id = 0;
    double valuation_eth = 0.0;
    bool log_transformed = false;  // prediction was exponentiated
    std::string model_kind;
    std::string schema_id;
    std::string model_fingerprint;
};

// Assembles the feature row exactly as the offline builder would and predicts.
Valuation predict_valuation(const TrainedModel& model, const PreparedCollection& collection,
                            const ValuationRequest& request);

}  // namespace nftval::modelio
