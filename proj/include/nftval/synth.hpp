#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nftval/ingest.hpp"
#include "nftval/rarity.hpp"

namespace nftval::synth {

struct TraitValueSpec {
    std::string value;
    double weight = 1.0;
};

struct CategorySpec {
    std::string name;
    std::vector<TraitValueSpec> values;
};

enum class PricingKind { Constant, Linear, Interaction };

const char* to_string(PricingKind kind);
PricingKind pricing_from_string(const std::string& s);

struct SynthConfig {
    std::uint64_t seed = 0;
    std::size_t tokens = 1000;
    int days = 60;
    int trades_per_day_min = 30;
    int trades_per_day_max = 60;
    std::vector<CategorySpec> categories;  // empty = default schema

    PricingKind pricing = PricingKind::Interaction;
    double base_price = 2.0;
    double market_coef = 0.4;
    double rarity_coef = 1.0;
    double interaction_coef = 0.8;
    double last_trade_coef = 0.2;
    double noise_sigma = 0.3;

    double market_base = 5.0;
    double walk_drift = 0.0;
    double walk_vol = 0.08;

    double eth_usd_rate = 2000.0;
    std::int64_t start_timestamp = 1600041600;  // 2020-09-14T00:00:00Z, day-aligned
    std::string collection_id = "synthetic";
};

// Six-category trait schema with skewed value weights, so rarity varies.
std::vector<CategorySpec> default_categories();

struct GroundTruth {
    std::vector<double> market_index;  // one entry per day
    SynthConfig config;
};

std::vector<ingest::AssetTraits> generate_collection(const SynthConfig& config);

// Prices follow pricing(market index, rarity score, last trade price) plus
// Gaussian noise, floored at a small positive epsilon. USD is ETH times the
// configured constant rate.
std::pair<std::vector<ingest::TradeRecord>, GroundTruth> generate_trades(
    const SynthConfig& config, const std::vector<ingest::AssetTraits>& collection,
    const std::vector<rarity::RarityResult>& rarity_results);

std::string ground_truth_json(const GroundTruth& truth);

}  // namespace nftval::synth
