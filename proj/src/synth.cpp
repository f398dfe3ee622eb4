#include "nftval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "nftval/core.hpp"

namespace nftval::synth {

namespace {
constexpr std::int64_t kSecondsPerDay = 86400;
constexpr double kPriceFloor = 1e-3;
}

const char* to_string(PricingKind kind) {
    switch (kind) {
        case PricingKind::Constant: return "constant";
        case PricingKind::Linear: return "linear";
        case PricingKind::Interaction: return "interaction";
    }
    return "?";
}

PricingKind pricing_from_string(const std::string& s) {
    if (s == "constant") return PricingKind::Constant;
    if (s == "linear") return PricingKind::Linear;
    if (s == "interaction") return PricingKind::Interaction;
    throw std::invalid_argument("unknown pricing function: " + s);
}

std::vector<CategorySpec> default_categories() {
    // Heavy-tailed value weights: rare values are genuinely rare, so rarity
    // scores spread well away from 1.
    auto skewed = [](std::initializer_list<const char*> names) {
        std::vector<TraitValueSpec> values;
        double w = 100.0;
        for (const char* name : names) {
            values.push_back({name, w});
            w = std::max(0.5, w * 0.22);
        }
        return values;
    };
    return {
        {"Background", skewed({"blue", "yellow", "purple", "orange", "aquamarine", "gray"})},
        {"Mouth", skewed({"bored", "grin", "dumbfounded", "jovial", "phoneme", "rage"})},
        {"Eyes", skewed({"bored", "sleepy", "angry", "hypnotized", "zombie", "laser"})},
        {"Fur", skewed({"brown", "tan", "cream", "golden", "zombie", "solid-gold"})},
        {"Clothes", skewed({"none", "striped-tee", "hoodie", "sailor", "admiral", "king"})},
        {"Earring", skewed({"none", "silver-stud", "gold-stud", "hoop", "diamond"})},
    };
}

std::vector<ingest::AssetTraits> generate_collection(const SynthConfig& config) {
    if (config.tokens < 1) throw std::invalid_argument("synth: need at least one token");
    const auto categories =
        config.categories.empty() ? default_categories() : config.categories;
    for (const auto& cat : categories) {
        if (cat.values.empty())
            throw std::invalid_argument("synth: category '" + cat.name + "' has no values");
        for (const auto& v : cat.values)
            if (!(v.weight > 0.0))
                throw std::invalid_argument("synth: non-positive weight in category '" +
                                            cat.name + "'");
    }

    Rng rng(config.seed);
    std::vector<ingest::AssetTraits> assets;
    assets.reserve(config.tokens);
    for (std::size_t token = 0; token < config.tokens; ++token) {
        ingest::AssetTraits asset;
        asset.token_id = static_cast<std::int64_t>(token);
        for (const auto& cat : categories) {
            double total = 0.0;
            for (const auto& v : cat.values) total += v.weight;
            double draw = rng.uniform(0.0, total);
            const TraitValueSpec* chosen = &cat.values.back();
            for (const auto& v : cat.values) {
                if (draw < v.weight) {
                    chosen = &v;
                    break;
                }
                draw -= v.weight;
            }
            asset.traits.emplace_back(cat.name, chosen->value);
        }
        assets.push_back(std::move(asset));
    }
    return assets;
}

std::pair<std::vector<ingest::TradeRecord>, GroundTruth> generate_trades(
    const SynthConfig& config, const std::vector<ingest::AssetTraits>& collection,
    const std::vector<rarity::RarityResult>& rarity_results) {
    if (config.days < 2) throw std::invalid_argument("synth: need at least 2 days");
    if (config.trades_per_day_min < 1 ||
        config.trades_per_day_max < config.trades_per_day_min)
        throw std::invalid_argument("synth: bad trades-per-day range");
    if (config.start_timestamp <= 0)
        throw std::invalid_argument("synth: start timestamp must be positive");

    std::unordered_map<std::int64_t, double> score_by_token;
    for (const auto& r : rarity_results) score_by_token[r.token_id] = r.rarity_score;
    for (const auto& asset : collection)
        if (!score_by_token.contains(asset.token_id))
            throw std::invalid_argument("synth: rarity missing for token " +
                                        std::to_string(asset.token_id));

    // Separate stream from the collection's so trait and market draws do not
    // interleave.
    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ull);

    GroundTruth truth;
    truth.config = config;
    truth.market_index.reserve(static_cast<std::size_t>(config.days));
    double index = config.market_base;
    for (int d = 0; d < config.days; ++d) {
        truth.market_index.push_back(index);
        index *= std::exp(config.walk_drift + config.walk_vol * rng.normal());
    }

    std::unordered_map<std::int64_t, double> last_price;
    std::vector<ingest::TradeRecord> trades;
    std::vector<std::int64_t> seconds;
    for (int d = 0; d < config.days; ++d) {
        const int count = config.trades_per_day_min +
                          static_cast<int>(rng.below(static_cast<std::uint64_t>(
                              config.trades_per_day_max - config.trades_per_day_min + 1)));
        seconds.resize(static_cast<std::size_t>(count));
        for (auto& s : seconds) s = static_cast<std::int64_t>(rng.below(kSecondsPerDay));
        std::sort(seconds.begin(), seconds.end());

        const double market = truth.market_index[static_cast<std::size_t>(d)];
        for (std::int64_t sec : seconds) {
            const auto token = static_cast<std::int64_t>(rng.below(config.tokens));
            const double score = score_by_token.at(token);
            const auto last_it = last_price.find(token);
            const double last = last_it != last_price.end() ? last_it->second : market;

            double price = config.base_price;
            switch (config.pricing) {
                case PricingKind::Constant:
                    break;
                case PricingKind::Linear:
                    price += config.market_coef * market + config.rarity_coef * score +
                             config.last_trade_coef * last;
                    break;
                case PricingKind::Interaction:
                    price += config.market_coef * market + config.rarity_coef * score +
                             config.interaction_coef * market * score +
                             config.last_trade_coef * last;
                    break;
            }
            price += config.noise_sigma * rng.normal();
            price = std::max(price, kPriceFloor);

            ingest::TradeRecord trade;
            trade.collection_id = config.collection_id;
            trade.token_id = token;
            trade.timestamp = config.start_timestamp + d * kSecondsPerDay + sec;
            trade.price_eth = price;
            trade.price_usd = price * config.eth_usd_rate;
            trade.marketplace = "synthetic";
            trade.buyer = "0x" + to_hex(rng.next_u64());
            trade.seller = "0x" + to_hex(rng.next_u64());
            trades.push_back(std::move(trade));

            last_price[token] = price;
        }
    }
    return {std::move(trades), std::move(truth)};
}

std::string ground_truth_json(const GroundTruth& truth) {
    nlohmann::json j;
    j["seed"] = truth.config.seed;
    j["tokens"] = truth.config.tokens;
    j["days"] = truth.config.days;
    j["pricing"] = to_string(truth.config.pricing);
    j["coefficients"] = {{"base_price", truth.config.base_price},
                         {"market", truth.config.market_coef},
                         {"rarity", truth.config.rarity_coef},
                         {"interaction", truth.config.interaction_coef},
                         {"last_trade", truth.config.last_trade_coef}};
    j["noise_sigma"] = truth.config.noise_sigma;
    j["eth_usd_rate"] = truth.config.eth_usd_rate;
    j["start_timestamp"] = truth.config.start_timestamp;
    j["market_index"] = truth.market_index;
    return j.dump(2) + "\n";
}

}  // namespace nftval::synth
