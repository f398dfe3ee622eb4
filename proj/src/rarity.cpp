#include "nftval/rarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace nftval::rarity {

std::size_t CollectionStats::count_for(const std::string& category,
                                       const std::string& value) const {
    auto cat_it = counts.find(category);
    if (cat_it == counts.end())
        throw std::invalid_argument("unknown trait category: " + category);
    auto val_it = cat_it->second.find(value);
    if (val_it == cat_it->second.end())
        throw std::invalid_argument("trait value '" + value + "' not present in category '" +
                                    category + "' of this collection");
    return val_it->second;
}

CollectionStats build_collection_stats(const std::vector<ingest::AssetTraits>& assets) {
    if (assets.empty())
        throw std::invalid_argument("build_collection_stats: empty asset list");

    std::unordered_set<std::int64_t> seen;
    CollectionStats stats;
    stats.collection_size = assets.size();

    for (const auto& asset : assets) {
        if (!seen.insert(asset.token_id).second)
            throw std::invalid_argument("build_collection_stats: duplicate token_id " +
                                        std::to_string(asset.token_id));
        for (const auto& [category, value] : asset.traits) {
            if (!stats.counts.contains(category)) stats.categories.push_back(category);
            stats.counts[category][value]++;
        }
    }

    // Tokens missing a category are tallied under the reserved value.
    for (const auto& category : stats.categories) {
        std::size_t have = 0;
        for (const auto& [value, n] : stats.counts[category]) have += n;
        if (have < stats.collection_size)
            stats.counts[category][kNoneValue] = stats.collection_size - have;
    }
    return stats;
}

double information_content(const ingest::AssetTraits& asset, const CollectionStats& stats) {
    const double n = static_cast<double>(stats.collection_size);
    double bits = 0.0;
    for (const auto& category : stats.categories) {
        const std::string* value = asset.find(category);
        const std::size_t count = stats.count_for(category, value ? *value : kNoneValue);
        bits += -std::log2(static_cast<double>(count) / n);
    }
    return bits;
}

ScoredCollection score_collection(const std::vector<ingest::AssetTraits>& assets,
                                  const CollectionStats& stats) {
    if (assets.size() != stats.collection_size)
        throw std::invalid_argument("score_collection: assets do not match stats");

    ScoredCollection out;
    out.results.reserve(assets.size());
    double total_bits = 0.0;
    for (const auto& asset : assets) {
        RarityResult r;
        r.token_id = asset.token_id;
        r.information_content = information_content(asset, stats);
        total_bits += r.information_content;
        out.results.push_back(r);
    }

    const double expected = total_bits / static_cast<double>(assets.size());
    if (expected == 0.0) {
        out.degenerate = true;
        for (auto& r : out.results) r.rarity_score = 1.0;
    } else {
        for (auto& r : out.results) r.rarity_score = r.information_content / expected;
    }
    return out;
}

void rank_collection(std::vector<RarityResult>& results) {
    std::vector<std::size_t> order(results.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (results[a].rarity_score != results[b].rarity_score)
            return results[a].rarity_score > results[b].rarity_score;
        return results[a].token_id < results[b].token_id;
    });
    for (std::size_t rank = 0; rank < order.size(); ++rank)
        results[order[rank]].rarity_rank = rank + 1;
}

}  // namespace nftval::rarity
