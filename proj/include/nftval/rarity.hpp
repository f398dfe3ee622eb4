#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nftval/ingest.hpp"

namespace nftval::rarity {

// Reserved value tallied for tokens that lack a category entirely.
inline constexpr const char* kNoneValue = "<none>";

// Per-collection trait tallies. For every category the value counts
// (including kNoneValue) sum to the collection size.
struct CollectionStats {
    std::size_t collection_size = 0;
    std::vector<std::string> categories;  // first-seen order
    std::map<std::string, std::map<std::string, std::size_t>> counts;

    std::size_t count_for(const std::string& category, const std::string& value) const;
};

struct RarityResult {
    std::int64_t token_id = 0;
    double information_content = 0.0;  // bits
    double rarity_score = 0.0;
    std::size_t rarity_rank = 0;  // 1 = rarest; 0 = not yet ranked
};

struct ScoredCollection {
    std::vector<RarityResult> results;
    // All tokens identical: every score is 1 by convention.
    bool degenerate = false;
};

CollectionStats build_collection_stats(const std::vector<ingest::AssetTraits>& assets);

// Sum over the collection's categories of -log2(count(value)/N), with missing
// categories evaluated at kNoneValue.
double information_content(const ingest::AssetTraits& asset, const CollectionStats& stats);

// Scores = I(x) / mean(I); ranks left unset.
ScoredCollection score_collection(const std::vector<ingest::AssetTraits>& assets,
                                  const CollectionStats& stats);

// Fills ranks 1..N: descending score, ties broken by ascending token_id.
void rank_collection(std::vector<RarityResult>& results);

}  // namespace nftval::rarity
