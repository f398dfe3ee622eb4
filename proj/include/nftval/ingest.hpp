#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace nftval::ingest {

// One marketplace sale. Zero-price rows (mints/transfers) are accepted here
// and filtered by the feature builder.
struct TradeRecord {
    std::string collection_id;
    std::int64_t token_id = 0;
    std::int64_t timestamp = 0;  // UTC seconds since epoch
    double price_eth = 0.0;
    double price_usd = 0.0;
    std::string marketplace;
    std::string buyer;
    std::string seller;

    bool operator==(const TradeRecord&) const = default;
};

// Per-token trait map. Category order follows the source file.
struct AssetTraits {
    std::int64_t token_id = 0;
    std::vector<std::pair<std::string, std::string>> traits;  // category -> value

    const std::string* find(const std::string& category) const {
        for (const auto& [cat, val] : traits)
            if (cat == category) return &val;
        return nullptr;
    }

    bool operator==(const AssetTraits&) const = default;
};

inline constexpr const char* kTradesHeader =
    "collection,token_id,timestamp_utc,price_eth,price_usd,marketplace,buyer,seller";

// Parse the trades CSV. Throws ParseError naming the line and field on any
// malformed or invalid row. Rows come back in file order.
std::vector<TradeRecord> parse_trades(std::istream& in);

// Parse the traits JSON (array of {token_id, traits}). Throws ParseError on
// duplicate token ids or duplicate categories within a token.
std::vector<AssetTraits> parse_traits(std::istream& in);

void write_trades(std::ostream& out, const std::vector<TradeRecord>& trades);
void write_traits(std::ostream& out, const std::vector<AssetTraits>& assets);

std::vector<TradeRecord> load_trades_file(const std::string& path);
std::vector<AssetTraits> load_traits_file(const std::string& path);

}  // namespace nftval::ingest
