#include <doctest.h>

#include <sstream>

#include "nftval/core.hpp"
#include "nftval/ingest.hpp"

using namespace nftval;
using namespace nftval::ingest;

namespace {

std::vector<TradeRecord> parse_trades_text(const std::string& text) {
    std::istringstream in(text);
    return parse_trades(in);
}

std::vector<AssetTraits> parse_traits_text(const std::string& text) {
    std::istringstream in(text);
    return parse_traits(in);
}

const char* kHeader =
    "collection,token_id,timestamp_utc,price_eth,price_usd,marketplace,buyer,seller\n";

}  // namespace

TEST_CASE("parse_trades accepts a minimal file") {
    const auto trades = parse_trades_text(
        std::string(kHeader) + "bayc,1,1650000000,95.5,280000,opensea,0xabc,0xdef\n");
    REQUIRE(trades.size() == 1);
    CHECK(trades[0].collection_id == "bayc");
    CHECK(trades[0].token_id == 1);
    CHECK(trades[0].timestamp == 1650000000);
    CHECK(trades[0].price_eth == doctest::Approx(95.5));
    CHECK(trades[0].price_usd == doctest::Approx(280000));
    CHECK(trades[0].buyer == "0xabc");
}

TEST_CASE("parse_trades rejects a negative price with line and field") {
    const std::string text =
        std::string(kHeader) + "bayc,1,1650000000,-1,280000,opensea,0xabc,0xdef\n";
    try {
        parse_trades_text(text);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("price_eth") != std::string::npos);
    }
}

TEST_CASE("parse_trades keeps resales as separate records") {
    const auto trades = parse_trades_text(std::string(kHeader) +
                                          "bayc,42,1650000000,10,30000,opensea,0xa,0xb\n"
                                          "bayc,7,1650001000,5,15000,opensea,0xc,0xd\n"
                                          "bayc,42,1650002000,12,36000,opensea,0xe,0xa\n");
    REQUIRE(trades.size() == 3);
    CHECK(trades[0].token_id == 42);
    CHECK(trades[1].token_id == 7);
    CHECK(trades[2].token_id == 42);
    CHECK(trades[0].timestamp < trades[2].timestamp);
}

TEST_CASE("parse_trades validation failures") {
    CHECK_THROWS_AS(parse_trades_text(""), ParseError);
    CHECK_THROWS_AS(parse_trades_text("wrong,header\n"), ParseError);
    // Wrong field count.
    CHECK_THROWS_AS(parse_trades_text(std::string(kHeader) + "bayc,1,1,1,1,os,a\n"),
                    ParseError);
    // Unparseable timestamp.
    CHECK_THROWS_AS(
        parse_trades_text(std::string(kHeader) + "bayc,1,friday,1,1,os,a,b\n"), ParseError);
    // Zero timestamp.
    CHECK_THROWS_AS(parse_trades_text(std::string(kHeader) + "bayc,1,0,1,1,os,a,b\n"),
                    ParseError);
    // Negative token id.
    CHECK_THROWS_AS(parse_trades_text(std::string(kHeader) + "bayc,-3,1,1,1,os,a,b\n"),
                    ParseError);
    // Zero price is allowed (mint/transfer).
    CHECK(parse_trades_text(std::string(kHeader) + "bayc,1,5,0,0,os,a,b\n").size() == 1);
}

TEST_CASE("parse_traits reads a single token") {
    const auto assets =
        parse_traits_text(R"([{"token_id": 0, "traits": {"Fur": "tan"}}])");
    REQUIRE(assets.size() == 1);
    CHECK(assets[0].token_id == 0);
    REQUIRE(assets[0].traits.size() == 1);
    CHECK(assets[0].traits[0].first == "Fur");
    CHECK(assets[0].traits[0].second == "tan");
}

TEST_CASE("parse_traits rejects duplicate tokens") {
    const std::string text = R"([
        {"token_id": 7, "traits": {"Fur": "tan"}},
        {"token_id": 7, "traits": {"Fur": "cream"}}
    ])";
    CHECK_THROWS_WITH_AS(parse_traits_text(text),
                         doctest::Contains("duplicate token_id 7"), ParseError);
}

TEST_CASE("parse_traits rejects a duplicate category within a token") {
    const std::string text =
        R"([{"token_id": 1, "traits": {"Fur": "tan", "Fur": "cream"}}])";
    CHECK_THROWS_WITH_AS(parse_traits_text(text), doctest::Contains("duplicate key"),
                         ParseError);
}

TEST_CASE("parse_traits keeps all categories in file order") {
    const std::string text = R"([{
        "token_id": 8817,
        "traits": {
            "Background": "yellow", "Mouth": "bored", "Eyes": "sleepy",
            "Fur": "golden", "Clothes": "sailor", "Earring": "hoop", "Hat": "beanie"
        }
    }])";
    const auto assets = parse_traits_text(text);
    REQUIRE(assets.size() == 1);
    REQUIRE(assets[0].traits.size() == 7);
    CHECK(assets[0].traits.front().first == "Background");
    CHECK(assets[0].traits.back().first == "Hat");
    CHECK(*assets[0].find("Hat") == "beanie");
}

TEST_CASE("trades round-trip through the file format") {
    std::vector<TradeRecord> trades = {
        {"bayc", 42, 1650000000, 95.5, 280123.25, "opensea", "0xabc", "0xdef"},
        {"punk,with,commas", 1, 1650000001, 0.0333333333333333314, 99.0,
         "\"quoted\"", "buyer", "seller"},
        {"bayc", 42, 1650099999, 1e-9, 0.0, "blur", "a", "b"},
    };
    std::ostringstream out;
    write_trades(out, trades);
    const auto reparsed = parse_trades_text(out.str());
    CHECK(reparsed == trades);
}

TEST_CASE("traits round-trip through the file format") {
    std::vector<AssetTraits> assets = {
        {0, {{"Fur", "tan"}, {"Eyes", "laser"}}},
        {3, {{"Eyes", "sleepy"}}},
        {9, {}},
    };
    std::ostringstream out;
    write_traits(out, assets);
    const auto reparsed = parse_traits_text(out.str());
    CHECK(reparsed == assets);
}
