#include "nftval/ingest.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "nftval/core.hpp"

namespace nftval::ingest {

namespace {

// Splits one CSV line. Double quotes wrap fields containing commas or quotes;
// "" inside a quoted field is a literal quote.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (in_quotes)
        throw ParseError("line " + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\n") != std::string::npos;
}

std::string csv_escape(const std::string& s) {
    if (!needs_quoting(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::int64_t parse_int_field(const std::string& text, std::size_t line_no,
                             const char* field) {
    std::int64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw ParseError("line " + std::to_string(line_no) + ", field " + field +
                         ": not an integer: '" + text + "'");
    return value;
}

double parse_double_field(const std::string& text, std::size_t line_no,
                          const char* field) {
    if (text.empty())
        throw ParseError("line " + std::to_string(line_no) + ", field " + field +
                         ": empty");
    errno = 0;
    char* end = nullptr;
    double value = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(value))
        throw ParseError("line " + std::to_string(line_no) + ", field " + field +
                         ": not a finite number: '" + text + "'");
    return value;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

std::vector<TradeRecord> parse_trades(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("line 1: empty trades file, expected header");
    if (strip_cr(line) != kTradesHeader)
        throw ParseError(std::string("line 1: bad header, expected '") + kTradesHeader +
                         "'");

    std::vector<TradeRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_csv_line(line, line_no);
        if (fields.size() != 8)
            throw ParseError("line " + std::to_string(line_no) + ": expected 8 fields, got " +
                             std::to_string(fields.size()));

        TradeRecord rec;
        rec.collection_id = fields[0];
        rec.token_id = parse_int_field(fields[1], line_no, "token_id");
        if (rec.token_id < 0)
            throw ParseError("line " + std::to_string(line_no) +
                             ", field token_id: must be non-negative");
        rec.timestamp = parse_int_field(fields[2], line_no, "timestamp_utc");
        if (rec.timestamp <= 0)
            throw ParseError("line " + std::to_string(line_no) +
                             ", field timestamp_utc: must be positive");
        rec.price_eth = parse_double_field(fields[3], line_no, "price_eth");
        if (rec.price_eth < 0)
            throw ParseError("line " + std::to_string(line_no) +
                             ", field price_eth: must be non-negative");
        rec.price_usd = parse_double_field(fields[4], line_no, "price_usd");
        if (rec.price_usd < 0)
            throw ParseError("line " + std::to_string(line_no) +
                             ", field price_usd: must be non-negative");
        rec.marketplace = fields[5];
        rec.buyer = fields[6];
        rec.seller = fields[7];
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<AssetTraits> parse_traits(std::istream& in) {
    using ojson = nlohmann::ordered_json;

    // nlohmann silently collapses duplicate object keys, so duplicates are
    // caught during parsing via key events.
    std::vector<std::set<std::string>> key_stack;
    std::string duplicate_key;
    ojson::parser_callback_t cb = [&](int /*depth*/, ojson::parse_event_t event,
                                      ojson& parsed) -> bool {
        switch (event) {
            case ojson::parse_event_t::object_start:
                key_stack.emplace_back();
                break;
            case ojson::parse_event_t::object_end:
                key_stack.pop_back();
                break;
            case ojson::parse_event_t::key: {
                auto key = parsed.get<std::string>();
                if (!key_stack.empty() && !key_stack.back().insert(key).second &&
                    duplicate_key.empty())
                    duplicate_key = key;
                break;
            }
            default:
                break;
        }
        return true;
    };

    ojson doc;
    try {
        doc = ojson::parse(in, cb);
    } catch (const ojson::parse_error& e) {
        throw ParseError(std::string("traits JSON: ") + e.what());
    }
    if (!duplicate_key.empty())
        throw ParseError("traits JSON: duplicate key '" + duplicate_key + "'");
    if (!doc.is_array())
        throw ParseError("traits JSON: top-level value must be an array");

    std::vector<AssetTraits> out;
    std::unordered_set<std::int64_t> seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& entry = doc[i];
        if (!entry.is_object())
            throw ParseError("traits JSON: element " + std::to_string(i) +
                             " is not an object");
        if (!entry.contains("token_id") || !entry["token_id"].is_number_integer())
            throw ParseError("traits JSON: element " + std::to_string(i) +
                             ": missing integer token_id");
        AssetTraits asset;
        asset.token_id = entry["token_id"].get<std::int64_t>();
        if (asset.token_id < 0)
            throw ParseError("traits JSON: element " + std::to_string(i) +
                             ": token_id must be non-negative");
        if (!seen.insert(asset.token_id).second)
            throw ParseError("traits JSON: duplicate token_id " +
                             std::to_string(asset.token_id));
        if (!entry.contains("traits") || !entry["traits"].is_object())
            throw ParseError("traits JSON: token " + std::to_string(asset.token_id) +
                             ": missing traits object");
        for (const auto& [category, value] : entry["traits"].items()) {
            if (category.empty())
                throw ParseError("traits JSON: token " + std::to_string(asset.token_id) +
                                 ": empty category name");
            if (!value.is_string())
                throw ParseError("traits JSON: token " + std::to_string(asset.token_id) +
                                 ", category '" + category + "': value must be a string");
            asset.traits.emplace_back(category, value.get<std::string>());
        }
        out.push_back(std::move(asset));
    }
    return out;
}

void write_trades(std::ostream& out, const std::vector<TradeRecord>& trades) {
    out << kTradesHeader << "\n";
    for (const auto& t : trades) {
        out << csv_escape(t.collection_id) << ',' << t.token_id << ',' << t.timestamp
            << ',' << format_double(t.price_eth) << ',' << format_double(t.price_usd)
            << ',' << csv_escape(t.marketplace) << ',' << csv_escape(t.buyer) << ','
            << csv_escape(t.seller) << "\n";
    }
}

void write_traits(std::ostream& out, const std::vector<AssetTraits>& assets) {
    using ojson = nlohmann::ordered_json;
    ojson arr = ojson::array();
    for (const auto& asset : assets) {
        ojson traits = ojson::object();
        for (const auto& [cat, val] : asset.traits) traits[cat] = val;
        arr.push_back(ojson{{"token_id", asset.token_id}, {"traits", std::move(traits)}});
    }
    out << arr.dump(2) << "\n";
}

std::vector<TradeRecord> load_trades_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open trades file: " + path);
    return parse_trades(f);
}

std::vector<AssetTraits> load_traits_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open traits file: " + path);
    return parse_traits(f);
}

}  // namespace nftval::ingest
