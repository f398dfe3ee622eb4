#include "nftval/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/Dense>

namespace nftval::feat {

namespace {
constexpr std::int64_t kSecondsPerDay = 86400;
}

const char* to_string(FeatureSet set) {
    switch (set) {
        case FeatureSet::X1: return "X1";
        case FeatureSet::X2: return "X2";
        case FeatureSet::X3: return "X3";
    }
    return "?";
}

const char* to_string(TargetTransform t) {
    switch (t) {
        case TargetTransform::Eth: return "eth";
        case TargetTransform::LogEth: return "log_eth";
        case TargetTransform::Usd: return "usd";
    }
    return "?";
}

FeatureSet feature_set_from_string(const std::string& s) {
    if (s == "X1" || s == "x1") return FeatureSet::X1;
    if (s == "X2" || s == "x2") return FeatureSet::X2;
    if (s == "X3" || s == "x3") return FeatureSet::X3;
    throw std::invalid_argument("unknown feature set: " + s);
}

TargetTransform target_transform_from_string(const std::string& s) {
    if (s == "eth") return TargetTransform::Eth;
    if (s == "log_eth") return TargetTransform::LogEth;
    if (s == "usd") return TargetTransform::Usd;
    throw std::invalid_argument("unknown target transform: " + s);
}

std::vector<std::string> default_trait_categories() {
    return {"Background", "Mouth", "Eyes", "Fur", "Clothes", "Earring"};
}

FeatureSchema FeatureSchema::make(FeatureSet set, std::vector<std::string> categories) {
    FeatureSchema schema;
    schema.set = set;
    schema.categories = std::move(categories);
    if (schema.has_market()) {
        schema.columns.insert(schema.columns.end(),
                              {"volume_eth_lag1", "price_p5_eth_lag1", "price_max_eth_lag1",
                               "price_min_eth_lag1"});
    }
    schema.columns.push_back("rarity_rank");
    for (const auto& cat : schema.categories) schema.columns.push_back(cat + "_count");
    if (schema.has_last_trade()) {
        schema.columns.push_back("last_trade_timediff");
        schema.columns.push_back("last_trade_price");
    }
    return schema;
}

std::vector<MarketDay> aggregate_market_days(const std::vector<ingest::TradeRecord>& trades) {
    std::map<std::int64_t, std::vector<double>> by_day;
    for (const auto& t : trades) {
        if (t.price_eth <= 0.0) continue;
        by_day[floor_div(t.timestamp, kSecondsPerDay)].push_back(t.price_eth);
    }

    std::vector<MarketDay> days;
    days.reserve(by_day.size());
    for (auto& [day, prices] : by_day) {
        std::sort(prices.begin(), prices.end());
        MarketDay md;
        md.day = day;
        md.price_min_eth = prices.front();
        md.price_max_eth = prices.back();
        for (double p : prices) md.volume_eth += p;
        // 5th percentile by linear interpolation at rank 0.05 * (n - 1).
        const double r = 0.05 * static_cast<double>(prices.size() - 1);
        const auto lo = static_cast<std::size_t>(r);
        md.price_p5_eth = prices[lo];
        if (lo + 1 < prices.size())
            md.price_p5_eth += (r - static_cast<double>(lo)) * (prices[lo + 1] - prices[lo]);
        days.push_back(md);
    }
    return days;
}

double transform_target(double price_eth, double price_usd, TargetTransform t) {
    switch (t) {
        case TargetTransform::Eth:
            return price_eth;
        case TargetTransform::LogEth:
            if (price_eth <= 0.0)
                throw std::domain_error("log target requires a positive ETH price");
            return std::log(price_eth);
        case TargetTransform::Usd:
            return price_usd;
    }
    throw std::invalid_argument("unknown target transform");
}

Dataset build_dataset(const std::vector<ingest::TradeRecord>& trades,
                      const std::vector<ingest::AssetTraits>& assets,
                      const std::vector<rarity::RarityResult>& rarity_results,
                      const std::vector<MarketDay>& market_days,
                      const FeatureSchema& schema, TargetTransform transform) {
    const rarity::CollectionStats stats = rarity::build_collection_stats(assets);
    for (const auto& cat : schema.categories)
        if (!stats.counts.contains(cat))
            throw std::invalid_argument("schema category '" + cat +
                                        "' is absent from the collection");

    std::unordered_map<std::int64_t, const ingest::AssetTraits*> traits_by_token;
    for (const auto& a : assets) traits_by_token[a.token_id] = &a;
    std::unordered_map<std::int64_t, const rarity::RarityResult*> rarity_by_token;
    for (const auto& r : rarity_results) rarity_by_token[r.token_id] = &r;

    // Chronological order; stable so same-timestamp trades keep file order.
    std::vector<std::size_t> order(trades.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return trades[a].timestamp < trades[b].timestamp;
    });

    Dataset ds;
    ds.schema = schema;
    ds.target_transform = transform;
    ds.rows = Matrix(0, schema.columns.size());

    struct LastTrade {
        std::int64_t timestamp;
        double price_eth;
    };
    std::unordered_map<std::int64_t, LastTrade> last_trade;

    std::vector<double> row(schema.columns.size(), 0.0);
    for (std::size_t idx : order) {
        const auto& trade = trades[idx];
        if (trade.price_eth <= 0.0) continue;  // mints/transfers are not sales

        auto traits_it = traits_by_token.find(trade.token_id);
        auto rarity_it = rarity_by_token.find(trade.token_id);
        if (traits_it == traits_by_token.end() || rarity_it == rarity_by_token.end())
            throw std::invalid_argument("trade references token " +
                                        std::to_string(trade.token_id) +
                                        " with no traits/rarity data");

        const auto prev_it = last_trade.find(trade.token_id);
        const bool first_trade = prev_it == last_trade.end();

        bool keep = true;
        std::size_t col = 0;

        if (schema.has_market()) {
            // Latest market day strictly before the trade's day; carries
            // forward across gap days. market_days are day-ascending.
            const std::int64_t trade_day = floor_div(trade.timestamp, kSecondsPerDay);
            auto it = std::upper_bound(
                market_days.begin(), market_days.end(), trade_day - 1,
                [](std::int64_t d, const MarketDay& md) { return d < md.day; });
            const MarketDay* prior = it == market_days.begin() ? nullptr : &*(it - 1);
            if (prior == nullptr) {
                ds.dropped_no_market++;
                keep = false;
            } else {
                row[col++] = prior->volume_eth;
                row[col++] = prior->price_p5_eth;
                row[col++] = prior->price_max_eth;
                row[col++] = prior->price_min_eth;
            }
        }

        if (keep) {
            row[col++] = static_cast<double>(rarity_it->second->rarity_rank);
            for (const auto& cat : schema.categories) {
                const std::string* value = traits_it->second->find(cat);
                row[col++] = static_cast<double>(
                    stats.count_for(cat, value ? *value : rarity::kNoneValue));
            }
        }

        if (keep && schema.has_last_trade()) {
            if (first_trade) {
                ds.dropped_first_trade++;
                keep = false;
            } else {
                row[col++] = static_cast<double>(trade.timestamp - prev_it->second.timestamp);
                row[col++] = prev_it->second.price_eth;
            }
        }

        if (keep) {
            double target;
            try {
                target = transform_target(trade.price_eth, trade.price_usd, transform);
            } catch (const std::domain_error&) {
                ds.dropped_bad_target++;
                keep = false;
            }
            if (keep) {
                ds.rows.append_row(row);
                ds.targets.push_back(target);
                ds.keys.push_back({trade.token_id, trade.timestamp});
            }
        }

        last_trade[trade.token_id] = {trade.timestamp, trade.price_eth};
    }
    return ds;
}

namespace {

Dataset take_rows(const Dataset& src, std::size_t begin, std::size_t end,
                  const std::vector<std::size_t>& order) {
    Dataset out;
    out.schema = src.schema;
    out.target_transform = src.target_transform;
    out.rows = Matrix(0, src.rows.cols());
    for (std::size_t i = begin; i < end; ++i) {
        const std::size_t idx = order[i];
        out.rows.append_row(src.rows.row(idx));
        out.targets.push_back(src.targets[idx]);
        out.keys.push_back(src.keys[idx]);
    }
    return out;
}

}  // namespace

std::pair<Dataset, Dataset> chronological_split(const Dataset& dataset, double test_fraction) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("test_fraction must be in (0, 1)");
    const std::size_t n = dataset.size();
    if (n < 2) throw std::invalid_argument("chronological_split: need at least 2 rows");

    const auto test_n = static_cast<std::size_t>(
        std::ceil(test_fraction * static_cast<double>(n)));
    if (test_n == 0 || test_n >= n)
        throw std::invalid_argument("chronological_split: split leaves an empty side");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dataset.keys[a].timestamp < dataset.keys[b].timestamp;
    });

    return {take_rows(dataset, 0, n - test_n, order),
            take_rows(dataset, n - test_n, n, order)};
}

Standardizer Standardizer::fit(const Dataset& train) {
    const std::size_t n = train.size();
    const std::size_t p = train.rows.cols();
    if (n == 0) throw std::invalid_argument("Standardizer::fit: empty training set");

    Standardizer s;
    s.means.assign(p, 0.0);
    s.stds.assign(p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = train.rows.row(i);
        for (std::size_t j = 0; j < p; ++j) s.means[j] += row[j];
    }
    for (double& m : s.means) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = train.rows.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            const double d = row[j] - s.means[j];
            s.stds[j] += d * d;
        }
    }
    for (double& v : s.stds) v = std::sqrt(v / static_cast<double>(n));
    return s;
}

void Standardizer::apply_row(std::span<double> row) const {
    if (row.size() != means.size())
        throw std::invalid_argument("Standardizer: row width mismatch");
    for (std::size_t j = 0; j < row.size(); ++j) {
        row[j] -= means[j];
        if (stds[j] > 0.0) row[j] /= stds[j];
    }
}

Dataset Standardizer::apply(const Dataset& dataset) const {
    Dataset out = dataset;
    for (std::size_t i = 0; i < out.size(); ++i) apply_row(out.rows.row(i));
    return out;
}

PcaResult pca(const Matrix& matrix, std::size_t k) {
    const std::size_t n = matrix.rows();
    const std::size_t p = matrix.cols();
    if (n < 2) throw std::invalid_argument("pca: need at least 2 rows");
    if (k == 0 || k > p) throw std::invalid_argument("pca: k must be in [1, cols]");

    Eigen::MatrixXd x(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) x(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j)) = matrix.at(i, j);
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;

    const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("pca: eigendecomposition failed");

    const double total_variance = std::max(cov.trace(), 0.0);

    PcaResult out;
    out.components = Matrix(k, p);
    out.explained_variance_ratios.resize(k);
    out.projections = Matrix(n, k);

    // Eigen returns ascending eigenvalues; take the top k from the back.
    for (std::size_t c = 0; c < k; ++c) {
        const auto src = static_cast<Eigen::Index>(p - 1 - c);
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        // Canonical sign: the largest-magnitude coordinate is positive.
        Eigen::Index argmax = 0;
        v.cwiseAbs().maxCoeff(&argmax);
        if (v(argmax) < 0.0) v = -v;

        const double eigenvalue = std::max(solver.eigenvalues()(src), 0.0);
        if (eigenvalue <= total_variance * 1e-12) out.rank_deficient = true;
        out.explained_variance_ratios[c] =
            total_variance > 0.0 ? eigenvalue / total_variance : 0.0;
        for (std::size_t j = 0; j < p; ++j)
            out.components.at(c, j) = v(static_cast<Eigen::Index>(j));
    }

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < k; ++c) {
            double dot = 0.0;
            for (std::size_t j = 0; j < p; ++j)
                dot += x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                       out.components.at(c, j);
            out.projections.at(i, c) = dot;
        }
    return out;
}

}  // namespace nftval::feat
