#include "nftval/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nftval/bench.hpp"

namespace nftval::modelio {

using json = nlohmann::json;

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Ols: return "ols";
        case ModelKind::Ridge: return "ridge";
        case ModelKind::Lasso: return "lasso";
        case ModelKind::Tree: return "tree";
        case ModelKind::Forest: return "forest";
        case ModelKind::Boosted: return "boosted";
        case ModelKind::Cnn: return "cnn";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "ols") return ModelKind::Ols;
    if (s == "ridge") return ModelKind::Ridge;
    if (s == "lasso") return ModelKind::Lasso;
    if (s == "tree") return ModelKind::Tree;
    if (s == "forest") return ModelKind::Forest;
    if (s == "boosted") return ModelKind::Boosted;
    if (s == "cnn") return ModelKind::Cnn;
    throw std::invalid_argument("unknown model kind: " + s);
}

namespace {

json tree_to_json(const trees::RegressionTree& tree) {
    json j;
    j["max_depth"] = tree.params.max_depth;
    j["min_samples_leaf"] = tree.params.min_samples_leaf;
    j["n_features"] = tree.n_features;
    // Columnar node arrays keep large ensembles compact.
    std::vector<int> feature, left, right;
    std::vector<double> threshold, value, gain;
    std::vector<std::size_t> count;
    for (const auto& node : tree.nodes) {
        feature.push_back(node.feature);
        threshold.push_back(node.threshold);
        left.push_back(node.left);
        right.push_back(node.right);
        value.push_back(node.value);
        count.push_back(node.count);
        gain.push_back(node.gain);
    }
    j["feature"] = feature;
    j["threshold"] = threshold;
    j["left"] = left;
    j["right"] = right;
    j["value"] = value;
    j["count"] = count;
    j["gain"] = gain;
    return j;
}

trees::RegressionTree tree_from_json(const json& j) {
    trees::RegressionTree tree;
    tree.params.max_depth = j.at("max_depth").get<int>();
    tree.params.min_samples_leaf = j.at("min_samples_leaf").get<std::size_t>();
    tree.n_features = j.at("n_features").get<std::size_t>();
    const auto& feature = j.at("feature");
    const auto& threshold = j.at("threshold");
    const auto& left = j.at("left");
    const auto& right = j.at("right");
    const auto& value = j.at("value");
    const auto& count = j.at("count");
    const auto& gain = j.at("gain");
    const std::size_t n = feature.size();
    if (threshold.size() != n || left.size() != n || right.size() != n ||
        value.size() != n || count.size() != n || gain.size() != n)
        throw ParseError("model file: inconsistent tree node arrays");
    tree.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        tree.nodes[i].feature = feature[i].get<int>();
        tree.nodes[i].threshold = threshold[i].get<double>();
        tree.nodes[i].left = left[i].get<int>();
        tree.nodes[i].right = right[i].get<int>();
        tree.nodes[i].value = value[i].get<double>();
        tree.nodes[i].count = count[i].get<std::size_t>();
        tree.nodes[i].gain = gain[i].get<double>();
    }
    return tree;
}

const char* regularization_name(linmod::Regularization reg) {
    switch (reg) {
        case linmod::Regularization::None: return "none";
        case linmod::Regularization::Ridge: return "ridge";
        case linmod::Regularization::Lasso: return "lasso";
    }
    return "?";
}

linmod::Regularization regularization_from_name(const std::string& s) {
    if (s == "none") return linmod::Regularization::None;
    if (s == "ridge") return linmod::Regularization::Ridge;
    if (s == "lasso") return linmod::Regularization::Lasso;
    throw ParseError("model file: unknown regularization: " + s);
}

json parameters_to_json(const TrainedModel& model) {
    json p;
    switch (model.kind) {
        case ModelKind::Ols:
        case ModelKind::Ridge:
        case ModelKind::Lasso: {
            const auto& lin = model.linear;
            p["intercept"] = lin.intercept;
            p["coefficients"] = lin.coefficients;
            p["regularization"] = regularization_name(lin.regularization);
            p["lambda"] = lin.lambda;
            p["iterations"] = lin.iterations;
            p["converged"] = lin.converged;
            p["rank_deficient"] = lin.rank_deficient;
            break;
        }
        case ModelKind::Tree:
            p = tree_to_json(model.tree);
            break;
        case ModelKind::Forest: {
            p["n_trees"] = model.forest.params.n_trees;
            p["max_depth"] = model.forest.params.max_depth;
            p["min_samples_leaf"] = model.forest.params.min_samples_leaf;
            p["features_per_split"] = model.forest.params.features_per_split;
            p["bootstrap"] = model.forest.params.bootstrap;
            p["seed"] = model.forest.params.seed;
            p["n_features"] = model.forest.n_features;
            json arr = json::array();
            for (const auto& tree : model.forest.trees) arr.push_back(tree_to_json(tree));
            p["trees"] = std::move(arr);
            break;
        }
        case ModelKind::Boosted: {
            p["initial_prediction"] = model.boosted.initial_prediction;
            p["n_stages"] = model.boosted.params.n_stages;
            p["learning_rate"] = model.boosted.params.learning_rate;
            p["max_depth"] = model.boosted.params.max_depth;
            p["min_samples_leaf"] = model.boosted.params.min_samples_leaf;
            p["seed"] = model.boosted.params.seed;
            p["n_features"] = model.boosted.n_features;
            json arr = json::array();
            for (const auto& stage : model.boosted.stages)
                arr.push_back(json{{"learning_rate", stage.learning_rate},
                                   {"tree", tree_to_json(stage.tree)}});
            p["stages"] = std::move(arr);
            break;
        }
        case ModelKind::Cnn: {
            const auto& cnn = model.cnn;
            p["filters"] = cnn.spec.filters;
            p["kernel_size"] = cnn.spec.kernel_size;
            p["dense_units"] = cnn.spec.dense_units;
            p["use_dropout"] = cnn.spec.use_dropout;
            p["dropout_rate"] = cnn.spec.dropout_rate;
            p["learning_rate"] = cnn.spec.learning_rate;
            p["input_width"] = cnn.input_width;
            p["seed"] = cnn.seed;
            p["conv_w"] = cnn.conv_w;
            p["conv_b"] = cnn.conv_b;
            p["dense_w"] = cnn.dense_w;
            p["dense_b"] = cnn.dense_b;
            p["out_w"] = cnn.out_w;
            p["out_b"] = cnn.out_b;
            break;
        }
    }
    return p;
}

void parameters_from_json(const json& p, TrainedModel& model) {
    switch (model.kind) {
        case ModelKind::Ols:
        case ModelKind::Ridge:
        case ModelKind::Lasso: {
            auto& lin = model.linear;
            lin.intercept = p.at("intercept").get<double>();
            lin.coefficients = p.at("coefficients").get<std::vector<double>>();
            lin.regularization = regularization_from_name(p.at("regularization"));
            lin.lambda = p.at("lambda").get<double>();
            lin.iterations = p.at("iterations").get<int>();
            lin.converged = p.at("converged").get<bool>();
            lin.rank_deficient = p.at("rank_deficient").get<bool>();
            break;
        }
        case ModelKind::Tree:
            model.tree = tree_from_json(p);
            break;
        case ModelKind::Forest: {
            auto& forest = model.forest;
            forest.params.n_trees = p.at("n_trees").get<std::size_t>();
            forest.params.max_depth = p.at("max_depth").get<int>();
            forest.params.min_samples_leaf = p.at("min_samples_leaf").get<std::size_t>();
            forest.params.features_per_split = p.at("features_per_split").get<std::size_t>();
            forest.params.bootstrap = p.at("bootstrap").get<bool>();
            forest.params.seed = p.at("seed").get<std::uint64_t>();
            forest.n_features = p.at("n_features").get<std::size_t>();
            for (const auto& t : p.at("trees")) forest.trees.push_back(tree_from_json(t));
            break;
        }
        case ModelKind::Boosted: {
            auto& boosted = model.boosted;
            boosted.initial_prediction = p.at("initial_prediction").get<double>();
            boosted.params.n_stages = p.at("n_stages").get<std::size_t>();
            boosted.params.learning_rate = p.at("learning_rate").get<double>();
            boosted.params.max_depth = p.at("max_depth").get<int>();
            boosted.params.min_samples_leaf = p.at("min_samples_leaf").get<std::size_t>();
            boosted.params.seed = p.at("seed").get<std::uint64_t>();
            boosted.n_features = p.at("n_features").get<std::size_t>();
            for (const auto& s : p.at("stages"))
                boosted.stages.push_back(
                    {tree_from_json(s.at("tree")), s.at("learning_rate").get<double>()});
            break;
        }
        case ModelKind::Cnn: {
            auto& cnn = model.cnn;
            cnn.spec.filters = p.at("filters").get<int>();
            cnn.spec.kernel_size = p.at("kernel_size").get<int>();
            cnn.spec.dense_units = p.at("dense_units").get<int>();
            cnn.spec.use_dropout = p.at("use_dropout").get<bool>();
            cnn.spec.dropout_rate = p.at("dropout_rate").get<double>();
            cnn.spec.learning_rate = p.at("learning_rate").get<double>();
            cnn.input_width = p.at("input_width").get<int>();
            cnn.seed = p.at("seed").get<std::uint64_t>();
            cnn.conv_w = p.at("conv_w").get<std::vector<double>>();
            cnn.conv_b = p.at("conv_b").get<std::vector<double>>();
            cnn.dense_w = p.at("dense_w").get<std::vector<double>>();
            cnn.dense_b = p.at("dense_b").get<std::vector<double>>();
            cnn.out_w = p.at("out_w").get<std::vector<double>>();
            cnn.out_b = p.at("out_b").get<double>();
            cnn.schema_id = feat::to_string(model.schema.set);
            break;
        }
    }
}

json core_to_json(const TrainedModel& model) {
    json j;
    j["model_kind"] = to_string(model.kind);
    j["schema"] = {{"feature_set", feat::to_string(model.schema.set)},
                   {"columns", model.schema.columns},
                   {"categories", model.schema.categories}};
    j["target_transform"] = feat::to_string(model.target_transform);
    j["standardizer"] = {{"enabled", model.standardized},
                         {"means", model.standardizer.means},
                         {"stds", model.standardizer.stds}};
    j["parameters"] = parameters_to_json(model);
    return j;
}

}  // namespace

std::string TrainedModel::fingerprint() const {
    const std::string core = core_to_json(*this).dump();
    return to_hex(fnv1a64(core.data(), core.size()));
}

double TrainedModel::predict_row(std::span<const double> raw_row) const {
    std::vector<double> row(raw_row.begin(), raw_row.end());
    if (standardized) standardizer.apply_row(row);
    switch (kind) {
        case ModelKind::Ols:
        case ModelKind::Ridge:
        case ModelKind::Lasso:
            return linmod::predict(linear, row);
        case ModelKind::Tree:
            return tree.predict(row);
        case ModelKind::Forest:
            return forest.predict(row);
        case ModelKind::Boosted:
            return boosted.predict(row);
        case ModelKind::Cnn:
            return cnn.predict(row);
    }
    throw std::logic_error("unreachable model kind");
}

std::string serialize_model(const TrainedModel& model) {
    json j = core_to_json(model);
    j["format_version"] = kFormatVersion;
    j["metadata"] = {{"seed", model.seed},
                     {"dataset_fingerprint", model.dataset_fingerprint},
                     {"data_start", model.data_start},
                     {"data_end", model.data_end},
                     {"split_boundary", model.split_boundary},
                     {"train_rows", model.train_rows},
                     {"test_rows", model.test_rows},
                     {"train_mse", model.train_mse},
                     {"test_mse", model.test_mse}};
    return j.dump(1) + "\n";
}

TrainedModel deserialize_model(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kFormatVersion)
            throw ParseError("model file: unsupported format_version " +
                             std::to_string(version));

        TrainedModel model;
        model.kind = model_kind_from_string(j.at("model_kind").get<std::string>());
        const auto& schema = j.at("schema");
        model.schema.set = feat::feature_set_from_string(schema.at("feature_set"));
        model.schema.columns = schema.at("columns").get<std::vector<std::string>>();
        model.schema.categories = schema.at("categories").get<std::vector<std::string>>();
        model.target_transform =
            feat::target_transform_from_string(j.at("target_transform"));
        const auto& st = j.at("standardizer");
        model.standardized = st.at("enabled").get<bool>();
        model.standardizer.means = st.at("means").get<std::vector<double>>();
        model.standardizer.stds = st.at("stds").get<std::vector<double>>();
        parameters_from_json(j.at("parameters"), model);

        const auto& meta = j.at("metadata");
        model.seed = meta.at("seed").get<std::uint64_t>();
        model.dataset_fingerprint = meta.at("dataset_fingerprint").get<std::string>();
        model.data_start = meta.at("data_start").get<std::int64_t>();
        model.data_end = meta.at("data_end").get<std::int64_t>();
        model.split_boundary = meta.at("split_boundary").get<std::int64_t>();
        model.train_rows = meta.at("train_rows").get<std::size_t>();
        model.test_rows = meta.at("test_rows").get<std::size_t>();
        model.train_mse = meta.at("train_mse").get<double>();
        model.test_mse = meta.at("test_mse").get<double>();
        return model;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << serialize_model(model);
    if (!f) throw std::runtime_error("write failed: " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return deserialize_model(buf.str());
}

std::string dataset_fingerprint(const feat::Dataset& ds) {
    std::uint64_t h = fnv1a64(nullptr, 0);
    for (const auto& col : ds.schema.columns) h = fnv1a64(col.data(), col.size(), h);
    h = fnv1a64(ds.rows.data().data(), ds.rows.data().size() * sizeof(double), h);
    h = fnv1a64(ds.targets.data(), ds.targets.size() * sizeof(double), h);
    for (const auto& key : ds.keys) {
        h = fnv1a64(&key.token_id, sizeof(key.token_id), h);
        h = fnv1a64(&key.timestamp, sizeof(key.timestamp), h);
    }
    return to_hex(h);
}

TrainedModel train_model(const std::vector<ingest::TradeRecord>& trades,
                         const std::vector<ingest::AssetTraits>& assets,
                         const TrainSpec& spec) {
    const auto stats = rarity::build_collection_stats(assets);
    auto scored = rarity::score_collection(assets, stats);
    rarity::rank_collection(scored.results);
    const auto market_days = feat::aggregate_market_days(trades);
    const auto categories =
        spec.categories.empty() ? feat::default_trait_categories() : spec.categories;
    const auto schema = feat::FeatureSchema::make(spec.set, categories);

    feat::Dataset dataset = feat::build_dataset(trades, assets, scored.results, market_days,
                                                schema, spec.target);
    if (dataset.size() < 2)
        throw std::runtime_error("train: dataset has fewer than 2 rows after filtering");

    auto [train, test] = feat::chronological_split(dataset, spec.test_fraction);

    TrainedModel model;
    model.kind = spec.kind;
    model.schema = schema;
    model.target_transform = spec.target;
    model.seed = spec.seed;
    model.dataset_fingerprint = dataset_fingerprint(dataset);
    model.data_start = train.keys.front().timestamp;
    model.data_end = test.keys.back().timestamp;
    model.split_boundary = test.keys.front().timestamp;
    model.train_rows = train.size();
    model.test_rows = test.size();

    if (spec.standardize) {
        model.standardized = true;
        model.standardizer = feat::Standardizer::fit(train);
        train = model.standardizer.apply(train);
        test = model.standardizer.apply(test);
    }

    switch (spec.kind) {
        case ModelKind::Ols:
            model.linear = linmod::fit_ols(train.rows, train.targets);
            break;
        case ModelKind::Ridge:
            model.linear = linmod::fit_ridge(train.rows, train.targets, spec.ridge_lambda);
            break;
        case ModelKind::Lasso:
            model.linear = linmod::fit_lasso(train.rows, train.targets, spec.lasso_lambda);
            break;
        case ModelKind::Tree:
            model.tree = trees::fit_tree(train.rows, train.targets, spec.tree);
            break;
        case ModelKind::Forest: {
            trees::ForestParams params = spec.forest;
            params.seed = spec.seed;
            model.forest = trees::fit_random_forest(train.rows, train.targets, params);
            break;
        }
        case ModelKind::Boosted: {
            trees::BoostParams params = spec.boost;
            params.seed = spec.seed;
            model.boosted = trees::fit_gradient_boosting(train.rows, train.targets, params);
            break;
        }
        case ModelKind::Cnn: {
            neural::CnnModel cnn = neural::init_model(
                spec.cnn, static_cast<int>(train.rows.cols()), spec.seed);
            cnn.schema_id = feat::to_string(schema.set);
            neural::TrainOptions opts = spec.cnn_train;
            opts.seed = spec.seed;
            neural::train(cnn, train.rows, train.targets, opts);
            model.cnn = std::move(cnn);
            break;
        }
    }

    // Model-level test/train error on the standardized design.
    std::vector<double> train_pred(train.size()), test_pred(test.size());
    auto predict_standardized = [&](std::span<const double> row) {
        switch (model.kind) {
            case ModelKind::Ols:
            case ModelKind::Ridge:
            case ModelKind::Lasso:
                return linmod::predict(model.linear, row);
            case ModelKind::Tree:
                return model.tree.predict(row);
            case ModelKind::Forest:
                return model.forest.predict(row);
            case ModelKind::Boosted:
                return model.boosted.predict(row);
            case ModelKind::Cnn:
                return model.cnn.predict(row);
        }
        throw std::logic_error("unreachable model kind");
    };
    for (std::size_t i = 0; i < train.size(); ++i)
        train_pred[i] = predict_standardized(train.rows.row(i));
    for (std::size_t i = 0; i < test.size(); ++i)
        test_pred[i] = predict_standardized(test.rows.row(i));
    model.train_mse = bench::mse(train_pred, train.targets);
    model.test_mse = bench::mse(test_pred, test.targets);
    return model;
}

PreparedCollection PreparedCollection::build(std::vector<ingest::AssetTraits> assets) {
    PreparedCollection prepared;
    prepared.assets = std::move(assets);
    prepared.stats = rarity::build_collection_stats(prepared.assets);
    auto scored = rarity::score_collection(prepared.assets, prepared.stats);
    rarity::rank_collection(scored.results);
    prepared.ranked = std::move(scored.results);
    for (std::size_t i = 0; i < prepared.assets.size(); ++i)
        prepared.index_by_token[prepared.assets[i].token_id] = i;
    return prepared;
}

Valuation predict_valuation(const TrainedModel& model, const PreparedCollection& collection,
                            const ValuationRequest& request) {
    const auto idx_it = collection.index_by_token.find(request.token_id);
    if (idx_it == collection.index_by_token.end())
        throw std::invalid_argument("unknown token " + std::to_string(request.token_id));
    const auto& asset = collection.assets[idx_it->second];
    const auto& rarity_result = collection.ranked[idx_it->second];

    if (model.schema.has_last_trade() && !request.has_last_trade)
        throw std::invalid_argument(std::string("model schema ") +
                                    feat::to_string(model.schema.set) +
                                    " requires last-trade data");
    if (request.has_last_trade &&
        request.as_of_timestamp <= request.last_trade_timestamp)
        throw std::invalid_argument("as-of timestamp must follow the last trade");
    if (model.schema.has_market() &&
        !(request.price_min_eth <= request.price_p5_eth &&
          request.price_p5_eth <= request.price_max_eth))
        throw std::invalid_argument("market snapshot violates min <= p5 <= max");
    if (model.target_transform == feat::TargetTransform::Usd &&
        !(request.eth_usd_rate > 0.0))
        throw std::invalid_argument(
            "USD-target model needs a positive eth_usd_rate to report ETH");

    std::vector<double> row;
    row.reserve(model.schema.columns.size());
    if (model.schema.has_market()) {
        row.push_back(request.volume_eth);
        row.push_back(request.price_p5_eth);
        row.push_back(request.price_max_eth);
        row.push_back(request.price_min_eth);
    }
    row.push_back(static_cast<double>(rarity_result.rarity_rank));
    for (const auto& cat : model.schema.categories) {
        const std::string* value = asset.find(cat);
        row.push_back(static_cast<double>(
            collection.stats.count_for(cat, value ? *value : rarity::kNoneValue)));
    }
    if (model.schema.has_last_trade()) {
        row.push_back(
            static_cast<double>(request.as_of_timestamp - request.last_trade_timestamp));
        row.push_back(request.last_trade_price_eth);
    }

    const double prediction = model.predict_row(row);

    Valuation valuation;
    valuation.token_id = request.token_id;
    valuation.model_kind = to_string(model.kind);
    valuation.schema_id = feat::to_string(model.schema.set);
    valuation.model_fingerprint = model.fingerprint();
    switch (model.target_transform) {
        case feat::TargetTransform::Eth:
            valuation.valuation_eth = prediction;
            break;
        case feat::TargetTransform::LogEth:
            valuation.valuation_eth = std::exp(prediction);
            valuation.log_transformed = true;
            break;
        case feat::TargetTransform::Usd:
            valuation.valuation_eth = prediction / request.eth_usd_rate;
            break;
    }
    return valuation;
}

}  // namespace nftval::modelio
