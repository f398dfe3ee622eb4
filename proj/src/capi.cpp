#include "nftval.h"

#include <cstring>
#include <string>

#include "nftval/pipeline.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

// Maps C++ exceptions from the core onto status codes.
template <typename Fn>
nftval_status guarded(Fn&& fn) {
    try {
        fn();
        return NFTVAL_OK;
    } catch (const nftval::ParseError& e) {
        set_error(e.what());
        return NFTVAL_ERR_PARSE;
    } catch (const nftval::DivergedError& e) {
        set_error(e.what());
        return NFTVAL_ERR_STATE;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return NFTVAL_ERR_ARGUMENT;
    } catch (const std::domain_error& e) {
        set_error(e.what());
        return NFTVAL_ERR_ARGUMENT;
    } catch (const std::runtime_error& e) {
        set_error(e.what());
        return NFTVAL_ERR_STATE;
    } catch (const std::exception& e) {
        set_error(e.what());
        return NFTVAL_ERR_INTERNAL;
    }
}

nftval_status require(bool ok, const char* msg) {
    if (!ok) {
        set_error(msg);
        return NFTVAL_ERR_ARGUMENT;
    }
    return NFTVAL_OK;
}

void copy_to(char* dst, size_t cap, const std::string& src) {
    std::strncpy(dst, src.c_str(), cap - 1);
    dst[cap - 1] = '\0';
}

nftval::bench::ReportFormat format_from_string(const char* format) {
    const std::string f = format ? format : "csv";
    if (f == "csv") return nftval::bench::ReportFormat::Csv;
    if (f == "md" || f == "markdown") return nftval::bench::ReportFormat::Markdown;
    throw std::invalid_argument("unknown report format: " + f);
}

}  // namespace

struct nftval_model {
    nftval::modelio::TrainedModel model;
    std::string kind;
    std::string schema_id;
    std::string fingerprint;
};

struct nftval_collection {
    nftval::modelio::PreparedCollection prepared;
};

extern "C" {

const char* nftval_last_error(void) { return g_last_error.c_str(); }

const char* nftval_version(void) { return "1.0.0"; }

nftval_status nftval_collection_load(const char* traits_json_path,
                                     nftval_collection** out) {
    if (auto rc = require(traits_json_path && out, "null argument")) return rc;
    *out = nullptr;
    return guarded([&] {
        auto assets = nftval::ingest::load_traits_file(traits_json_path);
        auto* handle = new nftval_collection{
            nftval::modelio::PreparedCollection::build(std::move(assets))};
        *out = handle;
    });
}

void nftval_collection_free(nftval_collection* collection) { delete collection; }

size_t nftval_collection_size(const nftval_collection* collection) {
    return collection ? collection->prepared.assets.size() : 0;
}

nftval_status nftval_model_load(const char* model_path, nftval_model** out) {
    if (auto rc = require(model_path && out, "null argument")) return rc;
    *out = nullptr;
    return guarded([&] {
        auto loaded = nftval::modelio::load_model(model_path);
        auto* handle = new nftval_model{};
        handle->model = std::move(loaded);
        handle->kind = nftval::modelio::to_string(handle->model.kind);
        handle->schema_id = nftval::feat::to_string(handle->model.schema.set);
        handle->fingerprint = handle->model.fingerprint();
        *out = handle;
    });
}

void nftval_model_free(nftval_model* model) { delete model; }

const char* nftval_model_kind(const nftval_model* model) {
    return model ? model->kind.c_str() : "";
}

const char* nftval_model_schema_id(const nftval_model* model) {
    return model ? model->schema_id.c_str() : "";
}

const char* nftval_model_fingerprint(const nftval_model* model) {
    return model ? model->fingerprint.c_str() : "";
}

void nftval_request_init(nftval_request* request) {
    if (!request) return;
    *request = nftval_request{};
}

nftval_status nftval_valuate(const nftval_model* model,
                             const nftval_collection* collection,
                             const nftval_request* request, nftval_valuation* out) {
    if (auto rc = require(model && collection && request && out, "null argument"))
        return rc;
    return guarded([&] {
        nftval::modelio::ValuationRequest req;
        req.token_id = request->token_id;
        req.volume_eth = request->volume_eth;
        req.price_p5_eth = request->price_p5_eth;
        req.price_max_eth = request->price_max_eth;
        req.price_min_eth = request->price_min_eth;
        req.has_last_trade = request->has_last_trade != 0;
        req.last_trade_price_eth = request->last_trade_price_eth;
        req.last_trade_timestamp = request->last_trade_timestamp;
        req.as_of_timestamp = request->as_of_timestamp;
        req.eth_usd_rate = request->eth_usd_rate;

        const auto valuation =
            nftval::modelio::predict_valuation(model->model, collection->prepared, req);
        out->token_id = valuation.token_id;
        out->valuation_eth = valuation.valuation_eth;
        out->log_transformed = valuation.log_transformed ? 1 : 0;
        copy_to(out->model_kind, sizeof(out->model_kind), valuation.model_kind);
        copy_to(out->schema_id, sizeof(out->schema_id), valuation.schema_id);
        copy_to(out->model_fingerprint, sizeof(out->model_fingerprint),
                valuation.model_fingerprint);
    });
}

void nftval_synth_params_init(nftval_synth_params* params) {
    if (!params) return;
    nftval::synth::SynthConfig defaults;
    params->seed = defaults.seed;
    params->tokens = defaults.tokens;
    params->days = defaults.days;
    params->trades_per_day_min = defaults.trades_per_day_min;
    params->trades_per_day_max = defaults.trades_per_day_max;
    params->pricing = "interaction";
    params->noise_sigma = defaults.noise_sigma;
    params->eth_usd_rate = defaults.eth_usd_rate;
}

nftval_status nftval_synth_run(const nftval_synth_params* params, const char* trades_csv,
                               const char* traits_json, const char* truth_json) {
    if (auto rc = require(params && trades_csv && traits_json && truth_json,
                          "null argument"))
        return rc;
    return guarded([&] {
        nftval::synth::SynthConfig config;
        config.seed = params->seed;
        config.tokens = params->tokens;
        config.days = params->days;
        config.trades_per_day_min = params->trades_per_day_min;
        config.trades_per_day_max = params->trades_per_day_max;
        config.pricing = nftval::synth::pricing_from_string(
            params->pricing ? params->pricing : "interaction");
        config.noise_sigma = params->noise_sigma;
        config.eth_usd_rate = params->eth_usd_rate;
        nftval::pipeline::run_synth(config, trades_csv, traits_json, truth_json);
    });
}

nftval_status nftval_ingest_check(const char* trades_csv, const char* traits_json,
                                  size_t* trades_out, size_t* assets_out,
                                  size_t* zero_price_out) {
    if (auto rc = require(trades_csv && traits_json, "null argument")) return rc;
    return guarded([&] {
        const auto summary = nftval::pipeline::run_ingest_check(trades_csv, traits_json);
        if (trades_out) *trades_out = summary.trades;
        if (assets_out) *assets_out = summary.assets;
        if (zero_price_out) *zero_price_out = summary.zero_price_trades;
    });
}

nftval_status nftval_rarity_run(const char* traits_json, const char* out_csv) {
    if (auto rc = require(traits_json && out_csv, "null argument")) return rc;
    return guarded([&] { nftval::pipeline::run_rarity(traits_json, out_csv); });
}

void nftval_features_params_init(nftval_features_params* params) {
    if (!params) return;
    params->feature_set = "X1";
    params->target = "eth";
    params->test_fraction = 0.2;
    params->standardize = 1;
}

nftval_status nftval_features_run(const char* trades_csv, const char* traits_json,
                                  const nftval_features_params* params,
                                  const char* out_csv, const char* schema_json_out) {
    if (auto rc = require(trades_csv && traits_json && params && out_csv &&
                              schema_json_out,
                          "null argument"))
        return rc;
    return guarded([&] {
        nftval::pipeline::FeaturesParams fp;
        fp.set = nftval::feat::feature_set_from_string(params->feature_set);
        fp.target = nftval::feat::target_transform_from_string(params->target);
        fp.test_fraction = params->test_fraction;
        fp.standardize = params->standardize != 0;
        nftval::pipeline::run_features(trades_csv, traits_json, fp, out_csv,
                                       schema_json_out);
    });
}

nftval_status nftval_pca_run(const char* trades_csv, const char* traits_json, int k,
                             const char* out_csv) {
    if (auto rc = require(trades_csv && traits_json && out_csv, "null argument")) return rc;
    if (auto rc = require(k > 0, "k must be positive")) return rc;
    return guarded([&] {
        nftval::pipeline::run_pca(trades_csv, traits_json, static_cast<std::size_t>(k),
                                  out_csv);
    });
}

void nftval_benchmark_params_init(nftval_benchmark_params* params) {
    if (!params) return;
    params->test_fraction = 0.2;
    params->seed = 0;
    params->format = "csv";
}

nftval_status nftval_benchmark_run(const char* trades_csv, const char* traits_json,
                                   const nftval_benchmark_params* params,
                                   const char* out_path) {
    if (auto rc = require(trades_csv && traits_json && params && out_path,
                          "null argument"))
        return rc;
    return guarded([&] {
        nftval::bench::BenchConfig config;
        config.test_fraction = params->test_fraction;
        config.seed = params->seed;
        nftval::pipeline::run_benchmark_files(trades_csv, traits_json, config,
                                              format_from_string(params->format), out_path);
    });
}

nftval_status nftval_report_render(const char* bench_csv, const char* format,
                                   const char* out_path) {
    if (auto rc = require(bench_csv && out_path, "null argument")) return rc;
    return guarded([&] {
        nftval::pipeline::run_report(bench_csv, format_from_string(format), out_path);
    });
}

void nftval_tune_params_init(nftval_tune_params* params) {
    if (!params) return;
    params->feature_set = "X1";
    params->target = "eth";
    params->test_fraction = 0.2;
    params->standardize = 1;
    params->n_trials = 20;
    params->seed = 0;
    params->epochs = 25;
    params->batch_size = 32;
}

nftval_status nftval_tune_run(const char* trades_csv, const char* traits_json,
                              const nftval_tune_params* params, const char* trials_csv,
                              const char* importance_csv, const char* best_model_out,
                              int* best_trial_out, double* best_val_loss_out) {
    if (auto rc = require(trades_csv && traits_json && params && trials_csv &&
                              importance_csv,
                          "null argument"))
        return rc;
    return guarded([&] {
        nftval::pipeline::TuneParams tp;
        tp.set = nftval::feat::feature_set_from_string(params->feature_set);
        tp.target = nftval::feat::target_transform_from_string(params->target);
        tp.test_fraction = params->test_fraction;
        tp.standardize = params->standardize != 0;
        tp.n_trials = params->n_trials;
        tp.seed = params->seed;
        tp.train.epochs_cap = params->epochs;
        tp.train.batch_size = params->batch_size;
        std::optional<std::string> model_out;
        if (best_model_out) model_out = best_model_out;
        const auto outcome = nftval::pipeline::run_tune(trades_csv, traits_json, tp,
                                                        trials_csv, importance_csv,
                                                        model_out);
        if (best_trial_out) *best_trial_out = outcome.best_trial;
        if (best_val_loss_out) *best_val_loss_out = outcome.best_val_loss;
    });
}

void nftval_train_params_init(nftval_train_params* params) {
    if (!params) return;
    *params = nftval_train_params{};
    params->model_kind = "ols";
    params->feature_set = "X1";
    params->target = "eth";
    params->test_fraction = 0.2;
    params->seed = 0;
    params->standardize = 1;
    params->ridge_lambda = 1.0;
    params->lasso_lambda = 1.0;
    params->tree_max_depth = -1;
    params->tree_min_samples_leaf = 1;
    params->forest_trees = 100;
    params->forest_max_depth = -1;
    params->forest_min_samples_leaf = 2;
    params->forest_features_per_split = 0;
    params->boost_stages = 100;
    params->boost_learning_rate = 0.1;
    params->boost_max_depth = 3;
    params->cnn_filters = 32;
    params->cnn_kernel = 3;
    params->cnn_units = 64;
    params->cnn_dropout = 0;
    params->cnn_dropout_rate = 0.25;
    params->cnn_learning_rate = 1e-3;
    params->cnn_epochs = 25;
    params->cnn_batch_size = 32;
}

nftval_status nftval_train_run(const char* trades_csv, const char* traits_json,
                               const nftval_train_params* params, const char* model_out,
                               double* train_mse_out, double* test_mse_out) {
    if (auto rc = require(trades_csv && traits_json && params && model_out,
                          "null argument"))
        return rc;
    return guarded([&] {
        nftval::modelio::TrainSpec spec;
        spec.kind = nftval::modelio::model_kind_from_string(params->model_kind);
        spec.set = nftval::feat::feature_set_from_string(params->feature_set);
        spec.target = nftval::feat::target_transform_from_string(params->target);
        spec.test_fraction = params->test_fraction;
        spec.seed = params->seed;
        spec.standardize = params->standardize != 0;
        spec.ridge_lambda = params->ridge_lambda;
        spec.lasso_lambda = params->lasso_lambda;
        spec.tree.max_depth = params->tree_max_depth;
        spec.tree.min_samples_leaf = static_cast<std::size_t>(params->tree_min_samples_leaf);
        spec.forest.n_trees = static_cast<std::size_t>(params->forest_trees);
        spec.forest.max_depth = params->forest_max_depth;
        spec.forest.min_samples_leaf =
            static_cast<std::size_t>(params->forest_min_samples_leaf);
        spec.forest.features_per_split =
            static_cast<std::size_t>(params->forest_features_per_split);
        spec.boost.n_stages = static_cast<std::size_t>(params->boost_stages);
        spec.boost.learning_rate = params->boost_learning_rate;
        spec.boost.max_depth = params->boost_max_depth;
        spec.cnn.filters = params->cnn_filters;
        spec.cnn.kernel_size = params->cnn_kernel;
        spec.cnn.dense_units = params->cnn_units;
        spec.cnn.use_dropout = params->cnn_dropout != 0;
        spec.cnn.dropout_rate = params->cnn_dropout_rate;
        spec.cnn.learning_rate = params->cnn_learning_rate;
        spec.cnn_train.epochs_cap = params->cnn_epochs;
        spec.cnn_train.batch_size = params->cnn_batch_size;

        const auto outcome =
            nftval::pipeline::run_train(trades_csv, traits_json, spec, model_out);
        if (train_mse_out) *train_mse_out = outcome.train_mse;
        if (test_mse_out) *test_mse_out = outcome.test_mse;
    });
}

}  // extern "C"
