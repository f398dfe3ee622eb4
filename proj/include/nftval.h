/* nftval.h - C interface to the NFT valuation engine.
 *
 * All functions return NFTVAL_OK on success. On failure they return a status
 * code and leave a human-readable message in nftval_last_error() (thread
 * local). Handles are opaque; free them with the matching *_free call.
 */
#ifndef NFTVAL_H
#define NFTVAL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    NFTVAL_OK = 0,
    NFTVAL_ERR_IO = 1,       /* file missing or unwritable */
    NFTVAL_ERR_PARSE = 2,    /* malformed input file */
    NFTVAL_ERR_ARGUMENT = 3, /* invalid argument or request */
    NFTVAL_ERR_STATE = 4,    /* runtime failure (e.g. diverged training) */
    NFTVAL_ERR_INTERNAL = 5
} nftval_status;

const char* nftval_last_error(void);
const char* nftval_version(void);

/* ---- valuation serving ------------------------------------------------- */

typedef struct nftval_model nftval_model;
typedef struct nftval_collection nftval_collection;

nftval_status nftval_collection_load(const char* traits_json_path,
                                     nftval_collection** out);
void nftval_collection_free(nftval_collection* collection);
size_t nftval_collection_size(const nftval_collection* collection);

nftval_status nftval_model_load(const char* model_path, nftval_model** out);
void nftval_model_free(nftval_model* model);
const char* nftval_model_kind(const nftval_model* model);
const char* nftval_model_schema_id(const nftval_model* model);
const char* nftval_model_fingerprint(const nftval_model* model);

typedef struct {
    long long token_id;
    /* Prior-day market snapshot (ETH). */
    double volume_eth;
    double price_p5_eth;
    double price_max_eth;
    double price_min_eth;
    int has_last_trade;
    double last_trade_price_eth;
    long long last_trade_timestamp;
    long long as_of_timestamp;
    /* Required for USD-target models; 0 otherwise. */
    double eth_usd_rate;
} nftval_request;

typedef struct {
    long long token_id;
    double valuation_eth;
    int log_transformed;
    char model_kind[16];
    char schema_id[8];
    char model_fingerprint[24];
} nftval_valuation;

void nftval_request_init(nftval_request* request);

nftval_status nftval_valuate(const nftval_model* model,
                             const nftval_collection* collection,
                             const nftval_request* request, nftval_valuation* out);

/* ---- offline pipeline --------------------------------------------------- */

typedef struct {
    unsigned long long seed;
    size_t tokens;
    int days;
    int trades_per_day_min;
    int trades_per_day_max;
    const char* pricing; /* "constant" | "linear" | "interaction" */
    double noise_sigma;
    double eth_usd_rate;
} nftval_synth_params;

void nftval_synth_params_init(nftval_synth_params* params);
nftval_status nftval_synth_run(const nftval_synth_params* params, const char* trades_csv,
                               const char* traits_json, const char* truth_json);

nftval_status nftval_ingest_check(const char* trades_csv, const char* traits_json,
                                  size_t* trades_out, size_t* assets_out,
                                  size_t* zero_price_out);

nftval_status nftval_rarity_run(const char* traits_json, const char* out_csv);

typedef struct {
    const char* feature_set; /* "X1" | "X2" | "X3" */
    const char* target;      /* "eth" | "log_eth" | "usd" */
    double test_fraction;
    int standardize;
} nftval_features_params;

void nftval_features_params_init(nftval_features_params* params);
nftval_status nftval_features_run(const char* trades_csv, const char* traits_json,
                                  const nftval_features_params* params,
                                  const char* out_csv, const char* schema_json_out);

nftval_status nftval_pca_run(const char* trades_csv, const char* traits_json, int k,
                             const char* out_csv);

typedef struct {
    double test_fraction;
    unsigned long long seed;
    const char* format; /* "csv" | "md" */
} nftval_benchmark_params;

void nftval_benchmark_params_init(nftval_benchmark_params* params);
nftval_status nftval_benchmark_run(const char* trades_csv, const char* traits_json,
                                   const nftval_benchmark_params* params,
                                   const char* out_path);

nftval_status nftval_report_render(const char* bench_csv, const char* format,
                                   const char* out_path);

typedef struct {
    const char* feature_set;
    const char* target;
    double test_fraction;
    int standardize;
    int n_trials;
    unsigned long long seed;
    int epochs;
    int batch_size;
} nftval_tune_params;

void nftval_tune_params_init(nftval_tune_params* params);
/* best_model_out may be NULL to skip saving the winning model. */
nftval_status nftval_tune_run(const char* trades_csv, const char* traits_json,
                              const nftval_tune_params* params, const char* trials_csv,
                              const char* importance_csv, const char* best_model_out,
                              int* best_trial_out, double* best_val_loss_out);

typedef struct {
    const char* model_kind; /* ols|ridge|lasso|tree|forest|boosted|cnn */
    const char* feature_set;
    const char* target;
    double test_fraction;
    unsigned long long seed;
    int standardize;

    double ridge_lambda;
    double lasso_lambda;

    int tree_max_depth; /* -1 = unlimited */
    int tree_min_samples_leaf;
    int forest_trees;
    int forest_max_depth;
    int forest_min_samples_leaf;
    int forest_features_per_split; /* 0 = ceil(p/3) */
    int boost_stages;
    double boost_learning_rate;
    int boost_max_depth;

    int cnn_filters;
    int cnn_kernel;
    int cnn_units;
    int cnn_dropout;
    double cnn_dropout_rate;
    double cnn_learning_rate;
    int cnn_epochs;
    int cnn_batch_size;
} nftval_train_params;

void nftval_train_params_init(nftval_train_params* params);
nftval_status nftval_train_run(const char* trades_csv, const char* traits_json,
                               const nftval_train_params* params, const char* model_out,
                               double* train_mse_out, double* test_mse_out);

#ifdef __cplusplus
}
#endif

#endif /* NFTVAL_H */
