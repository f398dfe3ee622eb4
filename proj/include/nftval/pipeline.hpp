#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "nftval/bench.hpp"
#include "nftval/model_io.hpp"
#include "nftval/synth.hpp"
#include "nftval/tuner.hpp"

namespace nftval::pipeline {

// File-level front ends for the CLI and the C API. Every function is
// deterministic given its inputs and seeds.

void run_synth(const synth::SynthConfig& config, const std::string& trades_csv,
               const std::string& traits_json, const std::string& truth_json);

struct IngestSummary {
    std::size_t trades = 0;
    std::size_t assets = 0;
    std::size_t zero_price_trades = 0;
};

IngestSummary run_ingest_check(const std::string& trades_path, const std::string& traits_path);

void run_rarity(const std::string& traits_path, const std::string& out_csv);

struct FeaturesParams {
    feat::FeatureSet set = feat::FeatureSet::X1;
    feat::TargetTransform target = feat::TargetTransform::Eth;
    double test_fraction = 0.2;
    bool standardize = true;
    std::vector<std::string> categories;  // empty = default
};

void run_features(const std::string& trades_path, const std::string& traits_path,
                  const FeaturesParams& params, const std::string& out_csv,
                  const std::string& schema_json_out);

void run_pca(const std::string& trades_path, const std::string& traits_path, std::size_t k,
             const std::string& out_csv);

bench::BenchmarkReport run_benchmark_files(const std::string& trades_path,
                                           const std::string& traits_path,
                                           const bench::BenchConfig& config,
                                           bench::ReportFormat format,
                                           const std::string& out_path);

void run_report(const std::string& bench_csv_path, bench::ReportFormat format,
                const std::string& out_path);

struct TuneParams {
    feat::FeatureSet set = feat::FeatureSet::X1;
    feat::TargetTransform target = feat::TargetTransform::Eth;
    double test_fraction = 0.2;
    bool standardize = true;
    int n_trials = 20;
    std::uint64_t seed = 0;
    neural::TrainOptions train;
    tuner::HyperSpace space;
    std::vector<std::string> categories;
};

struct TuneOutcome {
    int best_trial = -1;
    double best_val_loss = 0.0;
    neural::CnnSpec best_spec;
};

TuneOutcome run_tune(const std::string& trades_path, const std::string& traits_path,
                     const TuneParams& params, const std::string& trials_csv,
                     const std::string& importance_csv,
                     const std::optional<std::string>& best_model_out);

struct TrainOutcome {
    double train_mse = 0.0;
    double test_mse = 0.0;
    std::string fingerprint;
};

TrainOutcome run_train(const std::string& trades_path, const std::string& traits_path,
                       const modelio::TrainSpec& spec, const std::string& model_out);

}  // namespace nftval::pipeline
