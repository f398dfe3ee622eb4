#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nftval/core.hpp"

namespace nftval::neural {

struct CnnSpec {
    int filters = 32;
    int kernel_size = 3;
    int dense_units = 64;
    bool use_dropout = false;
    double dropout_rate = 0.25;
    double learning_rate = 1e-3;
};

// 1-D convolution over the feature row (single channel, valid padding,
// stride 1) -> ReLU -> flatten -> dense ReLU layer -> optional dropout ->
// linear scalar output.
struct CnnModel {
    CnnSpec spec;
    int input_width = 0;
    std::uint64_t seed = 0;
    std::string schema_id;

    std::vector<double> conv_w;  // [f * K + k]
    std::vector<double> conv_b;  // [f]
    std::vector<double> dense_w;  // [u * J + j], J = filters * conv_width
    std::vector<double> dense_b;  // [u]
    std::vector<double> out_w;    // [u]
    double out_b = 0.0;

    int conv_width() const { return input_width - spec.kernel_size + 1; }
    int flat_size() const { return spec.filters * conv_width(); }

    // Inference-mode forward pass (dropout off).
    double predict(std::span<const double> row) const;
};

// He-normal weights (scale sqrt(2 / fan_in)), zero biases; deterministic
// given the seed.
CnnModel init_model(const CnnSpec& spec, int input_width, std::uint64_t seed);

// Intermediate activations of one forward pass, reused across rows.
struct ForwardCache {
    std::vector<double> conv_pre;    // [f * W + i]
    std::vector<double> conv_act;    // flattened conv output (the dense input)
    std::vector<double> dense_pre;   // [u]
    std::vector<double> dense_act;   // [u], after dropout when a mask is given
    double output = 0.0;
};

// mask: empty = no dropout; otherwise per-unit factors (0 or 1/(1-rate)).
double forward_cached(const CnnModel& model, std::span<const double> row,
                      ForwardCache& cache, std::span<const double> mask = {});

struct Gradients {
    std::vector<double> conv_w, conv_b, dense_w, dense_b, out_w;
    double out_b = 0.0;

    static Gradients zeros_like(const CnnModel& model);
};

// Exact gradients of the batch-mean squared error, dropout off.
Gradients backward(const CnnModel& model, const Matrix& rows, std::span<const double> targets);

struct AdamState {
    Gradients m;  // first moments
    Gradients v;  // second moments
    long step = 0;

    static AdamState zeros_like(const CnnModel& model);
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

// One bias-corrected Adam update applied in place. Throws on non-finite
// gradients.
void adam_step(CnnModel& model, AdamState& state, const Gradients& grads, double lr);

struct TrainOptions {
    int epochs_cap = 25;
    int batch_size = 32;
    double validation_fraction = 0.2;  // chronological tail of the given rows
    std::uint64_t seed = 0;
};

struct TrainReport {
    std::vector<double> train_loss;  // MSE per epoch
    std::vector<double> val_loss;
    int epochs_run = 0;
    int batch_size = 0;
    std::uint64_t seed = 0;
    int best_epoch = -1;  // 0-based epoch whose parameters were kept
};

// Mini-batch Adam on MSE. Rows shuffle each epoch with the seeded generator;
// the validation tail is held out before shuffling. Returns the parameters
// from the epoch with minimal validation loss. Throws DivergedError when the
// training loss becomes non-finite.
TrainReport train(CnnModel& model, const Matrix& rows, std::span<const double> targets,
                  const TrainOptions& options);

double mse_on(const CnnModel& model, const Matrix& rows, std::span<const double> targets);

}  // namespace nftval::neural
