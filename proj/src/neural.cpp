#include "nftval/neural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nftval::neural {

namespace {

void check_row_width(const CnnModel& model, std::size_t width) {
    if (static_cast<int>(width) != model.input_width)
        throw std::invalid_argument("row width does not match model input width");
}

void resize_cache(const CnnModel& model, ForwardCache& cache) {
    cache.conv_pre.resize(static_cast<std::size_t>(model.flat_size()));
    cache.conv_act.resize(static_cast<std::size_t>(model.flat_size()));
    cache.dense_pre.resize(static_cast<std::size_t>(model.spec.dense_units));
    cache.dense_act.resize(static_cast<std::size_t>(model.spec.dense_units));
}

bool all_finite(std::span<const double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}

// Shared per-row accumulation for backward passes. upstream = dL/d(output).
void accumulate_row(const CnnModel& model, std::span<const double> row,
                    const ForwardCache& cache, std::span<const double> mask,
                    double upstream, Gradients& grads, std::vector<double>& dz_dense,
                    std::vector<double>& dflat) {
    const int filters = model.spec.filters;
    const int kernel = model.spec.kernel_size;
    const int width = model.conv_width();
    const int units = model.spec.dense_units;
    const int flat = model.flat_size();

    grads.out_b += upstream;
    for (int u = 0; u < units; ++u) {
        grads.out_w[static_cast<std::size_t>(u)] +=
            upstream * cache.dense_act[static_cast<std::size_t>(u)];
        double da = upstream * model.out_w[static_cast<std::size_t>(u)];
        if (!mask.empty()) da *= mask[static_cast<std::size_t>(u)];
        dz_dense[static_cast<std::size_t>(u)] =
            cache.dense_pre[static_cast<std::size_t>(u)] > 0.0 ? da : 0.0;
    }

    std::fill(dflat.begin(), dflat.end(), 0.0);
    for (int u = 0; u < units; ++u) {
        const double dz = dz_dense[static_cast<std::size_t>(u)];
        if (dz == 0.0) continue;
        grads.dense_b[static_cast<std::size_t>(u)] += dz;
        const double* w_row = model.dense_w.data() + static_cast<std::size_t>(u) * flat;
        double* gw_row = grads.dense_w.data() + static_cast<std::size_t>(u) * flat;
        for (int j = 0; j < flat; ++j) {
            gw_row[j] += dz * cache.conv_act[static_cast<std::size_t>(j)];
            dflat[static_cast<std::size_t>(j)] += dz * w_row[j];
        }
    }

    for (int f = 0; f < filters; ++f) {
        double db = 0.0;
        double* gw = grads.conv_w.data() + static_cast<std::size_t>(f * kernel);
        for (int i = 0; i < width; ++i) {
            const std::size_t pos = static_cast<std::size_t>(f * width + i);
            if (cache.conv_pre[pos] <= 0.0) continue;
            const double dz = dflat[pos];
            db += dz;
            for (int k = 0; k < kernel; ++k)
                gw[k] += dz * row[static_cast<std::size_t>(i + k)];
        }
        grads.conv_b[static_cast<std::size_t>(f)] += db;
    }
}

}  // namespace

CnnModel init_model(const CnnSpec& spec, int input_width, std::uint64_t seed) {
    if (spec.filters <= 0 || spec.kernel_size <= 0 || spec.dense_units <= 0)
        throw std::invalid_argument("CnnSpec dimensions must be positive");
    if (spec.kernel_size > input_width)
        throw std::invalid_argument("kernel size exceeds input width");
    if (spec.use_dropout && !(spec.dropout_rate > 0.0 && spec.dropout_rate < 1.0))
        throw std::invalid_argument("dropout rate must be in (0, 1)");

    CnnModel model;
    model.spec = spec;
    model.input_width = input_width;
    model.seed = seed;

    const int width = model.conv_width();
    const int flat = model.flat_size();
    model.conv_w.resize(static_cast<std::size_t>(spec.filters * spec.kernel_size));
    model.conv_b.assign(static_cast<std::size_t>(spec.filters), 0.0);
    model.dense_w.resize(static_cast<std::size_t>(spec.dense_units) *
                         static_cast<std::size_t>(flat));
    model.dense_b.assign(static_cast<std::size_t>(spec.dense_units), 0.0);
    model.out_w.resize(static_cast<std::size_t>(spec.dense_units));
    model.out_b = 0.0;
    (void)width;

    Rng rng(seed);
    const double conv_scale = std::sqrt(2.0 / static_cast<double>(spec.kernel_size));
    for (double& w : model.conv_w) w = conv_scale * rng.normal();
    const double dense_scale = std::sqrt(2.0 / static_cast<double>(flat));
    for (double& w : model.dense_w) w = dense_scale * rng.normal();
    const double out_scale = std::sqrt(2.0 / static_cast<double>(spec.dense_units));
    for (double& w : model.out_w) w = out_scale * rng.normal();
    return model;
}

double forward_cached(const CnnModel& model, std::span<const double> row,
                      ForwardCache& cache, std::span<const double> mask) {
    check_row_width(model, row.size());
    resize_cache(model, cache);

    const int filters = model.spec.filters;
    const int kernel = model.spec.kernel_size;
    const int width = model.conv_width();
    const int units = model.spec.dense_units;
    const int flat = model.flat_size();

    for (int f = 0; f < filters; ++f) {
        const double* w = model.conv_w.data() + static_cast<std::size_t>(f * kernel);
        const double bias = model.conv_b[static_cast<std::size_t>(f)];
        for (int i = 0; i < width; ++i) {
            double z = bias;
            for (int k = 0; k < kernel; ++k) z += w[k] * row[static_cast<std::size_t>(i + k)];
            const std::size_t pos = static_cast<std::size_t>(f * width + i);
            cache.conv_pre[pos] = z;
            cache.conv_act[pos] = z > 0.0 ? z : 0.0;
        }
    }

    for (int u = 0; u < units; ++u) {
        const double* w = model.dense_w.data() + static_cast<std::size_t>(u) * flat;
        double z = model.dense_b[static_cast<std::size_t>(u)];
        for (int j = 0; j < flat; ++j) z += w[j] * cache.conv_act[static_cast<std::size_t>(j)];
        cache.dense_pre[static_cast<std::size_t>(u)] = z;
        double a = z > 0.0 ? z : 0.0;
        if (!mask.empty()) a *= mask[static_cast<std::size_t>(u)];
        cache.dense_act[static_cast<std::size_t>(u)] = a;
    }

    double out = model.out_b;
    for (int u = 0; u < units; ++u)
        out += model.out_w[static_cast<std::size_t>(u)] *
               cache.dense_act[static_cast<std::size_t>(u)];
    cache.output = out;
    return out;
}

double CnnModel::predict(std::span<const double> row) const {
    ForwardCache cache;
    return forward_cached(*this, row, cache);
}

Gradients Gradients::zeros_like(const CnnModel& model) {
    Gradients g;
    g.conv_w.assign(model.conv_w.size(), 0.0);
    g.conv_b.assign(model.conv_b.size(), 0.0);
    g.dense_w.assign(model.dense_w.size(), 0.0);
    g.dense_b.assign(model.dense_b.size(), 0.0);
    g.out_w.assign(model.out_w.size(), 0.0);
    g.out_b = 0.0;
    return g;
}

Gradients backward(const CnnModel& model, const Matrix& rows,
                   std::span<const double> targets) {
    if (rows.rows() == 0) throw std::invalid_argument("backward: empty batch");
    if (rows.rows() != targets.size())
        throw std::invalid_argument("backward: row/target length mismatch");

    Gradients grads = Gradients::zeros_like(model);
    ForwardCache cache;
    std::vector<double> dz_dense(static_cast<std::size_t>(model.spec.dense_units));
    std::vector<double> dflat(static_cast<std::size_t>(model.flat_size()));
    const double inv_b = 1.0 / static_cast<double>(rows.rows());

    for (std::size_t i = 0; i < rows.rows(); ++i) {
        const auto row = rows.row(i);
        const double pred = forward_cached(model, row, cache);
        const double upstream = 2.0 * (pred - targets[i]) * inv_b;
        accumulate_row(model, row, cache, {}, upstream, grads, dz_dense, dflat);
    }
    return grads;
}

AdamState AdamState::zeros_like(const CnnModel& model) {
    AdamState s;
    s.m = Gradients::zeros_like(model);
    s.v = Gradients::zeros_like(model);
    s.step = 0;
    return s;
}

namespace {

void adam_update(std::span<double> params, std::span<double> m, std::span<double> v,
                 std::span<const double> g, double lr, double bc1, double bc2) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * g[i];
        v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + kAdamEpsilon);
    }
}

}  // namespace

void adam_step(CnnModel& model, AdamState& state, const Gradients& grads, double lr) {
    if (!all_finite(grads.conv_w) || !all_finite(grads.conv_b) ||
        !all_finite(grads.dense_w) || !all_finite(grads.dense_b) ||
        !all_finite(grads.out_w) || !std::isfinite(grads.out_b))
        throw std::domain_error("adam_step: non-finite gradient");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));

    adam_update(model.conv_w, state.m.conv_w, state.v.conv_w, grads.conv_w, lr, bc1, bc2);
    adam_update(model.conv_b, state.m.conv_b, state.v.conv_b, grads.conv_b, lr, bc1, bc2);
    adam_update(model.dense_w, state.m.dense_w, state.v.dense_w, grads.dense_w, lr, bc1, bc2);
    adam_update(model.dense_b, state.m.dense_b, state.v.dense_b, grads.dense_b, lr, bc1, bc2);
    adam_update(model.out_w, state.m.out_w, state.v.out_w, grads.out_w, lr, bc1, bc2);

    double m = kAdamBeta1 * state.m.out_b + (1.0 - kAdamBeta1) * grads.out_b;
    double v = kAdamBeta2 * state.v.out_b + (1.0 - kAdamBeta2) * grads.out_b * grads.out_b;
    state.m.out_b = m;
    state.v.out_b = v;
    model.out_b -= lr * (m / bc1) / (std::sqrt(v / bc2) + kAdamEpsilon);
}

double mse_on(const CnnModel& model, const Matrix& rows, std::span<const double> targets) {
    if (rows.rows() == 0) throw std::invalid_argument("mse_on: empty rows");
    ForwardCache cache;
    double sum = 0.0;
    for (std::size_t i = 0; i < rows.rows(); ++i) {
        const double d = forward_cached(model, rows.row(i), cache) - targets[i];
        sum += d * d;
    }
    return sum / static_cast<double>(rows.rows());
}

TrainReport train(CnnModel& model, const Matrix& rows, std::span<const double> targets,
                  const TrainOptions& options) {
    if (rows.rows() != targets.size())
        throw std::invalid_argument("train: row/target length mismatch");
    if (options.epochs_cap < 0) throw std::invalid_argument("train: negative epoch cap");
    if (options.batch_size <= 0) throw std::invalid_argument("train: bad batch size");
    if (!(options.validation_fraction > 0.0 && options.validation_fraction < 1.0))
        throw std::invalid_argument("train: validation fraction must be in (0, 1)");

    TrainReport report;
    report.batch_size = options.batch_size;
    report.seed = options.seed;
    if (options.epochs_cap == 0) return report;

    const std::size_t n = rows.rows();
    const auto val_n = static_cast<std::size_t>(
        std::ceil(options.validation_fraction * static_cast<double>(n)));
    if (val_n == 0 || val_n >= n)
        throw std::invalid_argument("train: validation split leaves an empty side");
    const std::size_t train_n = n - val_n;

    Matrix train_rows(0, rows.cols());
    Matrix val_rows(0, rows.cols());
    std::vector<double> train_y, val_y;
    for (std::size_t i = 0; i < train_n; ++i) {
        train_rows.append_row(rows.row(i));
        train_y.push_back(targets[i]);
    }
    for (std::size_t i = train_n; i < n; ++i) {
        val_rows.append_row(rows.row(i));
        val_y.push_back(targets[i]);
    }

    Rng rng(options.seed);
    AdamState adam = AdamState::zeros_like(model);
    std::vector<std::size_t> order(train_n);
    for (std::size_t i = 0; i < train_n; ++i) order[i] = i;

    const bool dropout = model.spec.use_dropout;
    const double keep = 1.0 - model.spec.dropout_rate;
    const auto units = static_cast<std::size_t>(model.spec.dense_units);
    std::vector<double> mask(units, 1.0);

    ForwardCache cache;
    std::vector<double> dz_dense(units);
    std::vector<double> dflat(static_cast<std::size_t>(model.flat_size()));

    struct Snapshot {
        std::vector<double> conv_w, conv_b, dense_w, dense_b, out_w;
        double out_b;
    } best{};
    double best_val = std::numeric_limits<double>::infinity();

    for (int epoch = 0; epoch < options.epochs_cap; ++epoch) {
        // Fisher-Yates with the session generator.
        for (std::size_t i = train_n - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(rng.below(i + 1));
            std::swap(order[i], order[j]);
        }

        for (std::size_t start = 0; start < train_n;
             start += static_cast<std::size_t>(options.batch_size)) {
            const std::size_t end =
                std::min(train_n, start + static_cast<std::size_t>(options.batch_size));
            const double inv_b = 1.0 / static_cast<double>(end - start);

            Gradients grads = Gradients::zeros_like(model);
            for (std::size_t b = start; b < end; ++b) {
                const auto row = train_rows.row(order[b]);
                std::span<const double> row_mask;
                if (dropout) {
                    for (double& m : mask) m = rng.bernoulli(keep) ? 1.0 / keep : 0.0;
                    row_mask = mask;
                }
                const double pred = forward_cached(model, row, cache, row_mask);
                const double upstream = 2.0 * (pred - train_y[order[b]]) * inv_b;
                accumulate_row(model, row, cache, row_mask, upstream, grads, dz_dense,
                               dflat);
            }
            adam_step(model, adam, grads, model.spec.learning_rate);
        }

        const double train_mse = mse_on(model, train_rows, train_y);
        const double val_mse = mse_on(model, val_rows, val_y);
        report.train_loss.push_back(train_mse);
        report.val_loss.push_back(val_mse);
        report.epochs_run = epoch + 1;
        if (!std::isfinite(train_mse))
            throw DivergedError("training diverged at epoch " + std::to_string(epoch + 1),
                                epoch + 1);

        if (val_mse < best_val) {
            best_val = val_mse;
            report.best_epoch = epoch;
            best = {model.conv_w, model.conv_b, model.dense_w,
                    model.dense_b, model.out_w, model.out_b};
        }
    }

    if (report.best_epoch >= 0) {
        model.conv_w = best.conv_w;
        model.conv_b = best.conv_b;
        model.dense_w = best.dense_w;
        model.dense_b = best.dense_b;
        model.out_w = best.out_w;
        model.out_b = best.out_b;
    }
    return report;
}

}  // namespace nftval::neural
