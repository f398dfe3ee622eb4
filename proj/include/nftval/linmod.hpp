#pragma once

#include <span>
#include <vector>

#include "nftval/core.hpp"
#include "nftval/features.hpp"

namespace nftval::linmod {

enum class Regularization { None, Ridge, Lasso };

struct LinearModel {
    double intercept = 0.0;
    std::vector<double> coefficients;
    Regularization regularization = Regularization::None;
    double lambda = 0.0;
    int iterations = 0;
    bool converged = true;
    // Set when the design matrix was rank deficient and the minimum-norm
    // solution was taken.
    bool rank_deficient = false;
};

// Least squares via complete orthogonal decomposition; rank-deficient
// systems get the minimum-norm solution.
LinearModel fit_ols(const Matrix& x, std::span<const double> y);

// Closed-form (X'X + lambda*I) beta = X'y on centered data. The intercept is
// never penalized. lambda = 0 reproduces OLS.
LinearModel fit_ridge(const Matrix& x, std::span<const double> y, double lambda);

struct LassoOptions {
    double tolerance = 1e-6;  // max coefficient change per sweep
    int max_sweeps = 10000;
};

// Coordinate descent with soft thresholding on objective
// (1/2n)*RSS + lambda*||beta||_1. Expects standardized features; the
// intercept is unpenalized. Non-convergence is flagged, not thrown.
LinearModel fit_lasso(const Matrix& x, std::span<const double> y, double lambda,
                      const LassoOptions& options = {});

double predict(const LinearModel& model, std::span<const double> row);

}  // namespace nftval::linmod
