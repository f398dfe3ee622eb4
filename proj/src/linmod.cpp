#include "nftval/linmod.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace nftval::linmod {

namespace {

struct Centered {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    Eigen::RowVectorXd x_mean;
    double y_mean = 0.0;
};

Centered center(const Matrix& x, std::span<const double> y) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    if (n == 0) throw std::invalid_argument("empty training set");
    if (y.size() != n) throw std::invalid_argument("row/target length mismatch");

    Centered c;
    c.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    c.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        c.y(static_cast<Eigen::Index>(i)) = y[i];
        auto row = x.row(i);
        for (std::size_t j = 0; j < p; ++j)
            c.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
    c.x_mean = c.x.colwise().mean();
    c.y_mean = c.y.mean();
    c.x.rowwise() -= c.x_mean;
    c.y.array() -= c.y_mean;
    return c;
}

void finish(LinearModel& model, const Centered& c, const Eigen::VectorXd& beta) {
    model.coefficients.assign(beta.data(), beta.data() + beta.size());
    model.intercept = c.y_mean - c.x_mean.dot(beta);
}

}  // namespace

LinearModel fit_ols(const Matrix& x, std::span<const double> y) {
    Centered c = center(x, y);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(c.x);
    const Eigen::VectorXd beta = cod.solve(c.y);

    LinearModel model;
    model.regularization = Regularization::None;
    model.rank_deficient = cod.rank() < static_cast<Eigen::Index>(x.cols());
    finish(model, c, beta);
    return model;
}

LinearModel fit_ridge(const Matrix& x, std::span<const double> y, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("ridge lambda must be non-negative");
    if (lambda == 0.0) {
        LinearModel model = fit_ols(x, y);
        model.regularization = Regularization::Ridge;
        model.lambda = 0.0;
        return model;
    }
    Centered c = center(x, y);
    const auto p = static_cast<Eigen::Index>(x.cols());
    Eigen::MatrixXd gram = c.x.transpose() * c.x;
    gram += lambda * Eigen::MatrixXd::Identity(p, p);
    const Eigen::VectorXd beta = gram.ldlt().solve(c.x.transpose() * c.y);

    LinearModel model;
    model.regularization = Regularization::Ridge;
    model.lambda = lambda;
    finish(model, c, beta);
    return model;
}

LinearModel fit_lasso(const Matrix& x, std::span<const double> y, double lambda,
                      const LassoOptions& options) {
    if (lambda < 0.0) throw std::invalid_argument("lasso lambda must be non-negative");
    Centered c = center(x, y);
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    // z_j = (1/n) x_j'x_j, fixed across sweeps.
    std::vector<double> z(p);
    for (std::size_t j = 0; j < p; ++j)
        z[j] = c.x.col(static_cast<Eigen::Index>(j)).squaredNorm() * inv_n;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    Eigen::VectorXd residual = c.y;  // y - X beta, maintained incrementally

    LinearModel model;
    model.regularization = Regularization::Lasso;
    model.lambda = lambda;
    model.converged = false;

    int sweep = 0;
    for (; sweep < options.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            if (z[j] == 0.0) continue;  // constant column
            const auto col = c.x.col(static_cast<Eigen::Index>(j));
            const double old = beta(static_cast<Eigen::Index>(j));
            const double rho = inv_n * col.dot(residual) + z[j] * old;
            const double mag = std::abs(rho) - lambda;
            const double updated = mag > 0.0 ? std::copysign(mag, rho) / z[j] : 0.0;
            if (updated != old) {
                residual += col * (old - updated);
                beta(static_cast<Eigen::Index>(j)) = updated;
                max_change = std::max(max_change, std::abs(updated - old));
            }
        }
        if (max_change < options.tolerance) {
            model.converged = true;
            ++sweep;
            break;
        }
    }
    model.iterations = sweep;
    finish(model, c, beta);
    return model;
}

double predict(const LinearModel& model, std::span<const double> row) {
    if (row.size() != model.coefficients.size())
        throw std::invalid_argument("predict: row width does not match model");
    double out = model.intercept;
    for (std::size_t j = 0; j < row.size(); ++j) out += model.coefficients[j] * row[j];
    return out;
}

}  // namespace nftval::linmod
