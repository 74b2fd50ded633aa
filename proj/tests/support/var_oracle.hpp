#pragma once

#include <volgraph/spillover.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace volgraph::testing {

/// Responses y_0..y_{H-1} of the VAR's deterministic part to an impulse `shock` at time 0.
inline std::vector<Eigen::VectorXd> propagate_impulse(const VarModel& m, const Eigen::VectorXd& shock, int horizon) {
    std::vector<Eigen::VectorXd> y;
    for (int t = 0; t < horizon; ++t) {
        Eigen::VectorXd v = t == 0 ? shock : Eigen::VectorXd::Zero(shock.size());
        for (int k = 1; k <= m.lag_p && k <= t; ++k) v += m.coefficients[static_cast<std::size_t>(k - 1)] * y[t - k];
        y.push_back(v);
    }
    return y;
}

/// Generalized FEVD shares built from simulated impulse paths.
///
/// The numerator feeds the generalized shock Sigma e_j; the forecast-error variance
/// of each variable is accumulated over orthogonal Cholesky shocks.
inline Eigen::MatrixXd gfevd_oracle(const VarModel& m, int horizon, bool sigma_as_stddev = false) {
    const Eigen::Index n = m.dim();
    const Eigen::MatrixXd& sigma = m.residual_cov;
    const Eigen::MatrixXd chol = sigma.llt().matrixL();
    Eigen::VectorXd fev = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (const auto& y : propagate_impulse(m, chol.col(k), horizon)) fev += y.cwiseAbs2();
    }
    Eigen::MatrixXd theta(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
        for (const auto& y : propagate_impulse(m, sigma.col(j), horizon)) acc += y.cwiseAbs2();
        const double scale = sigma_as_stddev ? std::sqrt(sigma(j, j)) : sigma(j, j);
        theta.col(j) = acc.cwiseQuotient(fev) / scale;
    }
    return theta;
}

/// VAR with random coefficients rescaled until the companion spectral radius is below `max_radius`,
/// and a random positive-definite residual covariance.
inline VarModel random_stable_var(Eigen::Index n, int lags, std::uint64_t seed, double max_radius = 0.9) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VarModel m;
    m.lag_p = lags;
    m.intercept = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < lags; ++k) {
        Eigen::MatrixXd c(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) c(i, j) = 0.5 * u(rng);
        m.coefficients.push_back(c);
    }
    double radius = companion_spectral_radius(m.coefficients);
    while (radius >= max_radius) {
        for (auto& c : m.coefficients) c *= 0.8;
        radius = companion_spectral_radius(m.coefficients);
    }
    m.spectral_radius = radius;
    Eigen::MatrixXd b(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) b(i, j) = u(rng);
    m.residual_cov = b * b.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
    return m;
}

/// N x T sample path of a VAR driven by Gaussian shocks with covariance `m.residual_cov`.
inline Eigen::MatrixXd simulate_var(const VarModel& m, Eigen::Index length, std::uint64_t seed) {
    const Eigen::Index n = m.dim();
    const Eigen::MatrixXd chol = m.residual_cov.llt().matrixL();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    const Eigen::Index burn = 200;
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, length + burn);
    for (Eigen::Index t = 0; t < length + burn; ++t) {
        Eigen::VectorXd e(n);
        for (Eigen::Index i = 0; i < n; ++i) e(i) = z(rng);
        Eigen::VectorXd v = m.intercept + chol * e;
        for (int k = 1; k <= m.lag_p && k <= t; ++k) v += m.coefficients[static_cast<std::size_t>(k - 1)] * y.col(t - k);
        y.col(t) = v;
    }
    return y.rightCols(length);
}

}  // namespace volgraph::testing
