#include "volgraph/spillover.hpp"

#include "detail/ols.hpp"
#include "volgraph/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace volgraph {

VarModel fit_var(const Eigen::MatrixXd& panel, int lag_p) {
    if (lag_p < 1) throw std::invalid_argument("VAR lag order must be >= 1");
    const Eigen::Index n = panel.rows();
    const Eigen::Index t = panel.cols();
    const Eigen::Index p = lag_p;
    if (n < 1 || t <= n * p + p + 10) {
        throw DataError("VAR(" + std::to_string(lag_p) + ") on " + std::to_string(n) + " series needs more than " +
                        std::to_string(n * p + p + 10) + " observations, got " + std::to_string(t));
    }
    const Eigen::Index rows = t - p;
    Eigen::MatrixXd x(rows, 1 + n * p);
    Eigen::MatrixXd y(rows, n);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Eigen::Index s = r + p;
        y.row(r) = panel.col(s).transpose();
        x(r, 0) = 1.0;
        for (Eigen::Index k = 1; k <= p; ++k) {
            x.block(r, 1 + (k - 1) * n, 1, n) = panel.col(s - k).transpose();
        }
    }
    const auto fit = detail::ols(x, y);

    VarModel m;
    m.lag_p = lag_p;
    m.condition_number = fit.condition_number;
    m.intercept = fit.coef.row(0).transpose();
    for (Eigen::Index k = 0; k < p; ++k) {
        m.coefficients.emplace_back(fit.coef.middleRows(1 + k * n, n).transpose());
    }
    m.residuals = fit.residuals.transpose();
    Eigen::MatrixXd sigma = m.residuals * m.residuals.transpose() / static_cast<double>(rows);
    m.residual_cov = 0.5 * (sigma + sigma.transpose());
    m.spectral_radius = companion_spectral_radius(m.coefficients);
    return m;
}

double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& coefficients) {
    if (coefficients.empty()) return 0.0;
    const Eigen::Index n = coefficients.front().rows();
    const auto p = static_cast<Eigen::Index>(coefficients.size());
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n * p, n * p);
    for (Eigen::Index k = 0; k < p; ++k) companion.block(0, k * n, n, n) = coefficients[static_cast<std::size_t>(k)];
    if (p > 1) companion.block(n, 0, n * (p - 1), n * (p - 1)).setIdentity();
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<Eigen::MatrixXd> ma_coefficients(const VarModel& model, int horizon) {
    if (horizon < 1) throw std::invalid_argument("MA horizon must be >= 1");
    const Eigen::Index n = model.dim();
    std::vector<Eigen::MatrixXd> a;
    a.reserve(static_cast<std::size_t>(horizon));
    a.push_back(Eigen::MatrixXd::Identity(n, n));
    for (int h = 1; h < horizon; ++h) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
        for (int k = 1; k <= std::min(h, model.lag_p); ++k) {
            acc += model.coefficients[static_cast<std::size_t>(k - 1)] * a[static_cast<std::size_t>(h - k)];
        }
        a.push_back(std::move(acc));
    }
    return a;
}

SpilloverDecomposition gfevd(const VarModel& model, int horizon, SigmaConvention convention) {
    if (horizon < 1) throw std::invalid_argument("GFEVD horizon must be >= 1");
    const Eigen::Index n = model.dim();
    const Eigen::MatrixXd& sigma = model.residual_cov;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!(sigma(j, j) > 0.0)) throw NumericalError("residual covariance has a zero diagonal entry");
    }
    const auto a = ma_coefficients(model, horizon);

    Eigen::MatrixXd numer = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd denom = Eigen::VectorXd::Zero(n);
    for (const auto& ah : a) {
        const Eigen::MatrixXd as = ah * sigma;  // (i, j) = e_i' A_h Sigma e_j
        numer += as.cwiseAbs2();
        denom += (as * ah.transpose()).diagonal();
    }

    SpilloverDecomposition d;
    d.horizon_h = horizon;
    d.theta.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double scale = convention == SigmaConvention::Variance ? sigma(j, j) : std::sqrt(sigma(j, j));
        for (Eigen::Index i = 0; i < n; ++i) d.theta(i, j) = numer(i, j) / (scale * denom(i));
    }
    d.theta_normalized = d.theta;
    for (Eigen::Index i = 0; i < n; ++i) d.theta_normalized.row(i) /= d.theta.row(i).sum();
    // Rows sum to one, so the off-diagonal mass over N equals 1 - trace / N.
    d.total_index = 100.0 * (1.0 - d.theta_normalized.trace() / static_cast<double>(n));
    return d;
}

Eigen::MatrixXd pairwise_spillover_matrix(const SpilloverDecomposition& decomp, bool percent) {
    return percent ? Eigen::MatrixXd(100.0 * decomp.theta_normalized) : decomp.theta_normalized;
}

}  // namespace volgraph
