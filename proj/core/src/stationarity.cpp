#include "volgraph/data_ingest.hpp"

#include "detail/ols.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace volgraph {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct AdfFit {
    double statistic = 0.0;
    double aic = 0.0;
    std::size_t nobs = 0;
};

// Regress dy_t on [1, y_{t-1}, dy_{t-1..t-lags}] for t in [first, n).
AdfFit adf_regression(std::span<const double> y, int lags, std::size_t first) {
    const std::size_t n = y.size();
    const std::size_t rows = n - first;
    const auto k = static_cast<Eigen::Index>(2 + lags);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), k);
    Eigen::VectorXd dy(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = first + r;
        const auto ri = static_cast<Eigen::Index>(r);
        dy(ri) = y[t] - y[t - 1];
        x(ri, 0) = 1.0;
        x(ri, 1) = y[t - 1];
        for (int j = 1; j <= lags; ++j) x(ri, 1 + j) = y[t - j] - y[t - j - 1];
    }
    const auto fit = detail::ols(x, dy);
    const double rss = fit.residuals.squaredNorm();
    const auto nobs = static_cast<double>(rows);
    const double dof = nobs - static_cast<double>(k);
    if (dof <= 0.0) throw std::invalid_argument("ADF regression has no residual degrees of freedom");
    const double s2 = rss / dof;
    const double se = std::sqrt(s2 * fit.xtx_inv(1, 1));
    AdfFit out;
    out.nobs = rows;
    out.statistic = se > 0.0 ? fit.coef(1, 0) / se : -std::numeric_limits<double>::infinity();
    const double llf = -0.5 * nobs * (std::log(2.0 * M_PI) + std::log(rss / nobs) + 1.0);
    out.aic = -2.0 * llf + 2.0 * static_cast<double>(k);
    return out;
}

}  // namespace

double mackinnon_p_value(double statistic) {
    // MacKinnon (1994) response surface, constant-only regression, one series.
    constexpr double tau_max = 2.74;
    constexpr double tau_min = -18.83;
    constexpr double tau_star = -1.61;
    constexpr double small_p[3] = {2.1659, 1.4412, 0.038269};
    constexpr double large_p[4] = {1.7339, 0.93202, -0.12745, -0.010368};
    if (statistic > tau_max) return 1.0;
    if (statistic < tau_min) return 0.0;
    double z = 0.0;
    if (statistic <= tau_star) {
        z = small_p[0] + statistic * (small_p[1] + statistic * small_p[2]);
    } else {
        z = large_p[0] + statistic * (large_p[1] + statistic * (large_p[2] + statistic * large_p[3]));
    }
    return normal_cdf(z);
}

int default_adf_max_lag(std::size_t n) {
    return static_cast<int>(std::ceil(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

AdfResult adf_test(std::span<const double> y, int max_lag) {
    if (max_lag < 0) throw std::invalid_argument("ADF max_lag must be >= 0");
    if (y.size() <= static_cast<std::size_t>(max_lag) + 10) {
        throw std::invalid_argument("ADF needs more than max_lag + 10 observations");
    }
    // Lag selection on a common sample so the AIC values are comparable.
    const auto common_first = static_cast<std::size_t>(max_lag) + 1;
    int best_lag = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (int lag = 0; lag <= max_lag; ++lag) {
        const auto fit = adf_regression(y, lag, common_first);
        if (fit.aic < best_aic) {
            best_aic = fit.aic;
            best_lag = lag;
        }
    }
    const auto fit = adf_regression(y, best_lag, static_cast<std::size_t>(best_lag) + 1);
    AdfResult r;
    r.statistic = fit.statistic;
    r.p_value = mackinnon_p_value(fit.statistic);
    r.lags = best_lag;
    r.nobs = fit.nobs;
    return r;
}

}  // namespace volgraph
