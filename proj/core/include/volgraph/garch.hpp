#pragma once

#include "volgraph/data_ingest.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace volgraph {

/// GARCH(p, q): p ARCH terms (alpha on lagged squared shocks), q GARCH terms (beta on lagged variances).
struct GarchSpec {
    int p = 1;
    int q = 1;

    void validate() const;
};

struct GarchParams {
    double mu = 0.0;
    double omega0 = 0.0;
    std::vector<double> alpha;
    std::vector<double> beta;

    [[nodiscard]] double persistence() const;
    [[nodiscard]] double unconditional_variance() const;
    /// Throws std::invalid_argument unless omega0 > 0, alpha, beta >= 0 and persistence < 1.
    void validate(const GarchSpec& spec) const;
};

struct GarchFit {
    GarchParams params;
    double log_likelihood = 0.0;
    std::vector<double> h_series;
    bool converged = false;
    int iterations = 0;
};

/// Conditional variances h_t for every observation.
///
/// Pre-sample squared shocks and variances are set to `seed_variance`, which
/// defaults to the mean of (r_t - mu)^2 over the series.
std::vector<double> garch_filter(std::span<const double> returns, const GarchParams& params, const GarchSpec& spec,
                                 std::optional<double> seed_variance = std::nullopt);

/// Gaussian log-likelihood summed over t >= max(p, q).
double garch_log_likelihood(std::span<const double> returns, const GarchParams& params, const GarchSpec& spec);

/// Gaussian QMLE by Nelder-Mead over an unconstrained reparameterisation.
GarchFit fit_garch(std::span<const double> returns, const GarchSpec& spec = {});

/// Gaussian GARCH path; 500 burn-in draws are discarded.
std::vector<double> simulate_garch(const GarchParams& params, const GarchSpec& spec, std::size_t length,
                                   std::uint64_t seed);

/// sqrt(h_t) per ticker, aligned with the volatility panel's dates.
///
/// Each ticker is fitted on the returns inside the panel's training partition
/// only; the fitted recursion is then run over the whole return history.
Eigen::MatrixXd garch_volatility_features(const ReturnPanel& returns, const VolatilityPanel& panel,
                                          const GarchSpec& spec = {});

}  // namespace volgraph
