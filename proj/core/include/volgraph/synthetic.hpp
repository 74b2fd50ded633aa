#pragma once

#include "volgraph/data_ingest.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>

namespace volgraph {

/// Hub-and-spoke panel with GARCH(1,1) marginals and a planted volatility spillover.
///
/// The hub is a plain GARCH(1,1). Each leaf's variance equation also loads on the
/// hub's squared shock `spillover_lag` days earlier:
///   h_leaf,t = omega + a * e_leaf,t-1^2 + b * h_leaf,t-1 + g * e_hub,t-lag^2
/// Intercepts are set so every series has unconditional daily volatility `daily_vol`.
/// Volumes are independent of volatility.
struct SyntheticConfig {
    std::size_t nodes = 8;
    std::size_t hub = 0;
    std::size_t length = 1500;  // price rows
    double daily_vol = 0.01;
    double hub_alpha = 0.10;
    double hub_beta = 0.85;
    double leaf_alpha = 0.05;
    double leaf_beta = 0.30;
    double spillover_weight = 0.60;
    int spillover_lag = 3;
    double volume_level = 15.0;  // mean log volume
    double volume_sd = 0.3;
    std::uint64_t seed = 1;
    Date start{std::chrono::year{2010}, std::chrono::January, std::chrono::day{4}};

    /// Throws ConfigError on inconsistent fields.
    void validate() const;
};

struct SyntheticPanel {
    PricePanel prices;
    Eigen::MatrixXd variance;  // N x T conditional daily variances
};

SyntheticPanel generate_synthetic(const SyntheticConfig& config);

/// Weekday dates starting at `start` (which is moved forward to a weekday).
std::vector<Date> business_days(Date start, std::size_t count);

}  // namespace volgraph
