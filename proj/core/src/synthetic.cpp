#include "volgraph/synthetic.hpp"

#include "volgraph/error.hpp"

#include <cmath>
#include <random>

namespace volgraph {

void SyntheticConfig::validate() const {
    if (nodes < 2) throw ConfigError("synthetic panel needs at least 2 nodes");
    if (hub >= nodes) throw ConfigError("hub index out of range");
    if (length < 2) throw ConfigError("synthetic panel needs at least 2 rows");
    if (!(daily_vol > 0.0)) throw ConfigError("daily_vol must be > 0");
    if (hub_alpha < 0.0 || hub_beta < 0.0 || leaf_alpha < 0.0 || leaf_beta < 0.0 || spillover_weight < 0.0) {
        throw ConfigError("GARCH coefficients must be >= 0");
    }
    if (!(hub_alpha + hub_beta < 1.0)) throw ConfigError("hub GARCH is not covariance stationary");
    // Leaf intercept omega = v (1 - a - b - g) must stay positive for unconditional variance v.
    if (!(leaf_alpha + leaf_beta + spillover_weight < 1.0)) {
        throw ConfigError("leaf_alpha + leaf_beta + spillover_weight must be < 1");
    }
    if (spillover_lag < 1) throw ConfigError("spillover_lag must be >= 1");
    if (volume_sd < 0.0) throw ConfigError("volume_sd must be >= 0");
}

std::vector<Date> business_days(Date start, std::size_t count) {
    using namespace std::chrono;
    std::vector<Date> out;
    out.reserve(count);
    sys_days d{start};
    while (out.size() < count) {
        const weekday wd{d};
        if (wd != Saturday && wd != Sunday) out.emplace_back(d);
        d += days{1};
    }
    return out;
}

SyntheticPanel generate_synthetic(const SyntheticConfig& c) {
    c.validate();
    const auto n = static_cast<Eigen::Index>(c.nodes);
    const auto hub = static_cast<Eigen::Index>(c.hub);
    const auto lag = static_cast<Eigen::Index>(c.spillover_lag);
    const Eigen::Index burn = 500;
    const auto len = static_cast<Eigen::Index>(c.length);
    const Eigen::Index total = len + burn;
    const double v = c.daily_vol * c.daily_vol;
    const double hub_omega = v * (1.0 - c.hub_alpha - c.hub_beta);
    const double leaf_omega = v * (1.0 - c.leaf_alpha - c.leaf_beta - c.spillover_weight);

    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Eigen::MatrixXd h = Eigen::MatrixXd::Constant(n, total, v);
    Eigen::MatrixXd shock = Eigen::MatrixXd::Zero(n, total);
    for (Eigen::Index t = 0; t < total; ++t) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (t > 0) {
                const double e2 = shock(i, t - 1) * shock(i, t - 1);
                if (i == hub) {
                    h(i, t) = hub_omega + c.hub_alpha * e2 + c.hub_beta * h(i, t - 1);
                } else {
                    const double hub_e2 = t >= lag ? shock(hub, t - lag) * shock(hub, t - lag) : v;
                    h(i, t) = leaf_omega + c.leaf_alpha * e2 + c.leaf_beta * h(i, t - 1) + c.spillover_weight * hub_e2;
                }
            }
            shock(i, t) = std::sqrt(h(i, t)) * normal(rng);
        }
    }

    SyntheticPanel out;
    PricePanel& p = out.prices;
    p.dates = business_days(c.start, c.length);
    for (std::size_t k = 0, leaf = 1; k < c.nodes; ++k) {
        p.tickers.push_back(k == c.hub ? std::string("HUB") : "LEAF" + std::to_string(leaf++));
    }
    out.variance = h.rightCols(len);
    p.close.resize(n, len);
    p.volume = Eigen::MatrixXd(n, len);
    std::normal_distribution<double> volume_noise(0.0, c.volume_sd);
    for (Eigen::Index i = 0; i < n; ++i) {
        double log_price = 0.0;
        for (Eigen::Index t = 0; t < len; ++t) {
            if (t > 0) log_price += shock(i, burn + t);
            p.close(i, t) = 100.0 * std::exp(log_price);
            (*p.volume)(i, t) = std::round(std::exp(c.volume_level + volume_noise(rng)));
        }
    }
    return out;
}

}  // namespace volgraph
