#pragma once

#include <volgraph/data_ingest.hpp>
#include <volgraph/synthetic.hpp>
#include <volgraph/training.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace volgraph::testing {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double lo = -1.0,
                                     double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
    return m;
}

inline std::vector<double> normal_series(std::size_t n, double sd, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, sd);
    std::vector<double> out(n);
    for (auto& v : out) v = z(rng);
    return out;
}

/// |a - b| / max(|a|, |b|, floor).
inline double relative_error(double a, double b, double floor = 1e-12) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double max_relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor = 1e-12) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) worst = std::max(worst, relative_error(a(i, j), b(i, j), floor));
    return worst;
}

/// Geometric random walk prices on business days.
inline PricePanel random_price_panel(std::size_t n, std::size_t t, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 0.01);
    PricePanel p;
    p.dates = business_days(Date{std::chrono::year{2015}, std::chrono::January, std::chrono::day{1}}, t);
    for (std::size_t i = 0; i < n; ++i) p.tickers.push_back("T" + std::to_string(i));
    p.close.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
    for (Eigen::Index i = 0; i < p.close.rows(); ++i) {
        double lp = std::log(50.0 + 10.0 * static_cast<double>(i));
        for (Eigen::Index j = 0; j < p.close.cols(); ++j) {
            if (j > 0) lp += z(rng);
            p.close(i, j) = std::exp(lp);
        }
    }
    return p;
}

/// The planted hub-and-spoke panel used by the direction checks.
inline ExperimentData synthetic_experiment(std::uint64_t seed, std::size_t length = 1500, int window_m = 5,
                                           bool with_garch = false) {
    SyntheticConfig cfg;
    cfg.length = length;
    cfg.seed = seed;
    return make_experiment_data(generate_synthetic(cfg).prices, window_m, {}, with_garch);
}

}  // namespace volgraph::testing
